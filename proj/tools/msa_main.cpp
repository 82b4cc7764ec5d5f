#include <string>
#include <vector>

#include "msa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return msa::cli::run_command(args).exit_code;
}
