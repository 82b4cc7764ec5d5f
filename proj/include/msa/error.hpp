#ifndef MSA_ERROR_HPP
#define MSA_ERROR_HPP

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

namespace msa {

/** Base of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A term or assignment that violates the operation types of a signature. */
class SortError : public Error {
 public:
  using Error::Error;
};

/** A finite algebra whose carriers or tables are malformed. */
class ModelError : public Error {
 public:
  using Error::Error;
};

/** Evaluation of a term under an assignment that does not bind all of its variables. */
class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/** An enumeration or construction that would exceed its configured bound. */
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t bound)
      : Error(what + " needs " + std::to_string(required) + " but the budget is " +
              std::to_string(bound)),
        required_(required),
        bound_(bound) {}
  std::uint64_t required() const { return required_; }
  std::uint64_t bound() const { return bound_; }

 private:
  std::uint64_t required_;
  std::uint64_t bound_;
};

/** Positioned error from one of the text formats. Lines and columns are 1-based. */
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message,
             std::set<std::string> expected = {})
      : Error(format(line, column, message, expected)),
        line_(line),
        column_(column),
        message_(message),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& message,
                            const std::set<std::string>& expected) {
    std::string out = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    if (!expected.empty()) {
      out += " (expected one of:";
      for (const auto& e : expected) out += " " + e;
      out += ")";
    }
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::set<std::string> expected_;
};

/** Operation requested for a variety that has no built-in free algebra. */
class UnsupportedVariety : public Error {
 public:
  using Error::Error;
};

}  // namespace msa

#endif  // MSA_ERROR_HPP
