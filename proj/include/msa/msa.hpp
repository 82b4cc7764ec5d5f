#ifndef MSA_MSA_HPP
#define MSA_MSA_HPP

#include "msa/error.hpp"
#include "msa/signature.hpp"
#include "msa/term.hpp"
#include "msa/variety.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/words.hpp"
#include "msa/text.hpp"
#include "msa/free_forms.hpp"
#include "msa/diagonal.hpp"
#include "msa/closure.hpp"
#include "msa/verbal.hpp"
#include "msa/search.hpp"

#endif  // MSA_MSA_HPP
