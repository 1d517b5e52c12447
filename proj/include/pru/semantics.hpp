#pragma once

#include "pru/term.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json_fwd.hpp>
#include <optional>

namespace pru {

using Nat = boost::multiprecision::cpp_int;
using Tuple = std::vector<Nat>;

// Work limits for a single evaluation. `max_steps` counts node visits;
// `max_magnitude_bits` bounds every intermediate value (checked where
// values grow: on inputs and at each successor).
struct Budget {
  uint64_t max_steps = 1'000'000;
  uint32_t max_magnitude_bits = 4096;
};

// Evaluates t on input x (width must equal t.dom(), entries non-negative).
// Recursion runs iteratively on the counter, so stack depth stays
// proportional to term depth. Throws BudgetExceeded when limits trip,
// ArityMismatch on wrong input width, Error on negative entries.
Tuple eval(const Term &t, const Tuple &x, const Budget &budget = {});

// Output table of t on the grid {0..grid-1}^dom, row-major with the
// leftmost coordinate most significant. Cells whose evaluation blows the
// (per-cell) budget are empty; `partial` records whether any did.
// Fingerprints of different arity or grid never compare equal; a partial
// fingerprint equals only an identically-partial one.
struct Fingerprint {
  Arity arity;
  int grid = 0;
  std::vector<std::optional<Tuple>> table;
  bool partial = false;

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;
};

Fingerprint fingerprint(const Term &t, int grid, const Budget &budget = {});

// Same-arity terms with equal, fully computed tables on the grid.
// Throws ArityMismatch if arities differ.
bool semantically_equal_on(const Term &a, const Term &b, int grid,
                           const Budget &budget = {});

// {"arity":[a,b],"grid":k,"table":[[...],...],"partial":bool}; values that
// fit uint64 are numbers, larger ones decimal strings, failed cells null.
nlohmann::json fingerprint_json(const Fingerprint &fp);

std::string nat_to_string(const Nat &n);

} // namespace pru
