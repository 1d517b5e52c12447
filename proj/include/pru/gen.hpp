#pragma once

#include "pru/term.hpp"

#include <random>

namespace pru {

struct GenParams {
  int max_size = 25;
  int max_width = 3;  // cap on every dom/cod that appears in the term
  bool allow_rec = true;
};

// Seeded generator of well-typed terms. Sizes are soft targets: the result
// never exceeds the requested budget unless the cheapest inhabitant of the
// arity is itself larger.
class TermGen {
public:
  explicit TermGen(uint64_t seed) : rng_(seed) {}

  Term term_with_arity(Arity a, int size_budget, const GenParams &p = {});
  Term term(int size_budget, const GenParams &p = {}); // random arity

  std::mt19937_64 &rng() { return rng_; }

private:
  int pick(int lo, int hi); // uniform in [lo, hi]

  std::mt19937_64 rng_;
};

// Smallest term size inhabiting (dom, cod): 1 for cod 1, else a projection
// tuple of cod leaves.
int min_size_for(Arity a);

} // namespace pru
