#include "pru/gen.hpp"

namespace pru {

int min_size_for(Arity a) { return a.cod == 1 ? 1 : 2 * a.cod - 1; }

namespace {

Term cheapest(Arity a) {
  std::vector<int> ones(static_cast<size_t>(a.cod), 1);
  return multi_proj(a.dom, ones);
}

} // namespace

int TermGen::pick(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

Term TermGen::term(int size_budget, const GenParams &p) {
  Arity a{pick(1, p.max_width), pick(1, p.max_width)};
  return term_with_arity(a, size_budget, p);
}

Term TermGen::term_with_arity(Arity a, int size_budget, const GenParams &p) {
  if (size_budget < min_size_for(a))
    return cheapest(a);

  enum Option { Leaf, Comp, Rec, Pair };
  std::vector<Option> options;

  if (a.cod == 1)
    options.push_back(Leaf);

  // comp: inner (a.dom, m), outer (m, a.cod).
  std::vector<int> comp_ms;
  for (int m = 1; m <= p.max_width; ++m)
    if (1 + min_size_for({a.dom, m}) + min_size_for({m, a.cod}) <= size_budget)
      comp_ms.push_back(m);
  if (!comp_ms.empty())
    options.push_back(Comp);

  const bool rec_ok =
      p.allow_rec && a.dom >= 2 && a.dom - 1 + a.cod <= p.max_width &&
      1 + min_size_for({a.dom - 1, a.cod}) +
              min_size_for({a.dom - 1 + a.cod, a.cod}) <=
          size_budget;
  if (rec_ok)
    options.push_back(Rec);

  std::vector<int> pair_splits;
  for (int b1 = 1; b1 < a.cod; ++b1)
    if (1 + min_size_for({a.dom, b1}) + min_size_for({a.dom, a.cod - b1}) <=
        size_budget)
      pair_splits.push_back(b1);
  if (!pair_splits.empty())
    options.push_back(Pair);

  if (options.empty())
    return cheapest(a);

  // Bias toward structure when there is budget to spend.
  Option choice = options[static_cast<size_t>(pick(
      0, static_cast<int>(options.size()) - 1))];
  if (choice == Leaf && options.size() > 1 && size_budget >= 4 && pick(0, 2))
    choice = options[static_cast<size_t>(
        pick(1, static_cast<int>(options.size()) - 1))];

  switch (choice) {
  case Leaf: {
    if (a.dom == 1) {
      int k = pick(0, 2);
      if (k == 0)
        return Term::z();
      if (k == 1)
        return Term::s();
      return Term::proj(1, 1);
    }
    return Term::proj(a.dom, pick(1, a.dom));
  }
  case Comp: {
    int m = comp_ms[static_cast<size_t>(
        pick(0, static_cast<int>(comp_ms.size()) - 1))];
    int rest = size_budget - 1;
    int need_inner = min_size_for({a.dom, m});
    int need_outer = min_size_for({m, a.cod});
    int inner_budget = pick(need_inner, rest - need_outer);
    Term inner = term_with_arity({a.dom, m}, inner_budget, p);
    Term outer = term_with_arity({m, a.cod}, rest - inner.size(), p);
    return Term::comp(outer, inner);
  }
  case Rec: {
    Arity base_a{a.dom - 1, a.cod};
    Arity step_a{a.dom - 1 + a.cod, a.cod};
    int rest = size_budget - 1;
    int base_budget = pick(min_size_for(base_a), rest - min_size_for(step_a));
    Term base = term_with_arity(base_a, base_budget, p);
    Term step = term_with_arity(step_a, rest - base.size(), p);
    return Term::rec(base, step);
  }
  case Pair: {
    int b1 = pair_splits[static_cast<size_t>(
        pick(0, static_cast<int>(pair_splits.size()) - 1))];
    Arity fa{a.dom, b1};
    Arity ga{a.dom, a.cod - b1};
    int rest = size_budget - 1;
    int f_budget = pick(min_size_for(fa), rest - min_size_for(ga));
    Term f = term_with_arity(fa, f_budget, p);
    Term g = term_with_arity(ga, rest - f.size(), p);
    return Term::pair(f, g);
  }
  }
  return cheapest(a);
}

} // namespace pru
