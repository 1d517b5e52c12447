#include "pru/universes.hpp"

#include <algorithm>
#include <numeric>

// Rule schemas. Matching is structural; where a matched component may be
// any spelling of a projection tuple (identity, twist, block projection)
// the recognizers from term.hpp are used, which is semantically exact.
// Produced terms always use the canonical macro spellings, so forward
// results are replayable and deterministic.

namespace pru {

namespace {

int rand_in(TermGen &g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g.rng());
}

GenParams gen_params(const InstanceBounds &b) {
  GenParams p;
  p.max_size = b.max_term_size;
  p.max_width = b.max_width;
  return p;
}

// <1..k> out of width.
Term front_proj(int width, int k) {
  std::vector<int> outs(static_cast<size_t>(k));
  std::iota(outs.begin(), outs.end(), 1);
  return multi_proj(width, outs);
}

// <width-k+1..width> out of width.
Term back_proj(int width, int k) {
  std::vector<int> outs(static_cast<size_t>(k));
  std::iota(outs.begin(), outs.end(), width - k + 1);
  return multi_proj(width, outs);
}

// Projection-tuple term with exactly the outputs lo..hi out of width.
bool matches_range(const Term &t, int width, int lo, int hi) {
  ProjSpec spec;
  if (!multi_proj_spec(t, spec) || spec.width != width)
    return false;
  if (static_cast<int>(spec.outputs.size()) != hi - lo + 1)
    return false;
  for (size_t i = 0; i < spec.outputs.size(); ++i)
    if (spec.outputs[i] != lo + static_cast<int>(i))
      return false;
  return true;
}

class AssocComp final : public RuleSchema {
public:
  const char *id() const override { return "assoc-comp"; }
  Orientation orientation() const override { return Orientation::Directed; }

  // x o (y o z) -> (x o y) o z
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(1).kind() != Kind::Comp)
      return {};
    const Term &x = t.child(0);
    const Term &yz = t.child(1);
    return {Term::comp(Term::comp(x, yz.child(0)), yz.child(1))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(0).kind() != Kind::Comp)
      return {};
    const Term &xy = t.child(0);
    const Term &z = t.child(1);
    return {Term::comp(xy.child(0), Term::comp(xy.child(1), z))};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width), c1 = rand_in(gen, 1, b.max_width);
      int c2 = rand_in(gen, 1, b.max_width), d = rand_in(gen, 1, b.max_width);
      Term z = gen.term_with_arity({a, c1}, b.max_term_size, p);
      Term y = gen.term_with_arity({c1, c2}, b.max_term_size, p);
      Term x = gen.term_with_arity({c2, d}, b.max_term_size, p);
      out.emplace_back(Term::comp(x, Term::comp(y, z)),
                       Term::comp(Term::comp(x, y), z));
    }
    return out;
  }
};

class CompIdent final : public RuleSchema {
public:
  const char *id() const override { return "comp-ident"; }
  Orientation orientation() const override { return Orientation::Directed; }

  // g o id -> g and id o f -> f. The unit is the canonical identity
  // spelling (right-nested projection tuple); this keeps normal forms
  // unique, since arbitrary spellings of the identity are themselves
  // irreducible.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp)
      return {};
    std::vector<Term> out;
    if (t.child(1) == identity(t.dom()))
      out.push_back(t.child(0));
    if (t.child(0) == identity(t.cod()))
      out.push_back(t.child(1));
    return out;
  }

  std::vector<Term> backward(const Term &t) const override {
    return {Term::comp(t, identity(t.dom())),
            Term::comp(identity(t.cod()), t)};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width), c = rand_in(gen, 1, b.max_width);
      Term f = gen.term_with_arity({a, c}, b.max_term_size, p);
      Term lhs = rand_in(gen, 0, 1) ? Term::comp(f, identity(a))
                                    : Term::comp(identity(c), f);
      out.emplace_back(lhs, f);
    }
    return out;
  }
};

class PairAssoc final : public RuleSchema {
public:
  const char *id() const override { return "pair-assoc"; }
  Orientation orientation() const override { return Orientation::Directed; }

  // <<f,g>,h> -> <f,<g,h>> (toward the right-nesting the tuple macros use)
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Pair || t.child(0).kind() != Kind::Pair)
      return {};
    const Term &fg = t.child(0);
    return {Term::pair(fg.child(0), Term::pair(fg.child(1), t.child(1)))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Pair || t.child(1).kind() != Kind::Pair)
      return {};
    const Term &gh = t.child(1);
    return {Term::pair(Term::pair(t.child(0), gh.child(0)), gh.child(1))};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width);
      Term f = gen.term_with_arity({a, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      Term g = gen.term_with_arity({a, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      Term h = gen.term_with_arity({a, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      out.emplace_back(Term::pair(Term::pair(f, g), h),
                       Term::pair(f, Term::pair(g, h)));
    }
    return out;
  }
};

class CompPairDistrib final : public RuleSchema {
public:
  const char *id() const override { return "comp-pair-distrib"; }
  Orientation orientation() const override { return Orientation::Directed; }

  // <f,g> o h -> <f o h, g o h>
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(0).kind() != Kind::Pair)
      return {};
    const Term &fg = t.child(0);
    const Term &h = t.child(1);
    return {Term::pair(Term::comp(fg.child(0), h), Term::comp(fg.child(1), h))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Pair || t.child(0).kind() != Kind::Comp ||
        t.child(1).kind() != Kind::Comp)
      return {};
    const Term &fh = t.child(0);
    const Term &gh = t.child(1);
    if (!(fh.child(1) == gh.child(1)))
      return {};
    return {Term::comp(Term::pair(fh.child(0), gh.child(0)), fh.child(1))};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width), m = rand_in(gen, 1, b.max_width);
      Term h = gen.term_with_arity({a, m}, b.max_term_size, p);
      Term f = gen.term_with_arity({m, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      Term g = gen.term_with_arity({m, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      out.emplace_back(Term::comp(Term::pair(f, g), h),
                       Term::pair(Term::comp(f, h), Term::comp(g, h)));
    }
    return out;
  }
};

class PairComm final : public RuleSchema {
public:
  const char *id() const override { return "pair-comm"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }

  // <f,g> -> tw(|g|,|f|) o <g,f>: tupling commutes up to a block swap.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Pair)
      return {};
    const Term &f = t.child(0);
    const Term &g = t.child(1);
    return {Term::comp(twist(g.cod(), f.cod()), Term::pair(g, f))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(1).kind() != Kind::Pair)
      return {};
    int ta = 0, tb = 0;
    if (!twist_blocks(t.child(0), ta, tb))
      return {};
    const Term &g = t.child(1).child(0);
    const Term &f = t.child(1).child(1);
    if (g.cod() != ta || f.cod() != tb)
      return {};
    return {Term::pair(f, g)};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width);
      Term f = gen.term_with_arity({a, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      Term g = gen.term_with_arity({a, rand_in(gen, 1, b.max_width)},
                                   b.max_term_size, p);
      out.emplace_back(Term::pair(f, g),
                       Term::comp(twist(g.cod(), f.cod()), Term::pair(g, f)));
    }
    return out;
  }
};

class TwistIdem final : public RuleSchema {
public:
  const char *id() const override { return "twist-idem"; }
  Orientation orientation() const override { return Orientation::Directed; }

  // tw(b,a) o tw(a,b) -> id(a+b): swapping twice is the identity. The
  // second twist must undo the first, so its blocks are reversed.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp)
      return {};
    int a = 0, bwidth = 0, xa = 0, xb = 0;
    if (!twist_blocks(t.child(1), a, bwidth) ||
        !twist_blocks(t.child(0), xa, xb))
      return {};
    if (xa != bwidth || xb != a)
      return {};
    return {identity(a + bwidth)};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (!is_identity(t) || t.dom() < 2)
      return {};
    std::vector<Term> out;
    const int n = t.dom();
    for (int a = 1; a < n; ++a)
      out.push_back(Term::comp(twist(n - a, a), twist(a, n - a)));
    return out;
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, b.max_width), c = rand_in(gen, 1, b.max_width);
      out.emplace_back(Term::comp(twist(c, a), twist(a, c)), identity(a + c));
    }
    return out;
  }
};

Term hex_lhs(int a, int b, int c) {
  Term z = product(twist(a, b), identity(c));
  Term y = product(identity(b), twist(a, c));
  Term x = product(twist(b, c), identity(a));
  return Term::comp(Term::comp(x, y), z);
}

Term hex_rhs(int a, int b, int c) {
  Term z = product(identity(a), twist(b, c));
  Term y = product(twist(a, c), identity(b));
  Term x = product(identity(c), twist(a, b));
  return Term::comp(Term::comp(x, y), z);
}

class TwistHexagon final : public RuleSchema {
public:
  const char *id() const override { return "twist-hexagon"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }

  // Two ways of reversing three blocks agree: swap pairwise starting from
  // the left or starting from the right. Both sides map (u,v,w) to
  // (w,v,u); matching enumerates the block split.
  std::vector<Term> forward(const Term &t) const override {
    return match(t, hex_lhs, hex_rhs);
  }

  std::vector<Term> backward(const Term &t) const override {
    return match(t, hex_rhs, hex_lhs);
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &) const override {
    std::vector<std::pair<Term, Term>> out;
    for (int i = 0; i < count; ++i) {
      int a = rand_in(gen, 1, 2), b = rand_in(gen, 1, 2), c = rand_in(gen, 1, 2);
      out.emplace_back(hex_lhs(a, b, c), hex_rhs(a, b, c));
    }
    return out;
  }

private:
  template <typename Build>
  static std::vector<Term> match(const Term &t, Build from, Build to) {
    if (t.kind() != Kind::Comp)
      return {};
    const int n = t.dom();
    if (t.cod() != n || n < 3)
      return {};
    std::vector<Term> out;
    for (int a = 1; a <= n - 2; ++a)
      for (int b = 1; b <= n - a - 1; ++b) {
        int c = n - a - b;
        if (t == from(a, b, c))
          out.push_back(to(a, b, c));
      }
    return out;
  }
};

// (id(a) x leaf) as produced by the product macro, with the projection
// tuples recognized in any spelling: Pair(Comp(id', L), Comp(leaf, R))
// where id' spells id(a), L spells <1..a> of a+1, R spells <a+1> of a+1.
bool matches_id_cross_leaf(const Term &t, int a, const Term &leaf) {
  if (t.kind() != Kind::Pair)
    return false;
  const Term &lhs = t.child(0);
  const Term &rhs = t.child(1);
  if (lhs.kind() != Kind::Comp || rhs.kind() != Kind::Comp)
    return false;
  if (!is_identity(lhs.child(0)) || lhs.child(0).dom() != a)
    return false;
  if (!matches_range(lhs.child(1), a + 1, 1, a))
    return false;
  if (!(rhs.child(0) == leaf))
    return false;
  return matches_range(rhs.child(1), a + 1, a + 1, a + 1);
}

class NnoLeft final : public RuleSchema {
public:
  const char *id() const override { return "nno-left"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }

  // rec(f,g) o (id x z) -> f o <1..a>: recursion at counter zero is the
  // base case.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(0).kind() != Kind::Rec)
      return {};
    const Term &r = t.child(0);
    const int a = r.dom() - 1;
    if (!matches_id_cross_leaf(t.child(1), a, Term::z()))
      return {};
    return {Term::comp(r.child(0), front_proj(a + 1, a))};
  }

  // The right side does not mention the step term, so there is no finite
  // way to enumerate preimages; this schema only fires left to right.
  std::vector<Term> backward(const Term &) const override { return {}; }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      const int w = std::max(2, b.max_width);
      int a = rand_in(gen, 1, w - 1);
      int c = rand_in(gen, 1, w - a);
      Term f = gen.term_with_arity({a, c}, b.max_term_size, p);
      Term g = gen.term_with_arity({a + c, c}, b.max_term_size, p);
      Term r = Term::rec(f, g);
      out.emplace_back(Term::comp(r, product(identity(a), Term::z())),
                       Term::comp(f, front_proj(a + 1, a)));
    }
    return out;
  }
};

class NnoRight final : public RuleSchema {
public:
  const char *id() const override { return "nno-right"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }

  // rec(f,g) o (id x s) -> g o <<1..a>, rec(f,g)>: one more successor on
  // the counter runs the step on the previous value.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(0).kind() != Kind::Rec)
      return {};
    const Term &r = t.child(0);
    const int a = r.dom() - 1;
    if (!matches_id_cross_leaf(t.child(1), a, Term::s()))
      return {};
    return {Term::comp(r.child(1), Term::pair(front_proj(a + 1, a), r))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Comp || t.child(1).kind() != Kind::Pair)
      return {};
    const Term &pr = t.child(1);
    if (pr.child(1).kind() != Kind::Rec)
      return {};
    const Term &r = pr.child(1);
    const int a = r.dom() - 1;
    if (!(t.child(0) == r.child(1)) ||
        !matches_range(pr.child(0), a + 1, 1, a))
      return {};
    return {Term::comp(r, product(identity(a), Term::s()))};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      const int w = std::max(2, b.max_width);
      int a = rand_in(gen, 1, w - 1);
      int c = rand_in(gen, 1, w - a);
      Term f = gen.term_with_arity({a, c}, b.max_term_size, p);
      Term g = gen.term_with_arity({a + c, c}, b.max_term_size, p);
      Term r = Term::rec(f, g);
      out.emplace_back(
          Term::comp(r, product(identity(a), Term::s())),
          Term::comp(g, Term::pair(front_proj(a + 1, a), r)));
    }
    return out;
  }
};

class NnoIdent final : public RuleSchema {
public:
  const char *id() const override { return "nno-ident"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }

  // rec(f, <a+1..a+b>) -> f o <1..a>: a step that returns the previous
  // value makes the recursion constant in the counter.
  std::vector<Term> forward(const Term &t) const override {
    if (t.kind() != Kind::Rec)
      return {};
    const int a = t.dom() - 1;
    const int b = t.cod();
    if (!matches_range(t.child(1), a + b, a + 1, a + b))
      return {};
    return {Term::comp(t.child(0), front_proj(a + 1, a))};
  }

  std::vector<Term> backward(const Term &t) const override {
    if (t.kind() != Kind::Comp)
      return {};
    const int a = t.dom() - 1;
    if (a < 1 || !matches_range(t.child(1), a + 1, 1, a))
      return {};
    const Term &f = t.child(0);
    if (f.dom() != a)
      return {};
    return {Term::rec(f, back_proj(a + f.cod(), f.cod()))};
  }

  std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &b) const override {
    std::vector<std::pair<Term, Term>> out;
    GenParams p = gen_params(b);
    for (int i = 0; i < count; ++i) {
      const int w = std::max(2, b.max_width);
      int a = rand_in(gen, 1, w - 1);
      int c = rand_in(gen, 1, w - a);
      Term f = gen.term_with_arity({a, c}, b.max_term_size, p);
      out.emplace_back(Term::rec(f, back_proj(a + c, c)),
                       Term::comp(f, front_proj(a + 1, a)));
    }
    return out;
  }
};

// Placeholder for the law tying recursion to a composition-like operator
// on descriptions. The operator it needs is defined in material that is
// not available, so the schema is declared but never fires.
class NnoComp final : public RuleSchema {
public:
  const char *id() const override { return "nno-comp"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }
  bool enabled() const override { return false; }
  std::vector<Term> forward(const Term &) const override { return {}; }
  std::vector<Term> backward(const Term &) const override { return {}; }
  std::vector<std::pair<Term, Term>>
  instances(TermGen &, int, const InstanceBounds &) const override {
    return {};
  }
};

// Placeholder for the recursion/bracket interchange law; same situation
// as nno-comp.
class NnoPair final : public RuleSchema {
public:
  const char *id() const override { return "nno-pair"; }
  Orientation orientation() const override {
    return Orientation::Bidirectional;
  }
  bool enabled() const override { return false; }
  std::vector<Term> forward(const Term &) const override { return {}; }
  std::vector<Term> backward(const Term &) const override { return {}; }
  std::vector<std::pair<Term, Term>>
  instances(TermGen &, int, const InstanceBounds &) const override {
    return {};
  }
};

} // namespace

namespace detail {

const RuleSchema *assoc_comp_rule() {
  static const AssocComp r;
  return &r;
}
const RuleSchema *comp_ident_rule() {
  static const CompIdent r;
  return &r;
}
const RuleSchema *pair_assoc_rule() {
  static const PairAssoc r;
  return &r;
}
const RuleSchema *comp_pair_distrib_rule() {
  static const CompPairDistrib r;
  return &r;
}
const RuleSchema *pair_comm_rule() {
  static const PairComm r;
  return &r;
}
const RuleSchema *twist_idem_rule() {
  static const TwistIdem r;
  return &r;
}
const RuleSchema *twist_hexagon_rule() {
  static const TwistHexagon r;
  return &r;
}
const RuleSchema *nno_left_rule() {
  static const NnoLeft r;
  return &r;
}
const RuleSchema *nno_right_rule() {
  static const NnoRight r;
  return &r;
}
const RuleSchema *nno_ident_rule() {
  static const NnoIdent r;
  return &r;
}
const RuleSchema *nno_comp_rule() {
  static const NnoComp r;
  return &r;
}
const RuleSchema *nno_pair_rule() {
  static const NnoPair r;
  return &r;
}

} // namespace detail

} // namespace pru
