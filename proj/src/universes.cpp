#include "pru/universes.hpp"

#include <algorithm>
#include <deque>
#include <nlohmann/json.hpp>

namespace pru {

namespace detail {
const RuleSchema *assoc_comp_rule();
const RuleSchema *comp_ident_rule();
const RuleSchema *pair_assoc_rule();
const RuleSchema *comp_pair_distrib_rule();
const RuleSchema *pair_comm_rule();
const RuleSchema *twist_idem_rule();
const RuleSchema *twist_hexagon_rule();
const RuleSchema *nno_left_rule();
const RuleSchema *nno_right_rule();
const RuleSchema *nno_ident_rule();
const RuleSchema *nno_comp_rule();
const RuleSchema *nno_pair_rule();
} // namespace detail

const std::vector<UniverseName> &all_universes() {
  static const std::vector<UniverseName> v = {
      UniverseName::Desc, UniverseName::C,    UniverseName::I,
      UniverseName::Cat,  UniverseName::CatX, UniverseName::CatN,
      UniverseName::CatXN, UniverseName::Func};
  return v;
}

const char *to_string(UniverseName u) {
  switch (u) {
  case UniverseName::Desc:
    return "Desc";
  case UniverseName::C:
    return "C";
  case UniverseName::I:
    return "I";
  case UniverseName::Cat:
    return "Cat";
  case UniverseName::CatX:
    return "CatX";
  case UniverseName::CatN:
    return "CatN";
  case UniverseName::CatXN:
    return "CatXN";
  case UniverseName::Func:
    return "Func";
  }
  return "?";
}

UniverseName universe_from_string(std::string_view s) {
  for (UniverseName u : all_universes())
    if (s == to_string(u))
      return u;
  throw SpecError("unknown universe '" + std::string(s) + "'");
}

const std::vector<std::pair<UniverseName, UniverseName>> &
universe_cover_edges() {
  using U = UniverseName;
  static const std::vector<std::pair<U, U>> edges = {
      {U::Desc, U::C},     {U::Desc, U::I},    {U::C, U::Cat},
      {U::I, U::Cat},      {U::Cat, U::CatX},  {U::Cat, U::CatN},
      {U::CatX, U::CatXN}, {U::CatN, U::CatXN}, {U::CatXN, U::Func}};
  return edges;
}

bool universe_leq(UniverseName a, UniverseName b) {
  if (a == b)
    return true;
  std::vector<UniverseName> frontier{a};
  std::vector<bool> seen(8, false);
  seen[static_cast<size_t>(a)] = true;
  while (!frontier.empty()) {
    UniverseName cur = frontier.back();
    frontier.pop_back();
    for (const auto &[lo, hi] : universe_cover_edges())
      if (lo == cur && !seen[static_cast<size_t>(hi)]) {
        if (hi == b)
          return true;
        seen[static_cast<size_t>(hi)] = true;
        frontier.push_back(hi);
      }
  }
  return false;
}

const Universe &universe(UniverseName u) {
  namespace d = detail;
  static const Universe desc{UniverseName::Desc, {}};
  static const Universe c{UniverseName::C, {d::assoc_comp_rule()}};
  static const Universe i{UniverseName::I, {d::comp_ident_rule()}};
  static const Universe cat{UniverseName::Cat,
                            {d::assoc_comp_rule(), d::comp_ident_rule()}};
  static const Universe catx{
      UniverseName::CatX,
      {d::assoc_comp_rule(), d::comp_ident_rule(), d::pair_assoc_rule(),
       d::comp_pair_distrib_rule(), d::pair_comm_rule(), d::twist_idem_rule(),
       d::twist_hexagon_rule()}};
  static const Universe catn{
      UniverseName::CatN,
      {d::assoc_comp_rule(), d::comp_ident_rule(), d::nno_left_rule(),
       d::nno_right_rule(), d::nno_ident_rule(), d::nno_comp_rule()}};
  static const Universe catxn{
      UniverseName::CatXN,
      {d::assoc_comp_rule(), d::comp_ident_rule(), d::pair_assoc_rule(),
       d::comp_pair_distrib_rule(), d::pair_comm_rule(), d::twist_idem_rule(),
       d::twist_hexagon_rule(), d::nno_left_rule(), d::nno_right_rule(),
       d::nno_ident_rule(), d::nno_comp_rule(), d::nno_pair_rule()}};
  static const Universe func{UniverseName::Func, {}};
  switch (u) {
  case UniverseName::Desc:
    return desc;
  case UniverseName::C:
    return c;
  case UniverseName::I:
    return i;
  case UniverseName::Cat:
    return cat;
  case UniverseName::CatX:
    return catx;
  case UniverseName::CatN:
    return catn;
  case UniverseName::CatXN:
    return catxn;
  case UniverseName::Func:
    return func;
  }
  throw SpecError("unknown universe");
}

const std::vector<const RuleSchema *> &rules_of(UniverseName u) {
  return universe(u).rules;
}

const RuleSchema *find_rule(std::string_view id) {
  for (const RuleSchema *r : rules_of(UniverseName::CatXN))
    if (id == r->id())
      return r;
  return nullptr;
}

namespace {

// Sorted, deduplicated one-step results of a rule at the root of `sub` in
// one direction. Choice indices refer to positions in this list.
std::vector<Term> local_results(const RuleSchema *r, const Term &sub,
                                bool forward) {
  std::vector<Term> out = forward ? r->forward(sub) : r->backward(sub);
  sort_terms(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Fn>
void walk_preorder(const Term &t, std::vector<int> &path, Fn &&fn) {
  fn(t, path);
  for (int i = 0; i < t.child_count(); ++i) {
    path.push_back(i);
    walk_preorder(t.child(i), path, fn);
    path.pop_back();
  }
}

} // namespace

std::vector<RewriteInstance> rewrite_instances(const Term &t, UniverseName u,
                                               Direction dir) {
  std::vector<RewriteInstance> out;
  const auto &rules = rules_of(u);
  std::vector<int> path;
  walk_preorder(t, path, [&](const Term &sub, const std::vector<int> &p) {
    for (const RuleSchema *r : rules) {
      if (!r->enabled())
        continue;
      if (dir == Direction::Oriented &&
          r->orientation() != Orientation::Directed)
        continue;
      const bool fwd_only = dir == Direction::Oriented;
      for (bool fwd : {true, false}) {
        if (fwd_only && !fwd)
          continue;
        std::vector<Term> results = local_results(r, sub, fwd);
        for (size_t k = 0; k < results.size(); ++k) {
          RewriteInstance inst;
          inst.rule = r;
          inst.step = RewriteStep{r->id(), p, fwd, static_cast<int>(k)};
          inst.result = replace_at(t, p, results[k]);
          out.push_back(std::move(inst));
        }
      }
    }
  });
  return out;
}

Term apply_step(const Term &t, const RewriteStep &step) {
  const RuleSchema *r = find_rule(step.rule);
  if (!r)
    throw Error("unknown rule '" + step.rule + "'");
  Term sub = subterm_at(t, step.path);
  std::vector<Term> results = local_results(r, sub, step.forward);
  if (step.choice < 0 || step.choice >= static_cast<int>(results.size()))
    throw Error("rule '" + step.rule + "' has no choice " +
                std::to_string(step.choice) + " here");
  return replace_at(t, step.path, results[static_cast<size_t>(step.choice)]);
}

NormalizeResult normalize(const Term &t, UniverseName u) {
  if (u != UniverseName::C && u != UniverseName::I && u != UniverseName::Cat)
    throw SpecError(std::string("normalize is exact only for C, I, Cat; got ") +
                    to_string(u));
  NormalizeResult res{t, {}};
  for (int guard = 0; guard < 100000; ++guard) {
    std::vector<RewriteInstance> insts =
        rewrite_instances(res.term, u, Direction::Oriented);
    if (insts.empty())
      return res;
    res.term = insts[0].result;
    res.steps.push_back(insts[0].step);
  }
  throw Error("normalization did not converge");
}

namespace {

struct BestEffortAction {
  int priority = 0;
  RewriteStep step;
  Term result;
};

// One scan for the highest-priority applicable action. Priorities order
// consumers (identity elimination, twist cancellation) above the
// rotations that expose them, and those above the plain re-association
// that would otherwise undo the rotations.
std::optional<BestEffortAction> pick_action(const Term &t) {
  namespace d = detail;
  const RuleSchema *ident = d::comp_ident_rule();
  const RuleSchema *tidem = d::twist_idem_rule();
  const RuleSchema *assoc = d::assoc_comp_rule();
  const RuleSchema *hex = d::twist_hexagon_rule();
  const RuleSchema *passoc = d::pair_assoc_rule();
  const RuleSchema *dist = d::comp_pair_distrib_rule();
  const RuleSchema *pcomm = d::pair_comm_rule();

  std::optional<BestEffortAction> best;
  auto offer = [&](int pr, const RuleSchema *r, bool fwd,
                   const std::vector<int> &p, const Term &whole,
                   const Term &sub) {
    if (best && best->priority <= pr)
      return;
    std::vector<Term> results = local_results(r, sub, fwd);
    if (results.empty())
      return;
    best = BestEffortAction{pr, RewriteStep{r->id(), p, fwd, 0},
                            replace_at(whole, p, results[0])};
  };

  std::vector<int> path;
  walk_preorder(t, path, [&](const Term &sub, const std::vector<int> &p) {
    offer(1, ident, true, p, t, sub);
    offer(2, tidem, true, p, t, sub);
    // Rotate (q o tw') o tw into q o (tw' o tw) when the twists cancel.
    if (sub.kind() == Kind::Comp && sub.child(0).kind() == Kind::Comp) {
      int a = 0, b = 0, xa = 0, xb = 0;
      if (twist_blocks(sub.child(1), a, b) &&
          twist_blocks(sub.child(0).child(1), xa, xb) && xa == b && xb == a)
        offer(3, assoc, false, p, t, sub);
    }
    offer(4, hex, true, p, t, sub);
    offer(5, assoc, true, p, t, sub);
    offer(6, passoc, true, p, t, sub);
    if (sub.kind() == Kind::Comp && sub.child(0).kind() == Kind::Pair) {
      ProjSpec spec;
      if (!multi_proj_spec(sub.child(0), spec))
        offer(7, dist, true, p, t, sub);
    }
    if (sub.kind() == Kind::Pair) {
      ProjSpec spec;
      if (!multi_proj_spec(sub, spec) &&
          print(sub.child(1)) < print(sub.child(0)))
        offer(8, pcomm, true, p, t, sub);
    }
  });
  return best;
}

} // namespace

NormalizeResult normalize_best_effort(const Term &t) {
  NormalizeResult res{t, {}};
  for (int guard = 0; guard < 10000; ++guard) {
    std::optional<BestEffortAction> act = pick_action(res.term);
    if (!act)
      return res;
    res.term = act->result;
    res.steps.push_back(act->step);
  }
  return res; // cap hit: still sound, just not fully simplified
}

bool ClosureResult::contains(const Term &t) const {
  return t == root || parents.count(t) > 0;
}

std::vector<RewriteStep> ClosureResult::path_to(const Term &target) const {
  if (target == root)
    return {};
  std::vector<RewriteStep> steps;
  Term cur = target;
  while (!(cur == root)) {
    auto it = parents.find(cur);
    if (it == parents.end())
      throw Error("term not reached by this closure");
    steps.push_back(it->second.second);
    cur = it->second.first;
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

ClosureResult closure(const Term &root, UniverseName u,
                      const ClosureCaps &caps) {
  ClosureResult res{root};
  res.terms.push_back(root);
  std::deque<Term> queue{root};
  bool stopped = false;
  while (!queue.empty() && !stopped) {
    Term t = queue.front();
    queue.pop_front();
    for (RewriteInstance &inst : rewrite_instances(t, u, Direction::Both)) {
      if (inst.result.size() > caps.size_cap) {
        res.size_pruned = true;
        continue;
      }
      if (res.contains(inst.result))
        continue;
      if (static_cast<int>(res.terms.size()) >= caps.count_cap) {
        stopped = true;
        break;
      }
      res.parents.emplace(inst.result, std::make_pair(t, inst.step));
      res.terms.push_back(inst.result);
      queue.push_back(inst.result);
    }
  }
  res.complete = !stopped;
  return res;
}

namespace {

EquivVerdict equal_verdict(std::vector<WitnessStep> witness,
                           std::string reason, bool approximate = false) {
  return {EquivVerdict::Kind::Equal, std::move(witness), std::move(reason),
          approximate};
}

EquivVerdict not_equal(std::string reason, bool approximate = false) {
  return {EquivVerdict::Kind::NotEqual, {}, std::move(reason), approximate};
}

void append_side(std::vector<WitnessStep> &w,
                 const std::vector<RewriteStep> &steps, bool from_b) {
  for (const RewriteStep &s : steps)
    w.push_back({s, from_b});
}

// First grid cell where both tables are computed and disagree; justifies
// NotEqual in every universe at or below Func.
std::optional<size_t> differing_cell(const Fingerprint &fa,
                                     const Fingerprint &fb) {
  for (size_t i = 0; i < fa.table.size(); ++i)
    if (fa.table[i] && fb.table[i] && !(*fa.table[i] == *fb.table[i]))
      return i;
  return std::nullopt;
}

} // namespace

EquivVerdict equiv(const Term &a, const Term &b, UniverseName u,
                   const ClosureCaps &caps, int grid, const Budget &budget) {
  if (a.arity() != b.arity())
    return not_equal("arity mismatch: " + to_string(a.arity()) + " vs " +
                     to_string(b.arity()));
  if (a == b)
    return equal_verdict({}, "identical descriptions");

  switch (u) {
  case UniverseName::Desc:
    return not_equal("structurally distinct descriptions");

  case UniverseName::C:
  case UniverseName::I:
  case UniverseName::Cat: {
    NormalizeResult na = normalize(a, u);
    NormalizeResult nb = normalize(b, u);
    if (na.term == nb.term) {
      std::vector<WitnessStep> w;
      append_side(w, na.steps, false);
      append_side(w, nb.steps, true);
      return equal_verdict(std::move(w), "same canonical form");
    }
    return not_equal("canonical forms differ");
  }

  case UniverseName::CatX:
  case UniverseName::CatN:
  case UniverseName::CatXN: {
    // Simplify both sides soundly first. For CatN only the Cat fragment
    // of the simplifier is valid.
    NormalizeResult na, nb;
    if (u == UniverseName::CatN) {
      na = normalize(a, UniverseName::Cat);
      nb = normalize(b, UniverseName::Cat);
    } else {
      na = normalize_best_effort(a);
      nb = normalize_best_effort(b);
    }
    std::vector<WitnessStep> w;
    append_side(w, na.steps, false);
    append_side(w, nb.steps, true);
    if (na.term == nb.term)
      return equal_verdict(std::move(w), "same simplified form");

    ClosureResult cla = closure(na.term, u, caps);
    if (cla.contains(nb.term)) {
      append_side(w, cla.path_to(nb.term), false);
      return equal_verdict(std::move(w), "joined by rewriting");
    }
    ClosureResult clb = closure(nb.term, u, caps);
    if (clb.contains(na.term)) {
      append_side(w, clb.path_to(na.term), true);
      return equal_verdict(std::move(w), "joined by rewriting");
    }
    // Every CatX rule enumerates exact inverses, so a complete, unpruned
    // reachability set is the whole equivalence class. The recursion
    // universes have a one-way rule; no such refutation there.
    if (u == UniverseName::CatX && cla.complete && !cla.size_pruned)
      return not_equal("equivalence class exhausted without meeting");
    Fingerprint fa = fingerprint(a, grid, budget);
    Fingerprint fb = fingerprint(b, grid, budget);
    if (auto cell = differing_cell(fa, fb))
      return not_equal("outputs differ at grid cell " +
                       std::to_string(*cell));
    return {EquivVerdict::Kind::Unknown,
            {},
            "rewriting exhausted under caps; outputs agree where computed",
            false};
  }

  case UniverseName::Func: {
    Fingerprint fa = fingerprint(a, grid, budget);
    Fingerprint fb = fingerprint(b, grid, budget);
    if (auto cell = differing_cell(fa, fb))
      return not_equal("outputs differ at grid cell " + std::to_string(*cell));
    if (!fa.partial && !fb.partial && fa == fb)
      return equal_verdict(
          {}, "outputs agree on the full grid (finite sample)", true);
    return {EquivVerdict::Kind::Unknown,
            {},
            "some cells exceeded the budget; computed cells agree",
            false};
  }
  }
  throw SpecError("unknown universe");
}

bool witness_valid(const Term &a, const Term &b,
                   const std::vector<WitnessStep> &witness) {
  try {
    Term ta = a, tb = b;
    for (const WitnessStep &ws : witness) {
      if (ws.from_b)
        tb = apply_step(tb, ws.step);
      else
        ta = apply_step(ta, ws.step);
    }
    return ta == tb;
  } catch (const Error &) {
    return false;
  }
}

bool SoundnessReport::all_passed() const {
  for (const PerRule &r : rules)
    if (!r.skipped && (r.failed > 0 || r.passed < r.requested))
      return false;
  return true;
}

SoundnessReport check_rule_soundness(UniverseName u, int per_schema, int grid,
                                     const Budget &budget, uint64_t seed,
                                     const InstanceBounds &bounds) {
  SoundnessReport report;
  TermGen gen(seed);
  for (const RuleSchema *r : rules_of(u)) {
    SoundnessReport::PerRule pr;
    pr.rule = r->id();
    pr.requested = per_schema;
    if (!r->enabled()) {
      pr.skipped = true;
      report.rules.push_back(std::move(pr));
      continue;
    }
    for (int k = 0; k < per_schema; ++k) {
      bool concluded = false;
      for (int attempt = 0; attempt < 4 && !concluded; ++attempt) {
        auto inst = r->instances(gen, 1, bounds);
        if (inst.empty())
          break;
        const auto &[lhs, rhs] = inst[0];
        if (lhs.arity() != rhs.arity()) {
          ++pr.failed;
          pr.failures.push_back("arity mismatch: " + print(lhs) + " vs " +
                                print(rhs));
          concluded = true;
          break;
        }
        Fingerprint fa = fingerprint(lhs, grid, budget);
        Fingerprint fb = fingerprint(rhs, grid, budget);
        if (fa.partial || fb.partial)
          continue; // redraw
        concluded = true;
        if (fa == fb) {
          ++pr.passed;
        } else {
          ++pr.failed;
          if (pr.failures.size() < 5)
            pr.failures.push_back(print(lhs) + "  !=  " + print(rhs));
        }
      }
      if (!concluded)
        ++pr.inconclusive;
    }
    report.rules.push_back(std::move(pr));
  }
  return report;
}

nlohmann::json step_json(const RewriteStep &s, bool from_b) {
  return {{"rule", s.rule},
          {"path", s.path},
          {"dir", s.forward ? "fwd" : "bwd"},
          {"choice", s.choice},
          {"side", from_b ? "b" : "a"}};
}

nlohmann::json verdict_json(const EquivVerdict &v, UniverseName u,
                            const ClosureCaps &caps) {
  const char *kind = v.kind == EquivVerdict::Kind::Equal      ? "equal"
                     : v.kind == EquivVerdict::Kind::NotEqual ? "notequal"
                                                              : "unknown";
  nlohmann::json witness = nlohmann::json::array();
  for (const WitnessStep &ws : v.witness)
    witness.push_back(step_json(ws.step, ws.from_b));
  return {{"verdict", kind},
          {"witness", std::move(witness)},
          {"universe", to_string(u)},
          {"caps", {{"size_cap", caps.size_cap}, {"count_cap", caps.count_cap}}},
          {"reason", v.reason},
          {"approximate", v.approximate}};
}

} // namespace pru
