// End-to-end acceptance gate: seven properties, one [PASS]/[FAIL] line
// each, exit code = number of failures. Substance failures are never
// downgraded; runtime overruns are reported on the line but do not fail.
#include "pru/galois.hpp"
#include "pru/parse.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace pru;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

void note_capped(Outcome &out, std::string msg, int cap = 6) {
  if (static_cast<int>(out.notes.size()) < cap)
    out.notes.push_back(std::move(msg));
  else if (static_cast<int>(out.notes.size()) == cap)
    out.notes.push_back("... further notes suppressed");
}

// 1. Every enabled rewrite schema of every universe is semantics
// preserving on randomly drawn instances.
Outcome rule_soundness() {
  Outcome out;
  int instances = 0, listings = 0;
  for (UniverseName u : all_universes()) {
    SoundnessReport r = check_rule_soundness(u, 100, 4, {}, 2026);
    for (const auto &pr : r.rules) {
      if (pr.skipped)
        continue;
      ++listings;
      instances += pr.passed;
      if (pr.failed > 0 || pr.passed != pr.requested) {
        out.pass = false;
        std::string msg = std::string(to_string(u)) + "/" + pr.rule + ": " +
                          std::to_string(pr.passed) + "/" +
                          std::to_string(pr.requested) + " passed, " +
                          std::to_string(pr.failed) + " failed, " +
                          std::to_string(pr.inconclusive) + " inconclusive";
        if (!pr.failures.empty())
          msg += "; e.g. " + pr.failures.front();
        note_capped(out, std::move(msg));
      }
    }
  }
  out.detail = std::to_string(instances) + " instances across " +
               std::to_string(listings) +
               " enabled schema listings, equal value tables on grid 4";
  return out;
}

// 2. Three textbook descriptions of the null function: pairwise distinct
// as programs, equal as functions.
Outcome null_corpus() {
  Outcome out;
  Term n1 = Term::z();
  std::vector<Term> chain = {Term::z(), Term::s(), Term::s(), Term::s(),
                             Term::s(), Term::z(), Term::s(), Term::s(),
                             Term::s(), Term::s(), Term::s(), Term::s(),
                             Term::s(), Term::s(), Term::s()};
  Term n2 = chain.back();
  for (size_t k = chain.size() - 1; k-- > 0;)
    n2 = Term::comp(chain[k], n2);
  Term n3 = Term::comp(
      Term::z(), Term::comp(Term::proj(2, 1), Term::pair(Term::s(), Term::s())));
  if (n2.size() != 29) {
    out.pass = false;
    note_capped(out, "15-leaf chain has wrong shape: " + print(n2));
  }
  std::vector<Term> descs = {n1, n2, n3};
  for (size_t i = 0; i < descs.size(); ++i)
    for (size_t j = i + 1; j < descs.size(); ++j) {
      EquivVerdict d = equiv(descs[i], descs[j], UniverseName::Desc);
      if (d.kind != EquivVerdict::Kind::NotEqual) {
        out.pass = false;
        note_capped(out, "not structurally distinct: " + print(descs[i]) +
                             " vs " + print(descs[j]));
      }
      EquivVerdict fn = equiv(descs[i], descs[j], UniverseName::Func);
      if (fn.kind != EquivVerdict::Kind::Equal || !fn.approximate) {
        out.pass = false;
        note_capped(out, "not extensionally equal: " + print(descs[i]) +
                             " vs " + print(descs[j]));
      }
    }
  out.detail =
      "3 descriptions, 3 pairs: distinct programs, one function";
  return out;
}

// 3. On the recursion-free fragment the normalization decider and raw
// closure membership give the same answer on every pair of terms.
Outcome decider_vs_closure() {
  Outcome out;
  FragmentParams p;
  p.max_size = 6;
  p.allow_rec = false;
  Fragment f = enumerate_fragment(p);
  if (f.total_terms != 272) {
    out.pass = false;
    out.detail = "fragment has " + std::to_string(f.total_terms) +
                 " terms, expected 272";
    return out;
  }
  // Size cap 7 keeps every closure finite and exhaustible while still
  // covering every connecting valley: normalization never grows a term,
  // so two equal size-5 terms meet through intermediates of size <= 5.
  ClosureCaps caps{7, 5000};
  long pairs = 0, equal_pairs = 0, disagreements = 0;
  for (UniverseName u :
       {UniverseName::C, UniverseName::I, UniverseName::Cat}) {
    std::vector<ClosureResult> cls;
    cls.reserve(static_cast<size_t>(f.total_terms));
    bool complete = true;
    for (const auto &hs : f.homsets)
      for (const Term &t : hs) {
        cls.push_back(closure(t, u, caps));
        if (!cls.back().complete) {
          complete = false;
          note_capped(out, std::string("incomplete closure under ") +
                               to_string(u) + " from " + print(t));
        }
      }
    if (!complete) {
      out.pass = false;
      continue;
    }
    for (int ga = 0; ga < f.total_terms; ++ga)
      for (int gb = ga + 1; gb < f.total_terms; ++gb) {
        auto [ha, ia] = f.from_global(ga);
        auto [hb, ib] = f.from_global(gb);
        const Term &ta = f.homsets[static_cast<size_t>(ha)][static_cast<size_t>(ia)];
        const Term &tb = f.homsets[static_cast<size_t>(hb)][static_cast<size_t>(ib)];
        bool member = ha == hb && cls[static_cast<size_t>(ga)].contains(tb);
        bool member_back = ha == hb && cls[static_cast<size_t>(gb)].contains(ta);
        if (member != member_back) {
          out.pass = false;
          ++disagreements;
          note_capped(out, std::string("asymmetric membership under ") +
                               to_string(u) + ": " + print(ta) + " / " +
                               print(tb));
        }
        EquivVerdict v = equiv(ta, tb, u, caps);
        if (v.kind == EquivVerdict::Kind::Unknown) {
          out.pass = false;
          ++disagreements;
          note_capped(out, std::string("decider returned unknown under ") +
                               to_string(u) + ": " + print(ta) + " / " +
                               print(tb));
          continue;
        }
        bool eq = v.kind == EquivVerdict::Kind::Equal;
        if (eq != member) {
          out.pass = false;
          ++disagreements;
          note_capped(out, std::string("disagreement under ") + to_string(u) +
                               ": " + print(ta) + " / " + print(tb) +
                               " decider=" + (eq ? "equal" : "notequal") +
                               " closure=" + (member ? "joined" : "separate"));
        }
        if (eq) {
          ++equal_pairs;
          if (!witness_valid(ta, tb, v.witness)) {
            out.pass = false;
            note_capped(out, std::string("witness replay failed under ") +
                                 to_string(u) + ": " + print(ta) + " / " +
                                 print(tb));
          }
        }
        ++pairs;
      }
  }
  out.detail = std::to_string(pairs) + " pairs across C/I/Cat, " +
               std::to_string(equal_pairs) + " equal with replayed witnesses, " +
               std::to_string(disagreements) + " disagreements";
  return out;
}

// 4. The computed partitions respect every cover edge of the universe
// order; strictness is witnessed where the fragment can exhibit it and
// reported honestly where it cannot.
Outcome lattice_edges() {
  Outcome out;
  Fragment f = enumerate_fragment();
  GaloisOptions o;
  o.seed = 2026;
  json lat = lattice_report(f, o);
  std::set<std::string> trunc;
  for (const auto &t : lat["truncated"])
    trunc.insert(t.get<std::string>());
  auto required_strict = [](const std::string &a, const std::string &b) {
    // Merges exhibiting strictness of these edges fit inside the default
    // fragment; the remaining edges need wider terms than it contains.
    static const std::vector<std::pair<const char *, const char *>> req = {
        {"Desc", "C"},    {"Desc", "I"},     {"C", "Cat"},   {"I", "Cat"},
        {"Cat", "CatN"},  {"CatX", "CatXN"}, {"CatXN", "Func"}};
    for (const auto &[x, y] : req)
      if (a == x && b == y)
        return true;
    return false;
  };
  int strict_n = 0, collapsed_n = 0, edges_n = 0;
  for (const auto &e : lat["edges"]) {
    ++edges_n;
    std::string a = e["from"], b = e["to"];
    bool truncated = trunc.count(a) != 0 || trunc.count(b) != 0;
    if (e["refines"] != true) {
      if (truncated) {
        note_capped(out, "refinement unverified on " + a + "<=" + b +
                             " (truncated closure)");
      } else {
        out.pass = false;
        note_capped(out, "refinement failed on " + a + "<=" + b);
      }
    }
    if (e["strict"] == true) {
      ++strict_n;
      if (!e["witness"].is_object() || e["witness"]["terms"].size() != 2) {
        out.pass = false;
        note_capped(out, "strict edge " + a + "<" + b + " lacks a witness");
      }
    } else {
      ++collapsed_n;
      if (required_strict(a, b) && !truncated) {
        out.pass = false;
        note_capped(out, "edge " + a + "<" + b +
                             " collapsed despite an in-fragment witness");
      } else {
        note_capped(out, "collapsed at this fragment size: " + a + " = " + b,
                    12);
      }
    }
  }
  if (edges_n != static_cast<int>(universe_cover_edges().size())) {
    out.pass = false;
    note_capped(out, "expected " +
                         std::to_string(universe_cover_edges().size()) +
                         " cover edges, report has " + std::to_string(edges_n));
  }
  out.detail = std::to_string(edges_n) + " cover edges: " +
               std::to_string(strict_n) + " strict with witnesses, " +
               std::to_string(collapsed_n) + " collapsed (reported)";
  if (!trunc.empty()) {
    std::string ts = "truncated closures:";
    for (const std::string &t : trunc)
      ts += " " + t;
    note_capped(out, ts, 12);
  }
  return out;
}

// 5. Orbit/stabilizer roundtrips and antitone monotonicity on the default
// fragment, with sampled generated subgroups.
Outcome galois_roundtrips() {
  Outcome out;
  Fragment f = enumerate_fragment();
  GaloisOptions o;
  o.subgroup_samples = 20;
  o.partition_samples = 10;
  o.seed = 2026;
  o.rigidity = false; // covered by its own criterion
  GaloisReport rep = galois_check(f, o);
  std::set<std::string> names;
  int passed = 0;
  for (const GaloisCheck &c : rep.checks) {
    names.insert(c.name);
    if (c.pass) {
      ++passed;
    } else {
      out.pass = false;
      note_capped(out, c.name + (c.detail.empty() ? "" : ": " + c.detail));
    }
  }
  std::vector<std::string> required = {"subgroup-containment", "orbit-antitone",
                                       "full-stab-equality"};
  for (UniverseName u : all_universes()) {
    required.push_back(std::string("roundtrip-partition:") + to_string(u));
    required.push_back(std::string("refines-semantic:") + to_string(u));
  }
  for (const std::string &r : required)
    if (!names.count(r)) {
      out.pass = false;
      note_capped(out, "missing check " + r);
    }
  for (const std::string &d : rep.defects)
    note_capped(out, "defect (reported, not failed): " + d, 12);
  out.detail = std::to_string(passed) + "/" + std::to_string(rep.checks.size()) +
               " checks passed; 20 sampled subgroups, 10 sampled partitions";
  return out;
}

// 6. Fixing the initial descriptions and demanding compatibility with
// composition, recursion and bracketing leaves only the identity.
Outcome rigidity_trivial() {
  Outcome out;
  Fragment f = enumerate_fragment();
  Partition one;
  one.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h)
    one.block_of[h].assign(f.homsets[h].size(), 0);
  PermGroupFamily full = full_stabilizer(f, one);
  std::vector<std::vector<Perm>> correlated;
  PermGroupFamily fixed =
      op_preserving_subgroup(full, f, OpSet{}, true, &correlated);
  out.pass = fixed.order() == 1 && correlated.empty();
  out.detail = "preserved subgroup order " + fixed.order().str() +
               " inside a symmetric product of order with " +
               std::to_string(full.order().str().size()) + " digits";
  if (!correlated.empty())
    note_capped(out, std::to_string(correlated.size()) +
                         " correlated families escaped the product");
  return out;
}

// 7. Recursion satisfies both of its defining squares pointwise: the
// composite against a frozen counter equals the base, and against a
// stepped counter equals the step fed the previous stage.
Outcome recursion_squares() {
  Outcome out;
  FragmentParams p;
  p.max_size = 3;
  p.max_width = 4;
  Fragment f = enumerate_fragment(p);
  Budget budget;
  const int grid = 4;
  long fg_pairs = 0, point_checks = 0;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      int hf = f.homset_index({a, b});
      int hg = f.homset_index({a + b, b});
      if (hf < 0 || hg < 0) {
        out.pass = false;
        note_capped(out, "missing hom-set for a=" + std::to_string(a) +
                             " b=" + std::to_string(b));
        continue;
      }
      std::vector<int> front(static_cast<size_t>(a));
      std::iota(front.begin(), front.end(), 1);
      for (const Term &ft : f.homsets[static_cast<size_t>(hf)])
        for (const Term &gt : f.homsets[static_cast<size_t>(hg)]) {
          Term h = Term::rec(ft, gt);
          Term lhs1 = Term::comp(h, product(identity(a), Term::z()));
          Term rhs1 = Term::comp(ft, multi_proj(a + 1, front));
          Term lhs2 = Term::comp(h, product(identity(a), Term::s()));
          Term rhs2 =
              Term::comp(gt, Term::pair(multi_proj(a + 1, front), h));
          ++fg_pairs;
          std::vector<Nat> in(static_cast<size_t>(a) + 1, 0);
          for (;;) {
            if (eval(lhs1, in, budget) != eval(rhs1, in, budget)) {
              out.pass = false;
              note_capped(out, "base square broken: f=" + print(ft) +
                                   " g=" + print(gt));
            }
            if (eval(lhs2, in, budget) != eval(rhs2, in, budget)) {
              out.pass = false;
              note_capped(out, "step square broken: f=" + print(ft) +
                                   " g=" + print(gt));
            }
            point_checks += 2;
            size_t k = in.size();
            while (k > 0 && in[k - 1] == grid - 1)
              in[--k] = 0;
            if (k == 0)
              break;
            ++in[k - 1];
          }
        }
    }
  out.detail = std::to_string(fg_pairs) + " (base, step) pairs, " +
               std::to_string(point_checks) +
               " pointwise comparisons on {0..3}, exact";
  return out;
}

struct Criterion {
  const char *name;
  double target_s;
  std::function<Outcome()> fn;
};

} // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"rewrite schemas preserve the computed function", 120, rule_soundness},
      {"null-function corpus separates programs from functions", 1,
       null_corpus},
      {"equality decider agrees with closure membership", 300,
       decider_vs_closure},
      {"universe partitions respect every cover edge", 600, lattice_edges},
      {"stabilizer/orbit roundtrips and monotonicity", 300, galois_roundtrips},
      {"pinning initials leaves no symmetry", 60, rigidity_trivial},
      {"recursion satisfies both defining squares", 120, recursion_squares},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].fn();
    } catch (const std::exception &e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %zu. %s: %s (%.1fs%s)\n", out.pass ? "PASS" : "FAIL",
                k + 1, criteria[k].name, out.detail.c_str(), secs,
                secs > criteria[k].target_s ? ", over target" : "");
    for (const std::string &n : out.notes)
      std::printf("       - %s\n", n.c_str());
    std::fflush(stdout);
    if (!out.pass)
      ++failed;
  }
  if (failed)
    std::printf("%d of 7 criteria failed\n", failed);
  else
    std::printf("all 7 criteria passed\n");
  return failed;
}
