#pragma once

#include "pru/gen.hpp"
#include "pru/semantics.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace pru {

// The lattice of universes, from finest (raw descriptions) to coarsest
// (extensional functions). Each inner universe is presented by a set of
// rewrite schemas; Desc and Func are the two ends.
enum class UniverseName { Desc, C, I, Cat, CatX, CatN, CatXN, Func };

const std::vector<UniverseName> &all_universes();
const char *to_string(UniverseName u);
UniverseName universe_from_string(std::string_view s);

// Nominal "coarsens at most" order: reflexive-transitive hull of the cover
// edges below. a <= b means every identification made by a is also made
// by b.
bool universe_leq(UniverseName a, UniverseName b);
const std::vector<std::pair<UniverseName, UniverseName>> &
universe_cover_edges();

enum class Orientation { Directed, Bidirectional };

// Size/width limits for randomly generated rule instances.
struct InstanceBounds {
  int max_term_size = 5; // each metavariable's term
  int max_width = 3;
};

// One equational schema. forward()/backward() return the results of
// applying the schema once at the ROOT of the given term (empty when the
// shape does not match); they are exact inverses except where noted.
// instances() draws random (lhs, rhs) pairs for semantic soundness tests.
class RuleSchema {
public:
  virtual ~RuleSchema() = default;
  virtual const char *id() const = 0;
  virtual Orientation orientation() const = 0;
  // Disabled schemas are listed in their universe but never fire; they
  // exist for laws whose defining operators are not available.
  virtual bool enabled() const { return true; }
  virtual std::vector<Term> forward(const Term &t) const = 0;
  virtual std::vector<Term> backward(const Term &t) const = 0;
  virtual std::vector<std::pair<Term, Term>>
  instances(TermGen &gen, int count, const InstanceBounds &bounds) const = 0;
};

struct Universe {
  UniverseName name;
  std::vector<const RuleSchema *> rules; // enabled and disabled alike
};

const Universe &universe(UniverseName u);
const std::vector<const RuleSchema *> &rules_of(UniverseName u);
const RuleSchema *find_rule(std::string_view id); // nullptr if unknown

// A replayable single rewrite: rule, node path, direction, and the index
// of the chosen result within that direction's sorted, deduplicated
// result list.
struct RewriteStep {
  std::string rule;
  std::vector<int> path;
  bool forward = true;
  int choice = 0;

  friend bool operator==(const RewriteStep &, const RewriteStep &) = default;
};

struct RewriteInstance {
  const RuleSchema *rule = nullptr;
  RewriteStep step;
  Term result; // full term after the step
};

enum class Direction {
  Oriented, // directed rules only, reduction direction
  Both      // forward and backward of every enabled rule
};

// All single-step rewrites of t under the universe's enabled rules, at
// every node (pre-order), rules in universe order, forward before
// backward, choices in sorted result order.
std::vector<RewriteInstance> rewrite_instances(const Term &t,
                                               UniverseName u,
                                               Direction dir);

// Replays a recorded step; the result is identical to the instance that
// produced it. Throws Error on a step that does not apply.
Term apply_step(const Term &t, const RewriteStep &step);

struct NormalizeResult {
  Term term;
  std::vector<RewriteStep> steps; // t --steps--> term
};

// Exact normalization for the decidable universes C, I, Cat: leftmost-
// outermost directed rewriting to the unique fixpoint. Throws SpecError
// for other universes.
NormalizeResult normalize(const Term &t, UniverseName u);

// Sound, terminating, best-effort simplification under the CatX schema
// set (valid in CatX and CatXN): identity elimination, twist
// cancellation (with association rotations to expose it), hexagon,
// re-association, pair re-association, distribution, and an ordering
// swap for pairs. Every step is recorded and replayable. No completeness
// claim.
NormalizeResult normalize_best_effort(const Term &t);

struct ClosureCaps {
  int size_cap = 11;     // discard rewrite results larger than this
  int count_cap = 2000;  // stop exploring after this many terms
};

// Reachability set of root under single steps (Direction::Both),
// breadth-first. `complete` means the frontier was exhausted before
// count_cap; `size_pruned` means some result was discarded for size.
struct ClosureResult {
  Term root;
  std::vector<Term> terms; // discovery order, root first
  bool complete = false;
  bool size_pruned = false;
  std::unordered_map<Term, std::pair<Term, RewriteStep>, TermHash> parents;

  bool contains(const Term &t) const;
  // Steps transforming root into target (must be contained).
  std::vector<RewriteStep> path_to(const Term &target) const;
};

ClosureResult closure(const Term &root, UniverseName u,
                      const ClosureCaps &caps = {});

// One end of an equality witness: a step applied on the a-side (from the
// left term) or the b-side (from the right term). Replaying all a-side
// steps from a and all b-side steps from b must meet in the same term.
struct WitnessStep {
  RewriteStep step;
  bool from_b = false;
};

struct EquivVerdict {
  enum class Kind { Equal, NotEqual, Unknown } kind;
  std::vector<WitnessStep> witness; // non-empty only for derived Equal
  std::string reason;
  bool approximate = false; // verdict rests on finite sampling
};

// Decides a ~ b in the given universe. Desc, C, I, Cat are exact; CatX,
// CatN, CatXN try normalization and bounded closure, falling back to
// fingerprint refutation or Unknown; Func compares fingerprints only.
EquivVerdict equiv(const Term &a, const Term &b, UniverseName u,
                   const ClosureCaps &caps = {}, int grid = 4,
                   const Budget &budget = {});

// Replays a witness from both ends; true iff the sides meet.
bool witness_valid(const Term &a, const Term &b,
                   const std::vector<WitnessStep> &witness);

struct SoundnessReport {
  struct PerRule {
    std::string rule;
    bool skipped = false; // disabled schema
    int requested = 0;
    int passed = 0;
    int failed = 0;
    int inconclusive = 0; // fingerprint incomparable under budget
    std::vector<std::string> failures; // printed (lhs, rhs) pairs
  };
  std::vector<PerRule> rules;

  bool all_passed() const;
};

// Draws `per_schema` random instances of every enabled schema of u and
// checks lhs/rhs fingerprints agree on the grid. Budget-failed draws are
// retried a few times, then counted inconclusive.
SoundnessReport check_rule_soundness(UniverseName u, int per_schema,
                                     int grid = 4, const Budget &budget = {},
                                     uint64_t seed = 0,
                                     const InstanceBounds &bounds = {});

nlohmann::json step_json(const RewriteStep &s, bool from_b);
nlohmann::json verdict_json(const EquivVerdict &v, UniverseName u,
                            const ClosureCaps &caps);

} // namespace pru
