#pragma once

#include "pru/perm.hpp"
#include "pru/universes.hpp"

#include <map>
#include <nlohmann/json_fwd.hpp>

namespace pru {

// A finite fragment: every well-typed term of size at most max_size all of
// whose subterm arities stay within max_width, grouped into hom-sets by
// arity. Fragments are closed under subterms, which several exactness
// arguments rely on.
struct FragmentParams {
  int max_size = 5;
  int max_width = 2;
  bool allow_rec = true;
  int grid = 4;          // default fingerprint grid for this fragment
  int homset_cap = 20000; // CapacityError beyond this many terms per hom-set

  friend bool operator==(const FragmentParams &,
                         const FragmentParams &) = default;
};

struct Fragment {
  FragmentParams params;
  std::vector<Arity> homset_arities;      // sorted by (dom, cod)
  std::vector<std::vector<Term>> homsets; // aligned; each sorted (size, print)
  int total_terms = 0;

  int homset_index(Arity a) const; // -1 if absent
  // (homset index, index within homset), or nothing if t is not in the
  // fragment.
  std::optional<std::pair<int, int>> find(const Term &t) const;
  int global_index(int h, int i) const;
  std::pair<int, int> from_global(int g) const;

  std::unordered_map<Term, std::pair<int, int>, TermHash> locate;
  std::vector<int> offsets;
};

Fragment enumerate_fragment(const FragmentParams &p = {});

// A partition of every hom-set. Block ids are hom-set-local, dense from 0
// in order of first occurrence.
struct Partition {
  std::vector<std::vector<int>> block_of; // per homset: term index -> block

  std::vector<std::vector<std::vector<int>>> blocks() const;
  bool same(int h, int i, int j) const {
    return block_of[static_cast<size_t>(h)][static_cast<size_t>(i)] ==
           block_of[static_cast<size_t>(h)][static_cast<size_t>(j)];
  }
  // Every block of `fine` lies inside one block of `coarse`.
  static bool refines(const Partition &fine, const Partition &coarse);

  friend bool operator==(const Partition &, const Partition &) = default;
};

// Groups terms by their full fingerprint on the fragment's grid. Partial
// fingerprints key by their partial table, so they only group with
// identical failures.
Partition semantic_partition(const Fragment &f, const Budget &budget = {});

struct UniversePartitionResult {
  Partition partition;
  bool truncated = false;        // some closure hit the count cap
  bool refines_semantic = false; // partition refines the fingerprint one
};

// Connected components of the fragment under the universe's rewrite
// relation, explored through bounded closures (intermediate terms may
// leave the fragment). Desc is discrete; Func is the semantic partition.
UniversePartitionResult universe_partition(const Fragment &f, UniverseName u,
                                           const ClosureCaps &caps = {},
                                           const Budget &budget = {});

// One permutation group per hom-set; the whole object represents their
// direct product acting on the fragment.
struct PermGroupFamily {
  std::vector<PermGroup> groups;

  BigInt order() const;
  bool subgroup_of(const PermGroupFamily &other) const;
};

// All permutations preserving every block of p, as explicit stabilizer
// chains (exact orders, fast membership).
PermGroupFamily full_stabilizer(const Fragment &f, const Partition &p);

// Orbits of g acting on each hom-set.
Partition orbit_partition(const PermGroupFamily &g, const Fragment &f);

struct OpSet {
  bool comp = true;
  bool rec = true;
  bool pair = true;
};

// The subgroup of g whose elements commute with the term-forming
// operations wherever they stay inside the fragment (and fix the size-1
// descriptions when fix_initials is set). Found by testing g's
// generators one hom-set at a time and attempting constraint-propagation
// repairs of the failures; the result is generated by verified
// preservers, so it never overshoots. Repaired preservers that need
// correlated motion across hom-sets cannot live in a direct product; they
// are reported through correlated_out instead of being folded in.
PermGroupFamily
op_preserving_subgroup(const PermGroupFamily &g, const Fragment &f,
                       const OpSet &ops, bool fix_initials,
                       std::vector<std::vector<Perm>> *correlated_out = nullptr);

struct GaloisOptions {
  ClosureCaps caps;
  Budget budget;
  int grid = 0; // 0: use the fragment's grid
  int subgroup_samples = 20;
  int partition_samples = 10;
  uint64_t seed = 0;
  std::vector<UniverseName> universes; // empty: all
  bool rigidity = true;
};

struct GaloisCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct GaloisReport {
  FragmentParams params;
  std::vector<std::pair<Arity, int>> homset_sizes;
  Partition semantic;
  std::map<UniverseName, UniversePartitionResult> partitions;
  std::map<UniverseName, BigInt> stabilizer_orders;
  std::vector<GaloisCheck> checks;
  std::vector<std::string> defects; // truncations, budget failures

  bool hard_fail() const;
};

// Verifies the finite correspondence between partitions of the fragment
// and permutation groups on it: universe partitions refine the semantic
// one, stabilizer/orbit roundtrips restore partitions, both maps are
// order-reversing, sampled generated subgroups land inside the stabilizer
// of their own orbit partition, and (optionally) the operation-preserving
// subgroup of the full symmetric product is trivial.
GaloisReport galois_check(const Fragment &f, const GaloisOptions &opts = {});

nlohmann::json galois_json(const Fragment &f, const GaloisReport &r);

// Universes grouped by equal partitions, refinement edges with
// strictness witnesses, stabilizer orders, and a C/I incomparability
// witness pair.
nlohmann::json lattice_report(const Fragment &f, const GaloisOptions &opts = {});

} // namespace pru
