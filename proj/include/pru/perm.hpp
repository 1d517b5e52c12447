#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <unordered_map>
#include <vector>

namespace pru {

using BigInt = boost::multiprecision::cpp_int;

// A permutation of {0..n-1} as its image vector: p[i] is where i goes.
using Perm = std::vector<int>;

Perm perm_identity(int n);
bool perm_is_identity(const Perm &p);
// Apply a first, then b: result[i] = b[a[i]].
Perm perm_compose(const Perm &a, const Perm &b);
Perm perm_inverse(const Perm &p);
bool perm_valid(const Perm &p); // a bijection on {0..n-1}

// Permutation group with a base-and-strong-generating-set chain, built
// either incrementally (Schreier-Sims on given generators) or explicitly
// for block stabilizers. Membership tests sift through the chain; the
// order is the exact product of transversal sizes.
class PermGroup {
public:
  explicit PermGroup(int degree = 0) : degree_(degree) {}
  PermGroup(int degree, const std::vector<Perm> &generators);

  // The full stabilizer of a partition: all permutations preserving every
  // block. Blocks must be disjoint; points left out are fixed. The chain
  // is written down directly (bases walk each block, transversals are
  // transpositions), no closure computation involved.
  static PermGroup block_stabilizer(int degree,
                                    const std::vector<std::vector<int>> &blocks);

  int degree() const { return degree_; }
  // Defining generators as supplied (or, for block stabilizers, adjacent
  // transpositions within each block).
  const std::vector<Perm> &generators() const { return gens_; }

  bool contains(const Perm &p) const;
  BigInt order() const;
  bool is_trivial() const { return order() == 1; }

  // Extends the group by p (no-op if already a member).
  void add_generator(const Perm &p);

private:
  struct Level {
    int base = 0;
    std::vector<Perm> gens; // generators fixing all earlier bases
    std::unordered_map<int, Perm> transversal; // orbit point -> coset rep
  };

  // Multiplies off coset representatives level by level starting at
  // `from`; returns the remainder and the level where sifting stopped.
  std::pair<Perm, size_t> sift(Perm p, size_t from) const;
  void rebuild_orbit(size_t level);
  void fix_level(size_t level); // deterministic Schreier-Sims closure
  // Adds r to the generator sets of levels lo..at (r fixes every base
  // above lo it needs to) and re-closes them deepest first.
  void insert_strong_generator(Perm r, size_t lo, size_t at);

  int degree_ = 0;
  std::vector<Perm> gens_;
  std::vector<Level> levels_;
};

class UnionFind {
public:
  explicit UnionFind(int n) : parent_(static_cast<size_t>(n)), rank_(static_cast<size_t>(n), 0) {
    for (int i = 0; i < n; ++i)
      parent_[static_cast<size_t>(i)] = i;
  }

  int find(int x) {
    while (parent_[static_cast<size_t>(x)] != x) {
      parent_[static_cast<size_t>(x)] = parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
      x = parent_[static_cast<size_t>(x)];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return false;
    if (rank_[static_cast<size_t>(a)] < rank_[static_cast<size_t>(b)])
      std::swap(a, b);
    parent_[static_cast<size_t>(b)] = a;
    if (rank_[static_cast<size_t>(a)] == rank_[static_cast<size_t>(b)])
      ++rank_[static_cast<size_t>(a)];
    return true;
  }

  bool same(int a, int b) { return find(a) == find(b); }

private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

} // namespace pru
