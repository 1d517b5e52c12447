#include "pru/galois.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <random>

namespace pru {

namespace {

bool arity_less(const Arity &a, const Arity &b) {
  return a.dom != b.dom ? a.dom < b.dom : a.cod < b.cod;
}

// Relabels block ids densely in order of first occurrence, the canonical
// labeling every Partition producer uses (so operator== is meaningful).
void canonicalize_ids(std::vector<int> &ids) {
  std::unordered_map<int, int> remap;
  for (int &v : ids) {
    auto [it, fresh] = remap.emplace(v, static_cast<int>(remap.size()));
    v = it->second;
  }
}

} // namespace

int Fragment::homset_index(Arity a) const {
  for (size_t h = 0; h < homset_arities.size(); ++h)
    if (homset_arities[h] == a)
      return static_cast<int>(h);
  return -1;
}

std::optional<std::pair<int, int>> Fragment::find(const Term &t) const {
  auto it = locate.find(t);
  if (it == locate.end())
    return std::nullopt;
  return it->second;
}

int Fragment::global_index(int h, int i) const {
  return offsets[static_cast<size_t>(h)] + i;
}

std::pair<int, int> Fragment::from_global(int g) const {
  for (size_t h = 0; h + 1 < offsets.size(); ++h)
    if (g < offsets[h + 1])
      return {static_cast<int>(h), g - offsets[h]};
  return {static_cast<int>(offsets.size()) - 1, g - offsets.back()};
}

Fragment enumerate_fragment(const FragmentParams &p) {
  if (p.max_size < 1 || p.max_width < 1)
    throw SpecError("fragment needs max_size >= 1 and max_width >= 1");
  const int W = p.max_width;
  const int S = p.max_size;
  // by[n][a][c]: terms of size n and arity (a, c); indices 1-based.
  auto idx = [&](int n, int a, int c) {
    return ((n - 1) * W + (a - 1)) * W + (c - 1);
  };
  std::vector<std::vector<Term>> by(static_cast<size_t>(S * W * W));

  for (int a = 1; a <= W; ++a) {
    auto &cell = by[static_cast<size_t>(idx(1, a, 1))];
    if (a == 1) {
      cell.push_back(Term::z());
      cell.push_back(Term::s());
    }
    for (int i = 1; i <= a; ++i)
      cell.push_back(Term::proj(a, i));
  }

  for (int n = 2; n <= S; ++n) {
    for (int n1 = 1; n1 <= n - 2; ++n1) {
      const int n2 = n - 1 - n1;
      // comp: inner (a, m) of size n1, outer (m, c) of size n2
      for (int a = 1; a <= W; ++a)
        for (int m = 1; m <= W; ++m)
          for (int c = 1; c <= W; ++c)
            for (const Term &inner : by[static_cast<size_t>(idx(n1, a, m))])
              for (const Term &outer : by[static_cast<size_t>(idx(n2, m, c))])
                by[static_cast<size_t>(idx(n, a, c))].push_back(
                    Term::comp(outer, inner));
      // rec: base (a, b) size n1, step (a+b, b) size n2, result (a+1, b)
      if (p.allow_rec)
        for (int a = 1; a + 1 <= W; ++a)
          for (int b = 1; a + b <= W && b <= W; ++b)
            for (const Term &base : by[static_cast<size_t>(idx(n1, a, b))])
              for (const Term &step :
                   by[static_cast<size_t>(idx(n2, a + b, b))])
                by[static_cast<size_t>(idx(n, a + 1, b))].push_back(
                    Term::rec(base, step));
      // pair: (a, b1) size n1 with (a, b2) size n2, result (a, b1+b2)
      for (int a = 1; a <= W; ++a)
        for (int b1 = 1; b1 < W; ++b1)
          for (int b2 = 1; b1 + b2 <= W; ++b2)
            for (const Term &f : by[static_cast<size_t>(idx(n1, a, b1))])
              for (const Term &g : by[static_cast<size_t>(idx(n2, a, b2))])
                by[static_cast<size_t>(idx(n, a, b1 + b2))].push_back(
                    Term::pair(f, g));
    }
  }

  Fragment frag;
  frag.params = p;
  for (int a = 1; a <= W; ++a)
    for (int c = 1; c <= W; ++c) {
      std::vector<Term> homset;
      for (int n = 1; n <= S; ++n)
        for (Term &t : by[static_cast<size_t>(idx(n, a, c))])
          homset.push_back(std::move(t));
      if (homset.empty())
        continue;
      if (static_cast<int>(homset.size()) > p.homset_cap)
        throw CapacityError("hom-set " + to_string(Arity{a, c}) + " holds " +
                            std::to_string(homset.size()) +
                            " terms, above the cap of " +
                            std::to_string(p.homset_cap));
      sort_terms(homset);
      frag.homset_arities.push_back({a, c});
      frag.homsets.push_back(std::move(homset));
    }

  // homset_arities comes out sorted by (dom, cod) from the loop order.
  frag.offsets.resize(frag.homsets.size());
  int off = 0;
  for (size_t h = 0; h < frag.homsets.size(); ++h) {
    frag.offsets[h] = off;
    for (size_t i = 0; i < frag.homsets[h].size(); ++i)
      frag.locate.emplace(frag.homsets[h][i],
                          std::make_pair(static_cast<int>(h),
                                         static_cast<int>(i)));
    off += static_cast<int>(frag.homsets[h].size());
  }
  frag.total_terms = off;
  return frag;
}

std::vector<std::vector<std::vector<int>>> Partition::blocks() const {
  std::vector<std::vector<std::vector<int>>> out(block_of.size());
  for (size_t h = 0; h < block_of.size(); ++h) {
    int nblocks = 0;
    for (int b : block_of[h])
      nblocks = std::max(nblocks, b + 1);
    out[h].resize(static_cast<size_t>(nblocks));
    for (size_t i = 0; i < block_of[h].size(); ++i)
      out[h][static_cast<size_t>(block_of[h][i])].push_back(
          static_cast<int>(i));
  }
  return out;
}

bool Partition::refines(const Partition &fine, const Partition &coarse) {
  if (fine.block_of.size() != coarse.block_of.size())
    return false;
  for (size_t h = 0; h < fine.block_of.size(); ++h) {
    if (fine.block_of[h].size() != coarse.block_of[h].size())
      return false;
    std::unordered_map<int, int> target;
    for (size_t i = 0; i < fine.block_of[h].size(); ++i) {
      auto [it, fresh] =
          target.emplace(fine.block_of[h][i], coarse.block_of[h][i]);
      if (!fresh && it->second != coarse.block_of[h][i])
        return false;
    }
  }
  return true;
}

namespace {

struct SemanticData {
  Partition part;
  std::vector<std::pair<int, int>> partial; // (homset, index)
};

SemanticData semantic_data(const Fragment &f, const Budget &budget,
                           int grid) {
  SemanticData out;
  out.part.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    std::unordered_map<std::string, int> key_to_block;
    auto &ids = out.part.block_of[h];
    ids.reserve(f.homsets[h].size());
    for (size_t i = 0; i < f.homsets[h].size(); ++i) {
      Fingerprint fp = fingerprint(f.homsets[h][i], grid, budget);
      if (fp.partial)
        out.partial.emplace_back(static_cast<int>(h), static_cast<int>(i));
      std::string key = fingerprint_json(fp).dump();
      auto [it, fresh] =
          key_to_block.emplace(std::move(key),
                               static_cast<int>(key_to_block.size()));
      ids.push_back(it->second);
    }
  }
  return out;
}

} // namespace

Partition semantic_partition(const Fragment &f, const Budget &budget) {
  return semantic_data(f, budget, f.params.grid).part;
}

namespace {

// Union-find over an open-ended set of nodes, for closures that pass
// through terms outside the fragment.
class DynDSU {
public:
  int add() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[static_cast<size_t>(x)] != x) {
      parent_[static_cast<size_t>(x)] =
          parent_[static_cast<size_t>(parent_[static_cast<size_t>(x)])];
      x = parent_[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent_[static_cast<size_t>(find(b))] = find(a); }

private:
  std::vector<int> parent_;
};

Partition discrete_partition(const Fragment &f) {
  Partition p;
  p.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    p.block_of[h].resize(f.homsets[h].size());
    for (size_t i = 0; i < f.homsets[h].size(); ++i)
      p.block_of[h][i] = static_cast<int>(i);
  }
  return p;
}

} // namespace

UniversePartitionResult universe_partition(const Fragment &f, UniverseName u,
                                           const ClosureCaps &caps,
                                           const Budget &budget) {
  UniversePartitionResult res;
  if (u == UniverseName::Desc) {
    res.partition = discrete_partition(f);
    res.refines_semantic = true;
    return res;
  }
  if (u == UniverseName::Func) {
    res.partition = semantic_partition(f, budget);
    res.refines_semantic = true;
    return res;
  }

  res.partition.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    const auto &terms = f.homsets[h];
    const int n = static_cast<int>(terms.size());
    DynDSU dsu;
    std::unordered_map<Term, int, TermHash> node;
    auto node_of = [&](const Term &t) {
      auto it = node.find(t);
      if (it != node.end())
        return it->second;
      int k = dsu.add();
      node.emplace(t, k);
      return k;
    };
    std::vector<bool> done(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<size_t>(i)])
        continue;
      ClosureResult cl = closure(terms[static_cast<size_t>(i)], u, caps);
      if (!cl.complete)
        res.truncated = true;
      const int root = node_of(terms[static_cast<size_t>(i)]);
      for (const Term &t : cl.terms)
        dsu.unite(root, node_of(t));
      // Anything inside a completed closure reaches only terms the
      // closure already reached, so its own exploration is redundant.
      if (cl.complete)
        for (int j = i + 1; j < n; ++j)
          if (!done[static_cast<size_t>(j)] &&
              cl.contains(terms[static_cast<size_t>(j)]))
            done[static_cast<size_t>(j)] = true;
    }
    auto &ids = res.partition.block_of[h];
    ids.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      ids[static_cast<size_t>(i)] = dsu.find(node_of(terms[static_cast<size_t>(i)]));
    canonicalize_ids(ids);
  }
  res.refines_semantic =
      Partition::refines(res.partition, semantic_partition(f, budget));
  return res;
}

BigInt PermGroupFamily::order() const {
  BigInt n = 1;
  for (const PermGroup &g : groups)
    n *= g.order();
  return n;
}

bool PermGroupFamily::subgroup_of(const PermGroupFamily &other) const {
  if (groups.size() != other.groups.size())
    return false;
  for (size_t h = 0; h < groups.size(); ++h)
    for (const Perm &g : groups[h].generators())
      if (!other.groups[h].contains(g))
        return false;
  return true;
}

PermGroupFamily full_stabilizer(const Fragment &f, const Partition &p) {
  PermGroupFamily fam;
  auto blocks = p.blocks();
  for (size_t h = 0; h < f.homsets.size(); ++h)
    fam.groups.push_back(PermGroup::block_stabilizer(
        static_cast<int>(f.homsets[h].size()), blocks[h]));
  return fam;
}

Partition orbit_partition(const PermGroupFamily &g, const Fragment &f) {
  Partition p;
  p.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    const int n = static_cast<int>(f.homsets[h].size());
    UnionFind uf(n);
    for (const Perm &gen : g.groups[h].generators())
      for (int i = 0; i < n; ++i)
        uf.unite(i, gen[static_cast<size_t>(i)]);
    auto &ids = p.block_of[h];
    ids.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      ids[static_cast<size_t>(i)] = uf.find(i);
    canonicalize_ids(ids);
  }
  return p;
}

namespace {

enum OpKind : int { OpComp = 0, OpRec = 1, OpPair = 2 };

struct OpTriple {
  int op;
  int hx, ix; // first operand (outer g for comp, base for rec, left for pair)
  int hy, iy; // second operand
  int hr, ir; // result
};

uint64_t triple_key(int op, int hx, int ix, int hy, int iy) {
  return (static_cast<uint64_t>(op) << 56) |
         (static_cast<uint64_t>(hx & 0xff) << 48) |
         (static_cast<uint64_t>(ix & 0xffff) << 32) |
         (static_cast<uint64_t>(hy & 0xff) << 16) |
         static_cast<uint64_t>(iy & 0xffff);
}

struct OpTable {
  std::vector<OpTriple> triples;
  std::unordered_map<uint64_t, std::pair<int, int>> result_of;
  std::vector<std::vector<int>> leaves; // per homset: indices of size-1 terms

  void add(const Fragment &f, int op, int hx, int ix, int hy, int iy,
           const Term &result) {
    auto loc = f.find(result);
    if (!loc)
      return;
    triples.push_back({op, hx, ix, hy, iy, loc->first, loc->second});
    result_of.emplace(triple_key(op, hx, ix, hy, iy), *loc);
  }
};

OpTable build_op_table(const Fragment &f, const OpSet &ops) {
  OpTable tab;
  const int H = static_cast<int>(f.homsets.size());
  const int S = f.params.max_size;
  for (int hx = 0; hx < H; ++hx) {
    const Arity ax = f.homset_arities[static_cast<size_t>(hx)];
    for (int hy = 0; hy < H; ++hy) {
      const Arity ay = f.homset_arities[static_cast<size_t>(hy)];
      const bool comp_ok = ops.comp && ay.cod == ax.dom;
      // rec: base in hx with arity (a, b), step in hy with arity (a+b, b)
      const bool rec_ok = ops.rec && ax.dom + 1 <= f.params.max_width &&
                          ay.dom == ax.dom + ax.cod && ay.cod == ax.cod;
      const bool pair_ok = ops.pair && ay.dom == ax.dom &&
                           ax.cod + ay.cod <= f.params.max_width;
      if (!comp_ok && !rec_ok && !pair_ok)
        continue;
      const auto &xs = f.homsets[static_cast<size_t>(hx)];
      const auto &ys = f.homsets[static_cast<size_t>(hy)];
      for (int ix = 0; ix < static_cast<int>(xs.size()); ++ix) {
        const Term &x = xs[static_cast<size_t>(ix)];
        if (x.size() + 2 > S)
          break; // sorted by size; no result can fit
        for (int iy = 0; iy < static_cast<int>(ys.size()); ++iy) {
          const Term &y = ys[static_cast<size_t>(iy)];
          if (x.size() + y.size() + 1 > S)
            break;
          if (comp_ok)
            tab.add(f, OpComp, hx, ix, hy, iy, Term::comp(x, y));
          if (rec_ok)
            tab.add(f, OpRec, hx, ix, hy, iy, Term::rec(x, y));
          if (pair_ok)
            tab.add(f, OpPair, hx, ix, hy, iy, Term::pair(x, y));
        }
      }
    }
  }
  tab.leaves.resize(static_cast<size_t>(H));
  for (int h = 0; h < H; ++h)
    for (size_t i = 0; i < f.homsets[static_cast<size_t>(h)].size(); ++i)
      if (f.homsets[static_cast<size_t>(h)][i].size() == 1)
        tab.leaves[static_cast<size_t>(h)].push_back(static_cast<int>(i));
  return tab;
}

using Family = std::vector<Perm>;

Family identity_family(const Fragment &f) {
  Family fam;
  for (const auto &hs : f.homsets)
    fam.push_back(perm_identity(static_cast<int>(hs.size())));
  return fam;
}

bool family_preserves(const Family &phi, const OpTable &tab,
                      bool fix_initials) {
  for (const OpTriple &t : tab.triples) {
    int ix2 = phi[static_cast<size_t>(t.hx)][static_cast<size_t>(t.ix)];
    int iy2 = phi[static_cast<size_t>(t.hy)][static_cast<size_t>(t.iy)];
    auto it = tab.result_of.find(triple_key(t.op, t.hx, ix2, t.hy, iy2));
    if (it == tab.result_of.end())
      return false; // the permuted operands' op leaves the fragment
    if (it->second.second !=
        phi[static_cast<size_t>(t.hr)][static_cast<size_t>(t.ir)])
      return false;
  }
  if (fix_initials)
    for (size_t h = 0; h < tab.leaves.size(); ++h)
      for (int i : tab.leaves[h])
        if (phi[h][static_cast<size_t>(i)] != i)
          return false;
  return true;
}

// Treats the seed motion as forced and propagates through the operation
// triples in both directions (operands force results; a forced result
// decomposes structurally and forces its operands). Unforced points
// default to staying put. Returns nothing when forcing hits a
// contradiction or leaves the fragment.
std::optional<Family> propagate_repair(const Fragment &f, const OpTable &tab,
                                       int h0, const Perm &seed) {
  std::vector<std::vector<int>> forced(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h)
    forced[h].assign(f.homsets[h].size(), -1);
  for (size_t i = 0; i < seed.size(); ++i)
    if (seed[i] != static_cast<int>(i))
      forced[static_cast<size_t>(h0)][i] = seed[i];

  auto set_forced = [&](int h, int i, int image) {
    int &slot = forced[static_cast<size_t>(h)][static_cast<size_t>(i)];
    if (slot == image)
      return 0; // no change
    if (slot != -1)
      return -1; // contradiction
    slot = image;
    return 1;
  };

  for (int pass = 0; pass <= f.total_terms; ++pass) {
    bool changed = false;
    for (const OpTriple &t : tab.triples) {
      int fx = forced[static_cast<size_t>(t.hx)][static_cast<size_t>(t.ix)];
      int fy = forced[static_cast<size_t>(t.hy)][static_cast<size_t>(t.iy)];
      int fr = forced[static_cast<size_t>(t.hr)][static_cast<size_t>(t.ir)];
      if (fx != -1 && fy != -1) {
        auto it = tab.result_of.find(triple_key(t.op, t.hx, fx, t.hy, fy));
        if (it == tab.result_of.end())
          return std::nullopt;
        int rc = set_forced(t.hr, t.ir, it->second.second);
        if (rc < 0)
          return std::nullopt;
        changed |= rc > 0;
      }
      if (fr != -1) {
        // The result term decomposes uniquely; its image must decompose
        // the same way, forcing both operand images.
        const Term &img =
            f.homsets[static_cast<size_t>(t.hr)][static_cast<size_t>(fr)];
        Kind want = t.op == OpComp  ? Kind::Comp
                    : t.op == OpRec ? Kind::Rec
                                    : Kind::Pair;
        if (img.kind() != want)
          return std::nullopt;
        auto lx = f.find(img.child(0));
        auto ly = f.find(img.child(1));
        if (!lx || !ly || lx->first != t.hx || ly->first != t.hy)
          return std::nullopt;
        int rc = set_forced(t.hx, t.ix, lx->second);
        if (rc < 0)
          return std::nullopt;
        changed |= rc > 0;
        rc = set_forced(t.hy, t.iy, ly->second);
        if (rc < 0)
          return std::nullopt;
        changed |= rc > 0;
      }
    }
    if (!changed)
      break;
  }

  Family fam = identity_family(f);
  for (size_t h = 0; h < forced.size(); ++h)
    for (size_t i = 0; i < forced[h].size(); ++i)
      if (forced[h][i] != -1)
        fam[h][i] = forced[h][i];
  for (const Perm &p : fam)
    if (!perm_valid(p))
      return std::nullopt;
  return fam;
}

bool is_transposition(const Perm &p) {
  int moved = 0;
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i))
      ++moved;
  return moved == 2;
}

} // namespace

PermGroupFamily
op_preserving_subgroup(const PermGroupFamily &g, const Fragment &f,
                       const OpSet &ops, bool fix_initials,
                       std::vector<std::vector<Perm>> *correlated_out) {
  if (!ops.comp && !ops.rec && !ops.pair && !fix_initials)
    return g;
  OpTable tab = build_op_table(f, ops);
  PermGroupFamily h;
  for (const auto &hs : f.homsets)
    h.groups.emplace_back(static_cast<int>(hs.size()));

  for (size_t hh = 0; hh < g.groups.size(); ++hh) {
    for (const Perm &sigma : g.groups[hh].generators()) {
      Family phi = identity_family(f);
      phi[hh] = sigma;
      if (family_preserves(phi, tab, fix_initials)) {
        h.groups[hh].add_generator(sigma);
        continue;
      }
      if (!is_transposition(sigma))
        continue;
      auto repaired = propagate_repair(f, tab, static_cast<int>(hh), sigma);
      if (!repaired || !family_preserves(*repaired, tab, fix_initials))
        continue;
      // Membership in g, component by component.
      bool in_g = true;
      std::vector<size_t> moved;
      for (size_t h2 = 0; h2 < repaired->size(); ++h2) {
        if (perm_is_identity((*repaired)[h2]))
          continue;
        moved.push_back(h2);
        if (!g.groups[h2].contains((*repaired)[h2]))
          in_g = false;
      }
      if (!in_g || moved.empty())
        continue;
      if (moved.size() == 1) {
        h.groups[moved[0]].add_generator((*repaired)[moved[0]]);
      } else if (correlated_out) {
        // A genuine preserver that moves several hom-sets at once cannot
        // be decomposed into per-hom-set generators without overshooting.
        correlated_out->push_back(*repaired);
      }
    }
  }
  return h;
}

namespace {

Partition random_refinement(const Partition &base, std::mt19937_64 &rng) {
  Partition q;
  q.block_of.resize(base.block_of.size());
  for (size_t h = 0; h < base.block_of.size(); ++h) {
    auto blocks = std::vector<std::vector<int>>();
    {
      int nblocks = 0;
      for (int b : base.block_of[h])
        nblocks = std::max(nblocks, b + 1);
      blocks.resize(static_cast<size_t>(nblocks));
      for (size_t i = 0; i < base.block_of[h].size(); ++i)
        blocks[static_cast<size_t>(base.block_of[h][i])].push_back(
            static_cast<int>(i));
    }
    q.block_of[h].assign(base.block_of[h].size(), 0);
    int next = 0;
    for (auto &blk : blocks) {
      std::shuffle(blk.begin(), blk.end(), rng);
      int pieces = 1 + static_cast<int>(rng() % 3);
      pieces = std::min(pieces, static_cast<int>(blk.size()));
      // Cut points split the shuffled block into `pieces` chunks.
      for (size_t k = 0; k < blk.size(); ++k) {
        int piece = static_cast<int>(k) * pieces / static_cast<int>(blk.size());
        q.block_of[h][static_cast<size_t>(blk[k])] = next + piece;
      }
      next += pieces;
    }
    canonicalize_ids(q.block_of[h]);
  }
  return q;
}

PermGroupFamily random_semantic_subgroup(const Fragment &f,
                                         const Partition &semantic,
                                         std::mt19937_64 &rng,
                                         int extra_gens = 0) {
  PermGroupFamily fam;
  auto blocks = semantic.blocks();
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    const int n = static_cast<int>(f.homsets[h].size());
    PermGroup grp(n);
    std::vector<const std::vector<int> *> usable;
    for (const auto &b : blocks[h])
      if (b.size() >= 2)
        usable.push_back(&b);
    if (!usable.empty()) {
      const int k = 1 + static_cast<int>(rng() % 2) + extra_gens;
      for (int t = 0; t < k; ++t) {
        const auto &b = *usable[rng() % usable.size()];
        Perm p = perm_identity(n);
        if (b.size() >= 3 && rng() % 2) {
          size_t i = rng() % b.size(), j = rng() % b.size(), l = rng() % b.size();
          if (i != j && j != l && i != l) {
            // 3-cycle i -> j -> l -> i
            p[static_cast<size_t>(b[i])] = b[j];
            p[static_cast<size_t>(b[j])] = b[l];
            p[static_cast<size_t>(b[l])] = b[i];
          }
        }
        if (perm_is_identity(p)) {
          size_t i = rng() % b.size(), j = rng() % b.size();
          if (i == j)
            j = (j + 1) % b.size();
          std::swap(p[static_cast<size_t>(b[i])], p[static_cast<size_t>(b[j])]);
        }
        grp.add_generator(p);
      }
    }
    fam.groups.push_back(std::move(grp));
  }
  return fam;
}

std::string check_name(const char *base, UniverseName u) {
  return std::string(base) + ":" + to_string(u);
}

} // namespace

bool GaloisReport::hard_fail() const {
  for (const GaloisCheck &c : checks)
    if (!c.pass)
      return true;
  return false;
}

GaloisReport galois_check(const Fragment &f, const GaloisOptions &opts) {
  GaloisReport rep;
  rep.params = f.params;
  for (size_t h = 0; h < f.homsets.size(); ++h)
    rep.homset_sizes.emplace_back(f.homset_arities[h],
                                  static_cast<int>(f.homsets[h].size()));

  const int grid = opts.grid > 0 ? opts.grid : f.params.grid;
  SemanticData sem = semantic_data(f, opts.budget, grid);
  rep.semantic = sem.part;
  for (auto [h, i] : sem.partial)
    rep.defects.push_back(
        "partial fingerprint for " +
        print(f.homsets[static_cast<size_t>(h)][static_cast<size_t>(i)]));

  std::vector<UniverseName> universes =
      opts.universes.empty() ? all_universes() : opts.universes;

  std::map<UniverseName, PermGroupFamily> stabs;
  for (UniverseName u : universes) {
    UniversePartitionResult upr =
        universe_partition(f, u, opts.caps, opts.budget);
    if (upr.truncated)
      rep.defects.push_back(std::string("closure truncated for ") +
                            to_string(u));
    rep.checks.push_back({check_name("refines-semantic", u),
                          Partition::refines(upr.partition, sem.part), ""});
    PermGroupFamily stab = full_stabilizer(f, upr.partition);
    rep.stabilizer_orders[u] = stab.order();
    Partition orb = orbit_partition(stab, f);
    rep.checks.push_back(
        {check_name("roundtrip-partition", u), orb == upr.partition, ""});
    stabs.emplace(u, std::move(stab));
    rep.partitions.emplace(u, std::move(upr));
  }

  // Monotonicity along the nominal cover edges present in this run.
  for (const auto &[a, b] : universe_cover_edges()) {
    auto ia = rep.partitions.find(a), ib = rep.partitions.find(b);
    if (ia == rep.partitions.end() || ib == rep.partitions.end())
      continue;
    if (ia->second.truncated || ib->second.truncated) {
      rep.defects.push_back(std::string("skipped monotonicity for ") +
                            to_string(a) + "<=" + to_string(b) +
                            " (truncated closure)");
      continue;
    }
    std::string edge = std::string(to_string(a)) + "<=" + to_string(b);
    rep.checks.push_back(
        {"partition-refines:" + edge,
         Partition::refines(ia->second.partition, ib->second.partition), ""});
    rep.checks.push_back({"stabilizer-monotone:" + edge,
                          stabs.at(a).subgroup_of(stabs.at(b)), ""});
  }

  // Sampled generated subgroups: each must sit inside the full stabilizer
  // of its own orbit partition, and orbits must grow with the group.
  std::mt19937_64 rng(opts.seed);
  bool contain_ok = true, orbit_antitone_ok = true;
  for (int s = 0; s < opts.subgroup_samples; ++s) {
    PermGroupFamily sub = random_semantic_subgroup(f, sem.part, rng);
    Partition orb = orbit_partition(sub, f);
    PermGroupFamily stab = full_stabilizer(f, orb);
    if (!sub.subgroup_of(stab))
      contain_ok = false;
    PermGroupFamily bigger = sub;
    PermGroupFamily extra = random_semantic_subgroup(f, sem.part, rng);
    for (size_t h = 0; h < bigger.groups.size(); ++h)
      for (const Perm &p : extra.groups[h].generators())
        bigger.groups[h].add_generator(p);
    if (!Partition::refines(orb, orbit_partition(bigger, f)))
      orbit_antitone_ok = false;
  }
  rep.checks.push_back({"subgroup-containment", contain_ok,
                        std::to_string(opts.subgroup_samples) + " samples"});
  rep.checks.push_back({"orbit-antitone", orbit_antitone_ok,
                        std::to_string(opts.subgroup_samples) + " samples"});

  // Stabilizers are closed: stab/orbit roundtrips on random refinements
  // of the semantic partition restore both the partition and the group.
  bool stab_eq_ok = true;
  for (int s = 0; s < opts.partition_samples; ++s) {
    Partition q = random_refinement(sem.part, rng);
    PermGroupFamily stab = full_stabilizer(f, q);
    Partition orb = orbit_partition(stab, f);
    if (!(orb == q))
      stab_eq_ok = false;
    PermGroupFamily stab2 = full_stabilizer(f, orb);
    if (!stab.subgroup_of(stab2) || !stab2.subgroup_of(stab))
      stab_eq_ok = false;
  }
  rep.checks.push_back({"full-stab-equality", stab_eq_ok,
                        std::to_string(opts.partition_samples) + " samples"});

  if (opts.rigidity) {
    // Whole symmetric product, every operation, leaves pinned: the only
    // symmetry left must be the identity.
    Partition trivial;
    trivial.block_of.resize(f.homsets.size());
    for (size_t h = 0; h < f.homsets.size(); ++h)
      trivial.block_of[h].assign(f.homsets[h].size(), 0);
    PermGroupFamily full = full_stabilizer(f, trivial);
    std::vector<std::vector<Perm>> correlated;
    PermGroupFamily fixed =
        op_preserving_subgroup(full, f, OpSet{}, true, &correlated);
    rep.checks.push_back({"rigidity-trivial",
                          fixed.order() == 1 && correlated.empty(),
                          "order " + fixed.order().str()});
  }

  return rep;
}

namespace {

std::string cycles_string(const Perm &p, int offset) {
  std::string out;
  std::vector<bool> seen(p.size(), false);
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i] || p[i] == static_cast<int>(i))
      continue;
    out += '(';
    size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      if (!first)
        out += ' ';
      out += std::to_string(offset + static_cast<int>(j));
      first = false;
      j = static_cast<size_t>(p[j]);
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

nlohmann::json partition_blocks_json(const Fragment &f, const Partition &p) {
  nlohmann::json blocks = nlohmann::json::array();
  auto bl = p.blocks();
  for (size_t h = 0; h < bl.size(); ++h)
    for (const auto &blk : bl[h]) {
      nlohmann::json b = nlohmann::json::array();
      for (int i : blk)
        b.push_back(f.global_index(static_cast<int>(h), i));
      blocks.push_back(std::move(b));
    }
  return blocks;
}

nlohmann::json fragment_json(const Fragment &f) {
  nlohmann::json homsets = nlohmann::json::array();
  for (size_t h = 0; h < f.homsets.size(); ++h)
    homsets.push_back({{"arity",
                        {f.homset_arities[h].dom, f.homset_arities[h].cod}},
                       {"count", f.homsets[h].size()},
                       {"offset", f.offsets[h]}});
  return {{"max_size", f.params.max_size},
          {"max_width", f.params.max_width},
          {"allow_rec", f.params.allow_rec},
          {"grid", f.params.grid},
          {"total", f.total_terms},
          {"homsets", std::move(homsets)}};
}

} // namespace

nlohmann::json galois_json(const Fragment &f, const GaloisReport &r) {
  nlohmann::json partitions = nlohmann::json::object();
  nlohmann::json truncated = nlohmann::json::object();
  for (const auto &[u, upr] : r.partitions) {
    partitions[to_string(u)] = partition_blocks_json(f, upr.partition);
    truncated[to_string(u)] = upr.truncated;
  }
  nlohmann::json groups = nlohmann::json::object();
  for (const auto &[u, upr] : r.partitions) {
    PermGroupFamily stab = full_stabilizer(f, upr.partition);
    nlohmann::json gens = nlohmann::json::array();
    for (size_t h = 0; h < stab.groups.size(); ++h)
      for (const Perm &p : stab.groups[h].generators())
        gens.push_back(cycles_string(p, f.offsets[h]));
    groups[to_string(u)] = {{"order", r.stabilizer_orders.at(u).str()},
                            {"generators", std::move(gens)}};
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const GaloisCheck &c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"fragment", fragment_json(f)},
          {"semantic_partition", partition_blocks_json(f, r.semantic)},
          {"partitions", std::move(partitions)},
          {"groups", std::move(groups)},
          {"checks", std::move(checks)},
          {"defects", r.defects},
          {"truncated", std::move(truncated)},
          {"hard_fail", r.hard_fail()}};
}

nlohmann::json lattice_report(const Fragment &f, const GaloisOptions &opts) {
  std::vector<UniverseName> universes =
      opts.universes.empty() ? all_universes() : opts.universes;

  std::map<UniverseName, UniversePartitionResult> parts;
  std::map<UniverseName, BigInt> orders;
  for (UniverseName u : universes) {
    UniversePartitionResult upr =
        universe_partition(f, u, opts.caps, opts.budget);
    orders[u] = full_stabilizer(f, upr.partition).order();
    parts.emplace(u, std::move(upr));
  }

  // Group universes whose partitions coincide on this fragment.
  std::vector<std::vector<UniverseName>> nodes;
  std::map<UniverseName, int> node_of;
  for (UniverseName u : universes) {
    bool placed = false;
    for (size_t k = 0; k < nodes.size() && !placed; ++k)
      if (parts.at(nodes[k][0]).partition == parts.at(u).partition) {
        nodes[k].push_back(u);
        node_of[u] = static_cast<int>(k);
        placed = true;
      }
    if (!placed) {
      node_of[u] = static_cast<int>(nodes.size());
      nodes.push_back({u});
    }
  }

  // A strictness witness for an edge: two terms merged by the coarser
  // universe but separated by the finer one.
  auto witness_pair = [&](const Partition &fine, const Partition &coarse)
      -> nlohmann::json {
    for (size_t h = 0; h < fine.block_of.size(); ++h)
      for (size_t i = 0; i < fine.block_of[h].size(); ++i)
        for (size_t j = i + 1; j < fine.block_of[h].size(); ++j)
          if (coarse.block_of[h][i] == coarse.block_of[h][j] &&
              fine.block_of[h][i] != fine.block_of[h][j]) {
            const Term &ti = f.homsets[h][i];
            const Term &tj = f.homsets[h][j];
            return {{"pair",
                     {f.global_index(static_cast<int>(h), static_cast<int>(i)),
                      f.global_index(static_cast<int>(h),
                                     static_cast<int>(j))}},
                    {"terms", {print(ti), print(tj)}}};
          }
    return nullptr;
  };

  nlohmann::json edges = nlohmann::json::array();
  for (const auto &[a, b] : universe_cover_edges()) {
    if (!parts.count(a) || !parts.count(b))
      continue;
    const Partition &pa = parts.at(a).partition;
    const Partition &pb = parts.at(b).partition;
    bool strict = !(pa == pb);
    edges.push_back({{"from", to_string(a)},
                     {"to", to_string(b)},
                     {"refines", Partition::refines(pa, pb)},
                     {"strict", strict},
                     {"witness", strict ? witness_pair(pa, pb) : nullptr}});
  }

  // C and I are incomparable when each merges something the other keeps
  // apart.
  nlohmann::json incomparability = nlohmann::json::object();
  if (parts.count(UniverseName::C) && parts.count(UniverseName::I)) {
    incomparability["C-not-I"] = witness_pair(parts.at(UniverseName::I).partition,
                                              parts.at(UniverseName::C).partition);
    incomparability["I-not-C"] = witness_pair(parts.at(UniverseName::C).partition,
                                              parts.at(UniverseName::I).partition);
  }

  nlohmann::json jnodes = nlohmann::json::array();
  for (size_t k = 0; k < nodes.size(); ++k) {
    nlohmann::json members = nlohmann::json::array();
    for (UniverseName u : nodes[k])
      members.push_back(to_string(u));
    int nblocks = 0;
    auto bl = parts.at(nodes[k][0]).partition.blocks();
    for (const auto &hs : bl)
      nblocks += static_cast<int>(hs.size());
    jnodes.push_back({{"id", k},
                      {"universes", std::move(members)},
                      {"block_count", nblocks},
                      {"stabilizer_order", orders.at(nodes[k][0]).str()}});
  }

  nlohmann::json jorders = nlohmann::json::object();
  nlohmann::json jtrunc = nlohmann::json::array();
  for (const auto &[u, upr] : parts) {
    jorders[to_string(u)] = orders.at(u).str();
    if (upr.truncated)
      jtrunc.push_back(to_string(u));
  }

  return {{"fragment", fragment_json(f)},
          {"nodes", std::move(jnodes)},
          {"edges", std::move(edges)},
          {"orders", std::move(jorders)},
          {"incomparability", std::move(incomparability)},
          {"truncated", std::move(jtrunc)}};
}

} // namespace pru
