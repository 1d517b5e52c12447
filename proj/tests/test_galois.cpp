#include "pru/galois.hpp"
#include "pru/parse.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>
#include <set>

using namespace pru;
using nlohmann::json;

namespace {

int count_of(const Fragment &f, Arity a) {
  int h = f.homset_index(a);
  return h < 0 ? 0 : static_cast<int>(f.homsets[static_cast<size_t>(h)].size());
}

BigInt fact(size_t n) {
  BigInt r = 1;
  for (size_t k = 2; k <= n; ++k)
    r *= static_cast<unsigned>(k);
  return r;
}

Partition discrete_of(const Fragment &f) {
  Partition p;
  p.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h) {
    p.block_of[h].resize(f.homsets[h].size());
    for (size_t i = 0; i < f.homsets[h].size(); ++i)
      p.block_of[h][i] = static_cast<int>(i);
  }
  return p;
}

Partition one_block_of(const Fragment &f) {
  Partition p;
  p.block_of.resize(f.homsets.size());
  for (size_t h = 0; h < f.homsets.size(); ++h)
    p.block_of[h].assign(f.homsets[h].size(), 0);
  return p;
}

std::pair<int, int> locate(const Fragment &f, const std::string &src) {
  auto loc = f.find(parse(src));
  REQUIRE(loc.has_value());
  return *loc;
}

void walk_subterms(const Term &t, const Fragment &f) {
  CHECK(f.find(t).has_value());
  for (int i = 0; i < t.child_count(); ++i)
    walk_subterms(t.child(i), f);
}

} // namespace

// Hom-set counts were frozen from an independent brute-force enumerator;
// the DP must reproduce them exactly.
TEST_CASE("fragment counts at width 2") {
  Fragment f = enumerate_fragment();
  CHECK(f.total_terms == 374);
  REQUIRE(f.homset_arities.size() == 4);
  CHECK(count_of(f, {1, 1}) == 84);
  CHECK(count_of(f, {1, 2}) == 90);
  CHECK(count_of(f, {2, 1}) == 130);
  CHECK(count_of(f, {2, 2}) == 70);

  FragmentParams norec;
  norec.allow_rec = false;
  Fragment g = enumerate_fragment(norec);
  CHECK(g.total_terms == 272);
  CHECK(count_of(g, {1, 1}) == 84);
  CHECK(count_of(g, {1, 2}) == 90);
  CHECK(count_of(g, {2, 1}) == 52);
  CHECK(count_of(g, {2, 2}) == 46);

  FragmentParams small;
  small.max_size = 3;
  Fragment h = enumerate_fragment(small);
  CHECK(h.total_terms == 39);
  CHECK(count_of(h, {1, 1}) == 12);
  CHECK(count_of(h, {1, 2}) == 9);
  CHECK(count_of(h, {2, 1}) == 14);
  CHECK(count_of(h, {2, 2}) == 4);

  small.allow_rec = false;
  CHECK(enumerate_fragment(small).total_terms == 33);

  // Every composite adds exactly one node over two odd subtrees, so all
  // sizes are odd and an even bound adds nothing.
  FragmentParams six;
  six.max_size = 6;
  six.allow_rec = false;
  Fragment s6 = enumerate_fragment(six);
  CHECK(s6.total_terms == 272);
  for (const auto &hs : s6.homsets)
    for (const Term &t : hs)
      CHECK(t.size() % 2 == 1);
}

TEST_CASE("fragment counts at wider arities") {
  FragmentParams p3;
  p3.max_size = 3;
  p3.max_width = 3;
  Fragment f3 = enumerate_fragment(p3);
  CHECK(f3.total_terms == 66);
  CHECK(count_of(f3, {3, 1}) == 18);
  CHECK(count_of(f3, {3, 2}) == 9);

  FragmentParams p4;
  p4.max_size = 3;
  p4.max_width = 4;
  Fragment f4 = enumerate_fragment(p4);
  CHECK(f4.total_terms == 110);
  CHECK(count_of(f4, {4, 1}) == 28);
  CHECK(count_of(f4, {4, 2}) == 16);
  REQUIRE(f4.homset_arities.size() == 8);
}

TEST_CASE("fragment structure invariants") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);

  // Arities sorted by (dom, cod); hom-sets sorted by size then print.
  for (size_t h = 1; h < f.homset_arities.size(); ++h) {
    const Arity &a = f.homset_arities[h - 1], &b = f.homset_arities[h];
    CHECK((a.dom < b.dom || (a.dom == b.dom && a.cod < b.cod)));
  }
  for (const auto &hs : f.homsets)
    for (size_t i = 1; i < hs.size(); ++i) {
      const Term &a = hs[i - 1], &b = hs[i];
      CHECK((a.size() < b.size() ||
             (a.size() == b.size() && print(a) < print(b))));
    }

  // Closed under subterms.
  for (const auto &hs : f.homsets)
    for (const Term &t : hs)
      walk_subterms(t, f);

  // Global indexing roundtrips and matches find().
  int g = 0;
  for (size_t h = 0; h < f.homsets.size(); ++h)
    for (size_t i = 0; i < f.homsets[h].size(); ++i, ++g) {
      CHECK(f.global_index(static_cast<int>(h), static_cast<int>(i)) == g);
      auto [h2, i2] = f.from_global(g);
      CHECK(h2 == static_cast<int>(h));
      CHECK(i2 == static_cast<int>(i));
      auto loc = f.find(f.homsets[h][i]);
      REQUIRE(loc.has_value());
      CHECK(loc->first == static_cast<int>(h));
      CHECK(loc->second == static_cast<int>(i));
    }
  CHECK(g == f.total_terms);

  CHECK_FALSE(f.find(parse("(comp s (comp s (comp s s)))")).has_value());
  CHECK(f.homset_index({7, 3}) == -1);

  FragmentParams tiny;
  tiny.homset_cap = 50;
  CHECK_THROWS_AS(enumerate_fragment(tiny), CapacityError);
}

TEST_CASE("semantic partition groups by fingerprint") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);
  Partition sem = semantic_partition(f);

  auto [hz, iz] = locate(f, "z");
  auto [h1, i1] = locate(f, "(comp z s)");
  auto [h2, i2] = locate(f, "(comp z (pi 1 1))");
  auto [hs_, is_] = locate(f, "s");
  REQUIRE(hz == h1);
  REQUIRE(hz == h2);
  REQUIRE(hz == hs_);
  CHECK(sem.same(hz, iz, i1));
  CHECK(sem.same(hz, iz, i2));
  CHECK_FALSE(sem.same(hz, iz, is_));

  // Dense block ids starting at 0, shape aligned with the hom-sets.
  REQUIRE(sem.block_of.size() == f.homsets.size());
  for (size_t h = 0; h < sem.block_of.size(); ++h) {
    REQUIRE(sem.block_of[h].size() == f.homsets[h].size());
    int mx = -1;
    std::set<int> seen;
    for (int b : sem.block_of[h]) {
      CHECK(b >= 0);
      mx = std::max(mx, b);
      seen.insert(b);
    }
    CHECK(static_cast<int>(seen.size()) == mx + 1);
    CHECK(sem.block_of[h][0] == 0);
  }

  CHECK(Partition::refines(sem, sem));
  CHECK(Partition::refines(discrete_of(f), sem));
  CHECK(Partition::refines(sem, one_block_of(f)));
  CHECK_FALSE(Partition::refines(one_block_of(f), sem));
}

TEST_CASE("universe partitions on a small fragment") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);

  UniversePartitionResult desc = universe_partition(f, UniverseName::Desc);
  CHECK(desc.partition == discrete_of(f));
  CHECK_FALSE(desc.truncated);
  CHECK(desc.refines_semantic);

  // Association needs a nested composition, which first fits at size 5.
  UniversePartitionResult c = universe_partition(f, UniverseName::C);
  CHECK(c.partition == discrete_of(f));
  CHECK_FALSE(c.truncated);

  UniversePartitionResult i = universe_partition(f, UniverseName::I);
  auto [hs_, is_] = locate(f, "s");
  auto [hu, iu] = locate(f, "(comp (pi 1 1) s)");
  auto [hv, iv] = locate(f, "(comp s (pi 1 1))");
  auto [hz, iz] = locate(f, "z");
  REQUIRE(hs_ == hu);
  CHECK(i.partition.same(hs_, is_, iu));
  CHECK(i.partition.same(hs_, is_, iv));
  CHECK_FALSE(i.partition.same(hs_, is_, iz));
  CHECK(i.refines_semantic);
  CHECK_FALSE(i.truncated);
  CHECK_FALSE(i.partition == discrete_of(f));

  UniversePartitionResult func = universe_partition(f, UniverseName::Func);
  CHECK(func.partition == semantic_partition(f));
  CHECK(func.refines_semantic);

  // Rewrite partitions refine the semantic one and grow along the order.
  UniversePartitionResult cat = universe_partition(f, UniverseName::Cat);
  UniversePartitionResult catx = universe_partition(f, UniverseName::CatX);
  UniversePartitionResult catn = universe_partition(f, UniverseName::CatN);
  UniversePartitionResult catxn = universe_partition(f, UniverseName::CatXN);
  for (const auto *r : {&cat, &catx, &catn, &catxn})
    CHECK(r->refines_semantic);
  CHECK_FALSE(cat.truncated);

  CHECK(Partition::refines(desc.partition, c.partition));
  CHECK(Partition::refines(desc.partition, i.partition));
  CHECK(Partition::refines(c.partition, cat.partition));
  CHECK(Partition::refines(i.partition, cat.partition));
  CHECK(Partition::refines(cat.partition, catx.partition));
  CHECK(Partition::refines(cat.partition, catn.partition));
  CHECK(Partition::refines(catx.partition, catxn.partition));
  CHECK(Partition::refines(catn.partition, catxn.partition));
  CHECK(Partition::refines(catxn.partition, func.partition));
}

TEST_CASE("association merges appear at size 5") {
  Fragment f = enumerate_fragment();
  UniversePartitionResult c = universe_partition(f, UniverseName::C);
  CHECK_FALSE(c.truncated);
  auto [hx, ix] = locate(f, "(comp s (comp s z))");
  auto [hy, iy] = locate(f, "(comp (comp s s) z)");
  REQUIRE(hx == hy);
  CHECK(c.partition.same(hx, ix, iy));

  // Unit collapse is not derivable from association alone.
  auto [hu, iu] = locate(f, "(comp (pi 1 1) s)");
  auto [hs_, is_] = locate(f, "s");
  CHECK_FALSE(c.partition.same(hu, iu, is_));
  CHECK(c.refines_semantic);
}

TEST_CASE("stabilizer orders are block factorial products") {
  FragmentParams p;
  p.max_size = 3;
  p.allow_rec = false;
  Fragment f = enumerate_fragment(p); // hom-sets 12, 9, 8, 4

  PermGroupFamily triv = full_stabilizer(f, discrete_of(f));
  CHECK(triv.order() == 1);

  PermGroupFamily full = full_stabilizer(f, one_block_of(f));
  CHECK(full.order() == fact(12) * fact(9) * fact(8) * fact(4));

  Partition sem = semantic_partition(f);
  BigInt expect = 1;
  for (const auto &hs : sem.blocks())
    for (const auto &b : hs)
      expect *= fact(b.size());
  PermGroupFamily gsem = full_stabilizer(f, sem);
  CHECK(gsem.order() == expect);
  CHECK(expect > 1);          // some fingerprints coincide
  CHECK(expect < full.order()); // and some differ

  CHECK(triv.subgroup_of(gsem));
  CHECK(gsem.subgroup_of(full));
  CHECK_FALSE(full.subgroup_of(gsem));

  // Orbit/stabilizer roundtrips.
  CHECK(orbit_partition(gsem, f) == sem);
  CHECK(orbit_partition(triv, f) == discrete_of(f));
  CHECK(orbit_partition(full, f) == one_block_of(f));
}

TEST_CASE("orbits of generated subgroups") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);
  Partition sem = semantic_partition(f);

  auto [hz, iz] = locate(f, "z");
  auto [h1, i1] = locate(f, "(comp z s)");
  auto [h2, i2] = locate(f, "(comp z z)");
  REQUIRE(hz == h1);
  REQUIRE(hz == h2);
  REQUIRE(sem.same(hz, iz, i1));
  REQUIRE(sem.same(hz, iz, i2));

  PermGroupFamily fam;
  for (const auto &hs : f.homsets)
    fam.groups.emplace_back(static_cast<int>(hs.size()));
  Perm t = perm_identity(static_cast<int>(f.homsets[static_cast<size_t>(hz)].size()));
  std::swap(t[static_cast<size_t>(iz)], t[static_cast<size_t>(i1)]);
  fam.groups[static_cast<size_t>(hz)].add_generator(t);

  Partition orb = orbit_partition(fam, f);
  CHECK(orb.same(hz, iz, i1));
  CHECK_FALSE(orb.same(hz, iz, i2));
  CHECK(Partition::refines(orb, sem));
  CHECK(fam.subgroup_of(full_stabilizer(f, orb)));
  CHECK(fam.subgroup_of(full_stabilizer(f, sem)));

  // Adding a generator can only coarsen orbits.
  PermGroupFamily bigger = fam;
  Perm t2 = perm_identity(static_cast<int>(f.homsets[static_cast<size_t>(hz)].size()));
  std::swap(t2[static_cast<size_t>(i1)], t2[static_cast<size_t>(i2)]);
  bigger.groups[static_cast<size_t>(hz)].add_generator(t2);
  Partition orb2 = orbit_partition(bigger, f);
  CHECK(Partition::refines(orb, orb2));
  CHECK(orb2.same(hz, iz, i2));
}

TEST_CASE("perm group families") {
  PermGroupFamily a, b;
  a.groups.emplace_back(3);
  a.groups.back().add_generator({1, 0, 2});
  a.groups.emplace_back(2);
  b.groups.emplace_back(3);
  b.groups.back().add_generator({1, 0, 2});
  b.groups.back().add_generator({0, 2, 1});
  b.groups.emplace_back(2);
  b.groups.back().add_generator({1, 0});
  CHECK(a.order() == 2);
  CHECK(b.order() == 12);
  CHECK(a.subgroup_of(b));
  CHECK_FALSE(b.subgroup_of(a));
  CHECK(a.subgroup_of(a));
}

TEST_CASE("operation preservation pins every term once leaves are fixed") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);
  PermGroupFamily full = full_stabilizer(f, one_block_of(f));
  std::vector<std::vector<Perm>> corr;
  PermGroupFamily fixed = op_preserving_subgroup(full, f, OpSet{}, true, &corr);
  CHECK(fixed.order() == 1);
  CHECK(corr.empty());
  CHECK(fixed.subgroup_of(full));

  // With no operations and no pinning there is nothing to preserve.
  OpSet none;
  none.comp = none.rec = none.pair = false;
  PermGroupFamily untouched = op_preserving_subgroup(full, f, none, false);
  CHECK(untouched.order() == full.order());
}

TEST_CASE("correspondence checks pass on a small fragment") {
  FragmentParams p;
  p.max_size = 3;
  Fragment f = enumerate_fragment(p);
  GaloisOptions o;
  o.subgroup_samples = 6;
  o.partition_samples = 4;
  o.seed = 3;
  GaloisReport rep = galois_check(f, o);

  for (const GaloisCheck &c : rep.checks)
    CHECK_MESSAGE(c.pass, c.name, ": ", c.detail);
  CHECK_FALSE(rep.hard_fail());
  CHECK(rep.stabilizer_orders.size() == 8);
  CHECK(rep.stabilizer_orders.at(UniverseName::Desc) == 1);

  std::set<std::string> names;
  for (const GaloisCheck &c : rep.checks)
    names.insert(c.name);
  for (const char *n :
       {"refines-semantic:Desc", "refines-semantic:Func",
        "roundtrip-partition:Cat", "roundtrip-partition:CatXN",
        "partition-refines:Desc<=C", "stabilizer-monotone:Desc<=C",
        "subgroup-containment", "orbit-antitone", "full-stab-equality",
        "rigidity-trivial"})
    CHECK_MESSAGE(names.count(n) == 1, n);

  // Every cover edge is either checked or skipped with a recorded defect.
  for (const auto &[a, b] : universe_cover_edges()) {
    std::string edge = std::string(to_string(a)) + "<=" + to_string(b);
    if (names.count("partition-refines:" + edge))
      continue;
    bool noted = false;
    for (const std::string &d : rep.defects)
      noted |= d.find(edge) != std::string::npos;
    CHECK_MESSAGE(noted, edge);
  }

  json j = galois_json(f, rep);
  CHECK(j["fragment"]["total"] == 39);
  CHECK(j["fragment"]["homsets"].size() == 4);
  CHECK(j["hard_fail"] == false);
  CHECK(j["groups"]["Desc"]["order"] == "1");
  CHECK(j["partitions"].contains("Cat"));
  CHECK(j["truncated"].contains("CatXN"));

  // The semantic blocks partition the global indices exactly.
  std::set<int> seen;
  for (const auto &blk : j["semantic_partition"])
    for (int g : blk)
      CHECK(seen.insert(g).second);
  CHECK(static_cast<int>(seen.size()) == f.total_terms);
}

TEST_CASE("lattice report on a small fragment") {
  FragmentParams p;
  p.max_size = 3;
  p.allow_rec = false;
  Fragment f = enumerate_fragment(p);
  json lat = lattice_report(f);

  CHECK(lat["fragment"]["total"] == 33);
  REQUIRE(lat["nodes"].is_array());
  std::map<std::string, int> node_of;
  for (const auto &n : lat["nodes"])
    for (const auto &u : n["universes"])
      node_of[u.get<std::string>()] = n["id"].get<int>();
  REQUIRE(node_of.size() == 8);

  // No association redex fits at size 3, so C collapses onto Desc; the
  // unit law separates I from both; fingerprints merge more still.
  CHECK(node_of["Desc"] == node_of["C"]);
  CHECK(node_of["I"] != node_of["Desc"]);
  CHECK(node_of["Func"] != node_of["I"]);
  CHECK(node_of["Func"] != node_of["Desc"]);
  CHECK(node_of["Cat"] == node_of["I"]);

  for (const auto &e : lat["edges"]) {
    CHECK(e["refines"] == true);
    std::string from = e["from"], to = e["to"];
    if (from == "Desc" && to == "C") {
      CHECK(e["strict"] == false);
      CHECK(e["witness"].is_null());
    }
    if (from == "C" && to == "Cat")
      CHECK(e["strict"] == true);
    if (from == "I" && to == "Cat")
      CHECK(e["strict"] == false);
    if (from == "CatXN" && to == "Func") {
      CHECK(e["strict"] == true);
      REQUIRE(e["witness"].is_object());
      CHECK(e["witness"]["terms"].size() == 2);
    }
  }

  CHECK(lat["orders"]["Desc"] == "1");
  // At this size only the unit law distinguishes the two rule families as
  // sets of merges, so incomparability is one-sided and reported honestly.
  CHECK(lat["incomparability"]["I-not-C"].is_object());
  CHECK(lat["incomparability"]["C-not-I"].is_null());
  CHECK(lat["truncated"].empty());

  // Node block counts and stabilizer orders are consistent: Desc's node
  // is discrete.
  for (const auto &n : lat["nodes"])
    if (n["id"].get<int>() == node_of["Desc"]) {
      CHECK(n["block_count"] == 33);
      CHECK(n["stabilizer_order"] == "1");
    }
}
