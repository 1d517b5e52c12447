#include "pru/perm.hpp"

#include <algorithm>
#include <stdexcept>

namespace pru {

Perm perm_identity(int n) {
  Perm p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    p[static_cast<size_t>(i)] = i;
  return p;
}

bool perm_is_identity(const Perm &p) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i))
      return false;
  return true;
}

Perm perm_compose(const Perm &a, const Perm &b) {
  Perm r(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    r[i] = b[static_cast<size_t>(a[i])];
  return r;
}

Perm perm_inverse(const Perm &p) {
  Perm r(p.size());
  for (size_t i = 0; i < p.size(); ++i)
    r[static_cast<size_t>(p[i])] = static_cast<int>(i);
  return r;
}

bool perm_valid(const Perm &p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[static_cast<size_t>(v)])
      return false;
    seen[static_cast<size_t>(v)] = true;
  }
  return true;
}

namespace {

int first_moved(const Perm &p) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i))
      return static_cast<int>(i);
  return -1;
}

} // namespace

PermGroup::PermGroup(int degree, const std::vector<Perm> &generators)
    : degree_(degree) {
  for (const Perm &g : generators)
    add_generator(g);
}

std::pair<Perm, size_t> PermGroup::sift(Perm p, size_t from) const {
  for (size_t j = from; j < levels_.size(); ++j) {
    const Level &lv = levels_[j];
    int x = p[static_cast<size_t>(lv.base)];
    if (x == lv.base)
      continue;
    auto it = lv.transversal.find(x);
    if (it == lv.transversal.end())
      return {std::move(p), j};
    p = perm_compose(p, perm_inverse(it->second));
  }
  return {std::move(p), levels_.size()};
}

bool PermGroup::contains(const Perm &p) const {
  if (static_cast<int>(p.size()) != degree_)
    return false;
  auto [r, lvl] = sift(p, 0);
  (void)lvl;
  return perm_is_identity(r);
}

BigInt PermGroup::order() const {
  BigInt n = 1;
  for (const Level &lv : levels_)
    n *= static_cast<unsigned>(lv.transversal.size());
  return n;
}

void PermGroup::rebuild_orbit(size_t level) {
  Level &lv = levels_[level];
  lv.transversal.clear();
  lv.transversal.emplace(lv.base, perm_identity(degree_));
  std::vector<int> frontier{lv.base};
  while (!frontier.empty()) {
    int y = frontier.back();
    frontier.pop_back();
    const Perm u_y = lv.transversal.at(y);
    for (const Perm &s : lv.gens) {
      int z = s[static_cast<size_t>(y)];
      if (!lv.transversal.count(z)) {
        lv.transversal.emplace(z, perm_compose(u_y, s));
        frontier.push_back(z);
      }
    }
  }
}

void PermGroup::insert_strong_generator(Perm r, size_t lo, size_t at) {
  if (at == levels_.size()) {
    Level lv;
    lv.base = first_moved(r);
    levels_.push_back(std::move(lv));
  }
  // r belongs to every level from lo up to at: it fixes all their earlier
  // bases, and even where it fixes the base itself it can still extend the
  // orbit through non-base points.
  for (size_t j = lo; j <= at; ++j)
    levels_[j].gens.push_back(r);
  for (size_t j = at + 1; j-- > lo;)
    fix_level(j);
}

void PermGroup::fix_level(size_t level) {
  rebuild_orbit(level);
  // Snapshot orbit and generators: insertions during the pass land strictly
  // deeper but may reallocate levels_, so no references are held across
  // them. This level's own gens and transversal stay fixed for the pass.
  std::vector<int> orbit;
  orbit.reserve(levels_[level].transversal.size());
  for (const auto &[pt, rep] : levels_[level].transversal)
    orbit.push_back(pt);
  std::sort(orbit.begin(), orbit.end());
  const std::vector<Perm> gens = levels_[level].gens;
  for (int y : orbit) {
    const Perm u_y = levels_[level].transversal.at(y);
    for (const Perm &s : gens) {
      int z = s[static_cast<size_t>(y)];
      Perm schreier = perm_compose(perm_compose(u_y, s),
                                   perm_inverse(levels_[level].transversal.at(z)));
      auto [rem, at] = sift(std::move(schreier), level + 1);
      if (!perm_is_identity(rem))
        insert_strong_generator(std::move(rem), level + 1, at);
    }
  }
}

void PermGroup::add_generator(const Perm &p) {
  if (static_cast<int>(p.size()) != degree_)
    throw std::invalid_argument("generator degree mismatch");
  if (perm_is_identity(p))
    return;
  gens_.push_back(p);
  auto [rem, at] = sift(p, 0);
  if (perm_is_identity(rem))
    return;
  insert_strong_generator(std::move(rem), 0, at);
}

PermGroup PermGroup::block_stabilizer(
    int degree, const std::vector<std::vector<int>> &blocks) {
  PermGroup g(degree);
  for (std::vector<int> block : blocks) {
    std::sort(block.begin(), block.end());
    if (!block.empty() &&
        (block.front() < 0 || block.back() >= degree))
      throw std::invalid_argument("block point out of range");
    const size_t k = block.size();
    if (k < 2)
      continue;
    for (size_t i = 0; i + 1 < k; ++i) {
      Perm t = perm_identity(degree);
      std::swap(t[static_cast<size_t>(block[i])],
                t[static_cast<size_t>(block[i + 1])]);
      g.gens_.push_back(std::move(t));
    }
    // Chain segment for Sym(block): base b_j has orbit {b_j..b_last} with
    // transposition representatives; level generators are the adjacent
    // transpositions of the tail, which fix every earlier base.
    for (size_t j = 0; j + 1 < k; ++j) {
      Level lv;
      lv.base = block[j];
      lv.transversal.emplace(block[j], perm_identity(degree));
      for (size_t i = j + 1; i < k; ++i) {
        Perm t = perm_identity(degree);
        std::swap(t[static_cast<size_t>(block[j])],
                  t[static_cast<size_t>(block[i])]);
        lv.transversal.emplace(block[i], std::move(t));
      }
      for (size_t i = j; i + 1 < k; ++i) {
        Perm t = perm_identity(degree);
        std::swap(t[static_cast<size_t>(block[i])],
                  t[static_cast<size_t>(block[i + 1])]);
        lv.gens.push_back(std::move(t));
      }
      g.levels_.push_back(std::move(lv));
    }
  }
  return g;
}

} // namespace pru
