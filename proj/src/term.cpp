#include "pru/term.hpp"

#include <algorithm>
#include <sstream>

namespace pru {

std::string to_string(const Arity &a) {
  return "(" + std::to_string(a.dom) + " -> " + std::to_string(a.cod) + ")";
}

const char *to_string(Kind k) {
  switch (k) {
  case Kind::Z:
    return "z";
  case Kind::S:
    return "s";
  case Kind::Proj:
    return "pi";
  case Kind::Comp:
    return "comp";
  case Kind::Rec:
    return "rec";
  case Kind::Pair:
    return "pair";
  }
  return "?";
}

namespace {

// Widths are bounded to keep arities in safe int range; real terms sit far
// below this.
constexpr int kMaxWidth = 1 << 16;

void check_width(int w, const char *what) {
  if (w < 1 || w > kMaxWidth)
    throw SpecError(std::string(what) + " width " + std::to_string(w) +
                    " out of range [1, " + std::to_string(kMaxWidth) + "]");
}

size_t hash_mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

} // namespace

Term Term::make(Node node) {
  size_t h = hash_mix(0, static_cast<size_t>(node.kind));
  h = hash_mix(h, static_cast<size_t>(node.proj_width));
  h = hash_mix(h, static_cast<size_t>(node.proj_index));
  int sz = 1;
  int dp = 0;
  for (const Term &c : node.children) {
    h = hash_mix(h, c.hash());
    sz += c.size();
    dp = std::max(dp, c.depth());
  }
  node.hash = h;
  node.size = sz;
  node.depth = dp + 1;
  return Term(std::make_shared<const Node>(std::move(node)));
}

Term Term::z() {
  static const Term t = make(Node{Kind::Z, Arity{1, 1}});
  return t;
}

Term Term::s() {
  static const Term t = make(Node{Kind::S, Arity{1, 1}});
  return t;
}

Term Term::proj(int width, int index) {
  if (width < 1 || width > kMaxWidth)
    throw TypeError("projection width " + std::to_string(width) +
                    " out of range");
  if (index < 1 || index > width)
    throw TypeError("projection index " + std::to_string(index) +
                    " out of range [1, " + std::to_string(width) + "]");
  Node n{Kind::Proj, Arity{width, 1}};
  n.proj_width = width;
  n.proj_index = index;
  return make(std::move(n));
}

Term Term::comp(const Term &outer, const Term &inner) {
  if (inner.cod() != outer.dom())
    throw TypeError("composition mismatch: inner " + to_string(inner.arity()) +
                    " feeds outer " + to_string(outer.arity()));
  Node n{Kind::Comp, Arity{inner.dom(), outer.cod()}};
  n.children = {outer, inner};
  return make(std::move(n));
}

Term Term::rec(const Term &base, const Term &step) {
  const Arity fa = base.arity();
  const Arity ga = step.arity();
  if (ga.dom != fa.dom + fa.cod || ga.cod != fa.cod)
    throw TypeError("recursion mismatch: base " + to_string(fa) +
                    " needs step (" + std::to_string(fa.dom + fa.cod) +
                    " -> " + std::to_string(fa.cod) + "), got " +
                    to_string(ga));
  Node n{Kind::Rec, Arity{fa.dom + 1, fa.cod}};
  n.children = {base, step};
  return make(std::move(n));
}

Term Term::pair(const Term &first, const Term &second) {
  if (first.dom() != second.dom())
    throw TypeError("pair mismatch: " + to_string(first.arity()) + " vs " +
                    to_string(second.arity()));
  Node n{Kind::Pair, Arity{first.dom(), first.cod() + second.cod()}};
  n.children = {first, second};
  return make(std::move(n));
}

int Term::proj_width() const {
  if (kind() != Kind::Proj)
    throw Error("proj_width on non-projection");
  return node_->proj_width;
}

int Term::proj_index() const {
  if (kind() != Kind::Proj)
    throw Error("proj_index on non-projection");
  return node_->proj_index;
}

const Term &Term::child(int i) const {
  if (i < 0 || i >= child_count())
    throw PathError("child index " + std::to_string(i) + " out of range");
  return node_->children[static_cast<size_t>(i)];
}

bool operator==(const Term &a, const Term &b) {
  if (a.node_ == b.node_)
    return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind ||
      a.node_->size != b.node_->size)
    return false;
  if (a.node_->kind == Kind::Proj)
    return a.node_->proj_width == b.node_->proj_width &&
           a.node_->proj_index == b.node_->proj_index;
  for (size_t i = 0; i < a.node_->children.size(); ++i)
    if (!(a.node_->children[i] == b.node_->children[i]))
      return false;
  return true;
}

namespace {

Arity arity_of_at(const Term &t, std::vector<int> &path) {
  switch (t.kind()) {
  case Kind::Z:
  case Kind::S:
    return {1, 1};
  case Kind::Proj:
    if (t.proj_index() < 1 || t.proj_index() > t.proj_width())
      throw TypeError("projection index out of range", path);
    return {t.proj_width(), 1};
  case Kind::Comp: {
    path.push_back(0);
    Arity g = arity_of_at(t.child(0), path);
    path.back() = 1;
    Arity f = arity_of_at(t.child(1), path);
    path.pop_back();
    if (f.cod != g.dom)
      throw TypeError("composition mismatch", path);
    return {f.dom, g.cod};
  }
  case Kind::Rec: {
    path.push_back(0);
    Arity f = arity_of_at(t.child(0), path);
    path.back() = 1;
    Arity g = arity_of_at(t.child(1), path);
    path.pop_back();
    if (g.dom != f.dom + f.cod || g.cod != f.cod)
      throw TypeError("recursion mismatch", path);
    return {f.dom + 1, f.cod};
  }
  case Kind::Pair: {
    path.push_back(0);
    Arity f = arity_of_at(t.child(0), path);
    path.back() = 1;
    Arity g = arity_of_at(t.child(1), path);
    path.pop_back();
    if (f.dom != g.dom)
      throw TypeError("pair mismatch", path);
    return {f.dom, f.cod + g.cod};
  }
  }
  throw TypeError("unknown node kind", path);
}

void print_into(const Term &t, std::string &out) {
  switch (t.kind()) {
  case Kind::Z:
    out += 'z';
    return;
  case Kind::S:
    out += 's';
    return;
  case Kind::Proj:
    out += "(pi ";
    out += std::to_string(t.proj_width());
    out += ' ';
    out += std::to_string(t.proj_index());
    out += ')';
    return;
  case Kind::Comp:
  case Kind::Rec:
  case Kind::Pair:
    out += '(';
    out += to_string(t.kind());
    out += ' ';
    print_into(t.child(0), out);
    out += ' ';
    print_into(t.child(1), out);
    out += ')';
    return;
  }
}

} // namespace

Arity arity_of(const Term &t) {
  std::vector<int> path;
  return arity_of_at(t, path);
}

std::string print(const Term &t) {
  std::string out;
  out.reserve(static_cast<size_t>(t.size()) * 8);
  print_into(t, out);
  return out;
}

bool term_less(const Term &a, const Term &b) {
  if (a.size() != b.size())
    return a.size() < b.size();
  return print(a) < print(b);
}

void sort_terms(std::vector<Term> &ts) {
  std::sort(ts.begin(), ts.end(), term_less);
}

int size(const Term &t) { return t.size(); }
int depth(const Term &t) { return t.depth(); }

Term subterm_at(const Term &t, std::span<const int> path) {
  Term cur = t;
  for (size_t k = 0; k < path.size(); ++k) {
    int i = path[k];
    if (i < 0 || i >= cur.child_count())
      throw PathError("path step " + std::to_string(k) + " (child " +
                      std::to_string(i) + ") leaves the tree");
    cur = cur.child(i);
  }
  return cur;
}

Term replace_at(const Term &t, std::span<const int> path,
                const Term &replacement) {
  if (path.empty())
    return replacement;
  int i = path[0];
  if (i < 0 || i >= t.child_count())
    throw PathError("path step (child " + std::to_string(i) +
                    ") leaves the tree");
  Term sub = replace_at(t.child(i), path.subspan(1), replacement);
  Term left = i == 0 ? sub : t.child(0);
  Term right = i == 1 ? sub : t.child(1);
  switch (t.kind()) {
  case Kind::Comp:
    return Term::comp(left, right);
  case Kind::Rec:
    return Term::rec(left, right);
  case Kind::Pair:
    return Term::pair(left, right);
  default:
    throw PathError("path descends into a leaf");
  }
}

Term multi_proj(const ProjSpec &spec) {
  check_width(spec.width, "projection source");
  if (spec.outputs.empty())
    throw SpecError("projection tuple needs at least one output");
  for (int o : spec.outputs)
    if (o < 1 || o > spec.width)
      throw SpecError("projection output " + std::to_string(o) +
                      " out of range [1, " + std::to_string(spec.width) + "]");
  // Right-nested: <p_1, <p_2, <... p_k>>>.
  Term acc = Term::proj(spec.width, spec.outputs.back());
  for (size_t i = spec.outputs.size() - 1; i-- > 0;)
    acc = Term::pair(Term::proj(spec.width, spec.outputs[i]), acc);
  return acc;
}

Term multi_proj(int width, const std::vector<int> &outputs) {
  return multi_proj(ProjSpec{width, outputs});
}

Term identity(int n) {
  check_width(n, "identity");
  std::vector<int> outs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    outs[static_cast<size_t>(i)] = i + 1;
  return multi_proj(n, outs);
}

Term diagonal(int n) {
  check_width(n, "diagonal");
  std::vector<int> outs;
  outs.reserve(static_cast<size_t>(2 * n));
  for (int r = 0; r < 2; ++r)
    for (int i = 1; i <= n; ++i)
      outs.push_back(i);
  return multi_proj(n, outs);
}

Term twist(int a, int b) {
  check_width(a, "twist first block");
  check_width(b, "twist second block");
  std::vector<int> outs;
  outs.reserve(static_cast<size_t>(a + b));
  for (int i = a + 1; i <= a + b; ++i)
    outs.push_back(i);
  for (int i = 1; i <= a; ++i)
    outs.push_back(i);
  return multi_proj(a + b, outs);
}

Term product(const Term &f, const Term &g) {
  const int a = f.dom(), c = g.dom();
  if (a + c > kMaxWidth)
    throw SpecError("product domain too wide");
  std::vector<int> left(static_cast<size_t>(a)), right(static_cast<size_t>(c));
  for (int i = 0; i < a; ++i)
    left[static_cast<size_t>(i)] = i + 1;
  for (int i = 0; i < c; ++i)
    right[static_cast<size_t>(i)] = a + i + 1;
  return Term::pair(Term::comp(f, multi_proj(a + c, left)),
                    Term::comp(g, multi_proj(a + c, right)));
}

namespace {

bool collect_proj_outputs(const Term &t, int &width, std::vector<int> &outs) {
  if (t.kind() == Kind::Proj) {
    if (width == 0)
      width = t.proj_width();
    else if (width != t.proj_width())
      return false;
    outs.push_back(t.proj_index());
    return true;
  }
  if (t.kind() == Kind::Pair)
    return collect_proj_outputs(t.child(0), width, outs) &&
           collect_proj_outputs(t.child(1), width, outs);
  return false;
}

} // namespace

bool multi_proj_spec(const Term &t, ProjSpec &out) {
  int width = 0;
  std::vector<int> outs;
  if (!collect_proj_outputs(t, width, outs))
    return false;
  out.width = width;
  out.outputs = std::move(outs);
  return true;
}

bool is_identity(const Term &t) {
  ProjSpec spec;
  if (!multi_proj_spec(t, spec))
    return false;
  if (static_cast<int>(spec.outputs.size()) != spec.width)
    return false;
  for (int i = 0; i < spec.width; ++i)
    if (spec.outputs[static_cast<size_t>(i)] != i + 1)
      return false;
  return true;
}

bool twist_blocks(const Term &t, int &a, int &b) {
  ProjSpec spec;
  if (!multi_proj_spec(t, spec))
    return false;
  const int n = spec.width;
  if (static_cast<int>(spec.outputs.size()) != n || n < 2)
    return false;
  const int first = spec.outputs[0];
  if (first < 2) // a >= 1 forces first output a+1 >= 2
    return false;
  const int ca = first - 1;
  const int cb = n - ca;
  if (cb < 1)
    return false;
  for (int i = 0; i < cb; ++i)
    if (spec.outputs[static_cast<size_t>(i)] != ca + 1 + i)
      return false;
  for (int i = 0; i < ca; ++i)
    if (spec.outputs[static_cast<size_t>(cb + i)] != i + 1)
      return false;
  a = ca;
  b = cb;
  return true;
}

} // namespace pru
