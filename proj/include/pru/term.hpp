#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pru {

// Arity (dom, cod): a description names a function N^dom -> N^cod.
// Both components are at least 1; width-0 tuples are excluded by design.
struct Arity {
  int dom = 1;
  int cod = 1;

  friend bool operator==(const Arity &, const Arity &) = default;
};

std::string to_string(const Arity &a);

class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Ill-typed construction. `path` is the child-index route from the root of
// the offending construction to the subterm where checking failed.
class TypeError : public Error {
public:
  TypeError(const std::string &msg, std::vector<int> path = {})
      : Error(msg), path_(std::move(path)) {}
  const std::vector<int> &path() const { return path_; }

private:
  std::vector<int> path_;
};

class ParseError : public Error {
public:
  ParseError(const std::string &msg, int line, int col)
      : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

// Invalid request to a macro/constructor that is well-formed syntactically
// but out of range semantically (e.g. empty projection list).
class SpecError : public Error {
public:
  using Error::Error;
};

class PathError : public Error {
public:
  using Error::Error;
};

class ArityMismatch : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

class CapacityError : public Error {
public:
  using Error::Error;
};

enum class Kind : uint8_t { Z, S, Proj, Comp, Rec, Pair };

const char *to_string(Kind k);

// Immutable term of the description language. Copies are cheap handle
// copies; structural data is shared. Arity is checked once, at
// construction, which is the only site that can throw TypeError.
class Term {
public:
  Term() : Term(z()) {}

  static Term z();
  static Term s();
  static Term proj(int width, int index); // 1-based index, 1 <= index <= width
  static Term comp(const Term &outer, const Term &inner);
  static Term rec(const Term &base, const Term &step);
  static Term pair(const Term &first, const Term &second);

  Kind kind() const { return node_->kind; }
  Arity arity() const { return node_->arity; }
  int dom() const { return node_->arity.dom; }
  int cod() const { return node_->arity.cod; }

  // Node count and tree height, cached at construction.
  int size() const { return node_->size; }
  int depth() const { return node_->depth; }

  // Proj-only accessors.
  int proj_width() const;
  int proj_index() const;

  bool is_leaf() const { return node_->children.empty(); }
  int child_count() const { return static_cast<int>(node_->children.size()); }
  const Term &child(int i) const;

  size_t hash() const { return node_->hash; }

  // Structural equality.
  friend bool operator==(const Term &a, const Term &b);
  friend bool operator!=(const Term &a, const Term &b) { return !(a == b); }

private:
  struct Node {
    Kind kind;
    Arity arity;
    int proj_width = 0;
    int proj_index = 0;
    std::vector<Term> children;
    int size = 1;
    int depth = 1;
    size_t hash = 0;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(Node node);

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  size_t operator()(const Term &t) const { return t.hash(); }
};

// Recomputes the arity bottom-up, independently of the cached values.
// Throws TypeError (with a path from `t`) on any ill-typed node; used as a
// cross-check on construction-time typing.
Arity arity_of(const Term &t);

// Canonical textual form, parseable by parse(). Core constructors only:
// z, s, (pi w i), (comp g f), (rec f g), (pair f g).
std::string print(const Term &t);

// Total order: node count first, canonical text as tie-break.
bool term_less(const Term &a, const Term &b);
void sort_terms(std::vector<Term> &ts);

int size(const Term &t);
int depth(const Term &t);

// Subterm at a child-index path; empty path is the term itself.
// Throws PathError if the path leaves the tree.
Term subterm_at(const Term &t, std::span<const int> path);

// Replace the subterm at `path` with `replacement`, rebuilding (and hence
// re-typechecking) every node along the spine. Throws PathError on a bad
// path and TypeError if the replacement does not fit.
Term replace_at(const Term &t, std::span<const int> path,
                const Term &replacement);

// A tuple of projections out of a common width: x |-> (x_{o_1},...,x_{o_k}).
struct ProjSpec {
  int width = 0;
  std::vector<int> outputs; // 1-based, each in [1, width]

  friend bool operator==(const ProjSpec &, const ProjSpec &) = default;
};

// Right-nested pair of projections realizing `spec`; a single output is a
// bare projection. Throws SpecError on empty outputs or out-of-range data.
Term multi_proj(const ProjSpec &spec);
Term multi_proj(int width, const std::vector<int> &outputs);

Term identity(int n);               // (x_1..x_n) |-> (x_1..x_n)
Term diagonal(int n);               // (x) |-> (x, x), width n doubled
Term twist(int a, int b);           // (u, v) |-> (v, u), |u| = a, |v| = b
Term product(const Term &f, const Term &g); // acts on disjoint blocks

// Recognizes any Pair-tree of projections with a common source width,
// regardless of nesting shape. Returns false if `t` contains anything else.
bool multi_proj_spec(const Term &t, ProjSpec &out);

// Whether t denotes the identity on its domain via projections alone.
bool is_identity(const Term &t);

// If t is a block swap (u,v) |-> (v,u), yields the block widths (a, b)
// with a, b >= 1 and returns true.
bool twist_blocks(const Term &t, int &a, int &b);

} // namespace pru
