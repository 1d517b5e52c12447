#include "pru/semantics.hpp"

#include <nlohmann/json.hpp>

namespace pru {

namespace {

struct EvalCtx {
  const Budget &budget;
  uint64_t steps = 0;

  void tick() {
    if (++steps > budget.max_steps)
      throw BudgetExceeded("evaluation exceeded " +
                           std::to_string(budget.max_steps) + " steps");
  }

  void check_magnitude(const Nat &v) const {
    if (msb_bits(v) > budget.max_magnitude_bits)
      throw BudgetExceeded("value exceeded " +
                           std::to_string(budget.max_magnitude_bits) +
                           " bits");
  }

  static uint32_t msb_bits(const Nat &v) {
    if (v == 0)
      return 0;
    return static_cast<uint32_t>(boost::multiprecision::msb(v)) + 1;
  }
};

Tuple eval_node(const Term &t, const Tuple &x, EvalCtx &ctx) {
  ctx.tick();
  switch (t.kind()) {
  case Kind::Z:
    return {Nat(0)};
  case Kind::S: {
    Nat v = x[0] + 1;
    ctx.check_magnitude(v);
    return {std::move(v)};
  }
  case Kind::Proj:
    return {x[static_cast<size_t>(t.proj_index()) - 1]};
  case Kind::Comp:
    return eval_node(t.child(0), eval_node(t.child(1), x, ctx), ctx);
  case Kind::Pair: {
    Tuple left = eval_node(t.child(0), x, ctx);
    Tuple right = eval_node(t.child(1), x, ctx);
    left.insert(left.end(), std::make_move_iterator(right.begin()),
                std::make_move_iterator(right.end()));
    return left;
  }
  case Kind::Rec: {
    // h(x, 0) = f(x); h(x, n+1) = g(x, h(x, n)). Iterate on the counter
    // (last coordinate) rather than recursing, so huge counters cost steps
    // but not stack.
    const Term &base = t.child(0);
    const Term &step = t.child(1);
    const size_t head_w = x.size() - 1;
    const Nat &n = x.back();
    Tuple head(x.begin(), x.end() - 1);
    Tuple acc = eval_node(base, head, ctx);
    Tuple args(static_cast<size_t>(step.dom()));
    for (Nat i = 0; i < n; ++i) {
      for (size_t k = 0; k < head_w; ++k)
        args[k] = head[k];
      for (size_t k = 0; k < acc.size(); ++k)
        args[head_w + k] = std::move(acc[k]);
      acc = eval_node(step, args, ctx);
    }
    return acc;
  }
  }
  throw Error("unknown node kind in eval");
}

} // namespace

Tuple eval(const Term &t, const Tuple &x, const Budget &budget) {
  if (static_cast<int>(x.size()) != t.dom())
    throw ArityMismatch("input width " + std::to_string(x.size()) +
                        " does not match domain " + std::to_string(t.dom()));
  EvalCtx ctx{budget};
  for (const Nat &v : x) {
    if (v < 0)
      throw Error("inputs must be non-negative");
    ctx.check_magnitude(v);
  }
  return eval_node(t, x, ctx);
}

Fingerprint fingerprint(const Term &t, int grid, const Budget &budget) {
  if (grid < 1)
    throw SpecError("fingerprint grid must be at least 1");
  const int dom = t.dom();
  double cells_d = 1;
  for (int i = 0; i < dom; ++i)
    cells_d *= grid;
  if (cells_d > 4e6)
    throw SpecError("fingerprint grid " + std::to_string(grid) + "^" +
                    std::to_string(dom) + " is too large");
  const size_t cells = static_cast<size_t>(cells_d);

  Fingerprint fp;
  fp.arity = t.arity();
  fp.grid = grid;
  fp.table.resize(cells);

  Tuple x(static_cast<size_t>(dom), Nat(0));
  for (size_t cell = 0; cell < cells; ++cell) {
    try {
      fp.table[cell] = eval(t, x, budget); // fresh budget per cell
    } catch (const BudgetExceeded &) {
      fp.table[cell] = std::nullopt;
      fp.partial = true;
    }
    // Odometer over {0..grid-1}^dom, rightmost coordinate fastest.
    for (int i = dom - 1; i >= 0; --i) {
      Nat &c = x[static_cast<size_t>(i)];
      if (c + 1 < grid) {
        ++c;
        break;
      }
      c = 0;
    }
  }
  return fp;
}

bool semantically_equal_on(const Term &a, const Term &b, int grid,
                           const Budget &budget) {
  if (a.arity() != b.arity())
    throw ArityMismatch("cannot compare " + to_string(a.arity()) + " with " +
                        to_string(b.arity()));
  Fingerprint fa = fingerprint(a, grid, budget);
  if (fa.partial)
    return false;
  Fingerprint fb = fingerprint(b, grid, budget);
  return !fb.partial && fa == fb;
}

std::string nat_to_string(const Nat &n) { return n.str(); }

nlohmann::json fingerprint_json(const Fingerprint &fp) {
  nlohmann::json j;
  j["arity"] = {fp.arity.dom, fp.arity.cod};
  j["grid"] = fp.grid;
  nlohmann::json table = nlohmann::json::array();
  for (const auto &cell : fp.table) {
    if (!cell) {
      table.push_back(nullptr);
      continue;
    }
    nlohmann::json row = nlohmann::json::array();
    for (const Nat &v : *cell) {
      if (v <= std::numeric_limits<uint64_t>::max())
        row.push_back(static_cast<uint64_t>(v));
      else
        row.push_back(v.str());
    }
    table.push_back(std::move(row));
  }
  j["table"] = std::move(table);
  j["partial"] = fp.partial;
  return j;
}

} // namespace pru
