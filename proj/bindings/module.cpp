// Python module exposing the main operations: term building and parsing,
// evaluation, fingerprints, equivalence in each universe, normalization,
// closures, fragment enumeration, and the correspondence reports.

#include "pru/galois.hpp"
#include "pru/parse.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pru;

namespace {

Nat nat_from_py(py::handle h) {
  if (!py::isinstance<py::int_>(h))
    throw py::type_error("inputs must be Python ints");
  // Through decimal text, so arbitrary-size ints survive.
  return Nat(py::cast<std::string>(py::str(h)));
}

py::object nat_to_py(const Nat &n) {
  return py::module_::import("builtins").attr("int")(nat_to_string(n));
}

py::object json_to_py(const nlohmann::json &j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Budget budget_of(uint64_t steps, uint32_t bits) { return {steps, bits}; }

UniverseName uni(const std::string &name) {
  return universe_from_string(name);
}

FragmentParams frag_params(int max_size, int max_width, bool allow_rec,
                           int grid) {
  FragmentParams p;
  p.max_size = max_size;
  p.max_width = max_width;
  p.allow_rec = allow_rec;
  p.grid = grid;
  return p;
}

// Convenience entry points take a Term or its textual form.
Term coerce_term(const py::object &o) {
  if (py::isinstance<Term>(o))
    return py::cast<Term>(o);
  if (py::isinstance<py::str>(o))
    return parse(py::cast<std::string>(o));
  throw py::type_error("expected a Term or a term string");
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "primitive recursive descriptions, algorithmic universes, and "
            "the partition/stabilizer correspondence";

  static py::exception<Error> exc_error(m, "Error");
  py::register_exception<TypeError>(m, "TypeError", exc_error);
  py::register_exception<ParseError>(m, "ParseError", exc_error);
  py::register_exception<SpecError>(m, "SpecError", exc_error);
  py::register_exception<PathError>(m, "PathError", exc_error);
  py::register_exception<ArityMismatch>(m, "ArityMismatch", exc_error);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", exc_error);
  py::register_exception<CapacityError>(m, "CapacityError", exc_error);

  py::class_<Term>(m, "Term")
      .def_property_readonly("dom", &Term::dom)
      .def_property_readonly("cod", &Term::cod)
      .def_property_readonly("size", &Term::size)
      .def_property_readonly("depth", &Term::depth)
      .def("__str__", [](const Term &t) { return print(t); })
      .def("__repr__", [](const Term &t) { return print(t); })
      .def("__eq__",
           [](const Term &a, py::object b) {
             return py::isinstance<Term>(b) && a == py::cast<Term>(b);
           })
      .def("__hash__", [](const Term &t) { return TermHash{}(t); });

  m.def("parse", [](const std::string &text) { return parse(text); },
        py::arg("text"), "parse the textual term language");
  m.def("z", &Term::z);
  m.def("s", &Term::s);
  m.def("proj", &Term::proj, py::arg("width"), py::arg("index"));
  m.def("comp", &Term::comp, py::arg("g"), py::arg("f"),
        "composition: f first, then g");
  m.def("rec", &Term::rec, py::arg("base"), py::arg("step"));
  m.def("pair", &Term::pair, py::arg("f"), py::arg("g"));
  m.def("identity", &identity, py::arg("width"));
  m.def("diagonal", &diagonal, py::arg("width"));
  m.def("twist", &twist, py::arg("a"), py::arg("b"));
  m.def("product", &product, py::arg("f"), py::arg("g"));

  m.def(
      "evaluate",
      [](const py::object &term, const py::sequence &inputs, uint64_t steps,
         uint32_t bits) {
        Term t = coerce_term(term);
        Tuple in;
        for (py::handle h : inputs)
          in.push_back(nat_from_py(h));
        Tuple out = eval(t, in, budget_of(steps, bits));
        py::list res;
        for (const Nat &n : out)
          res.append(nat_to_py(n));
        return res;
      },
      py::arg("term"), py::arg("inputs"), py::arg("steps") = 1'000'000,
      py::arg("bits") = 4096,
      "run a description on a tuple of naturals");

  m.def(
      "fingerprint",
      [](const py::object &term, int grid, uint64_t steps, uint32_t bits) {
        return json_to_py(fingerprint_json(
            fingerprint(coerce_term(term), grid, budget_of(steps, bits))));
      },
      py::arg("term"), py::arg("grid") = 4, py::arg("steps") = 1'000'000,
      py::arg("bits") = 4096, "value table on the grid, as a dict");

  m.def("universes", [] {
    std::vector<std::string> names;
    for (UniverseName u : all_universes())
      names.emplace_back(to_string(u));
    return names;
  });

  m.def(
      "check",
      [](const py::object &a, const py::object &b, const std::string &universe,
         int size_cap, int count_cap, int grid, uint64_t steps,
         uint32_t bits) {
        UniverseName u = uni(universe);
        ClosureCaps caps{size_cap, count_cap};
        EquivVerdict v = equiv(coerce_term(a), coerce_term(b), u, caps, grid,
                               budget_of(steps, bits));
        return json_to_py(verdict_json(v, u, caps));
      },
      py::arg("a"), py::arg("b"), py::arg("universe") = "Cat",
      py::arg("size_cap") = 11, py::arg("count_cap") = 2000,
      py::arg("grid") = 4, py::arg("steps") = 1'000'000,
      py::arg("bits") = 4096,
      "decide equivalence in a universe; returns the verdict as a dict");

  m.def(
      "normalize",
      [](const py::object &term, const std::string &universe) {
        Term t = coerce_term(term);
        UniverseName u = uni(universe);
        if (u == UniverseName::CatX || u == UniverseName::CatXN)
          return normalize_best_effort(t).term;
        return normalize(t, u).term;
      },
      py::arg("term"), py::arg("universe") = "Cat",
      "canonical form (C, I, Cat) or best-effort form (CatX, CatXN)");

  m.def(
      "closure",
      [](const py::object &term, const std::string &universe, int size_cap,
         int count_cap) {
        ClosureResult r =
            closure(coerce_term(term), uni(universe), {size_cap, count_cap});
        return py::make_tuple(r.terms, r.complete);
      },
      py::arg("term"), py::arg("universe"), py::arg("size_cap") = 11,
      py::arg("count_cap") = 2000,
      "terms reachable by rewriting, and whether the search completed");

  m.def(
      "fragment",
      [](int max_size, int max_width, bool allow_rec) {
        Fragment f = enumerate_fragment(
            frag_params(max_size, max_width, allow_rec, 4));
        py::dict d;
        for (size_t h = 0; h < f.homsets.size(); ++h)
          d[py::make_tuple(f.homset_arities[h].dom,
                           f.homset_arities[h].cod)] = f.homsets[h];
        return d;
      },
      py::arg("max_size") = 5, py::arg("max_width") = 2,
      py::arg("allow_rec") = true,
      "all well-typed terms within the bounds, keyed by (dom, cod)");

  m.def(
      "galois",
      [](int max_size, int max_width, bool allow_rec, int grid, int size_cap,
         int count_cap, int samples, int partition_samples, uint64_t seed,
         const std::vector<std::string> &universes, bool rigidity) {
        Fragment f = enumerate_fragment(
            frag_params(max_size, max_width, allow_rec, grid));
        GaloisOptions opts;
        opts.caps = {size_cap, count_cap};
        opts.grid = grid;
        opts.subgroup_samples = samples;
        opts.partition_samples = partition_samples;
        opts.seed = seed;
        for (const std::string &name : universes)
          opts.universes.push_back(uni(name));
        opts.rigidity = rigidity;
        return json_to_py(galois_json(f, galois_check(f, opts)));
      },
      py::arg("max_size") = 5, py::arg("max_width") = 2,
      py::arg("allow_rec") = true, py::arg("grid") = 4,
      py::arg("size_cap") = 11, py::arg("count_cap") = 2000,
      py::arg("samples") = 20, py::arg("partition_samples") = 10,
      py::arg("seed") = 0,
      py::arg("universes") = std::vector<std::string>{},
      py::arg("rigidity") = true,
      "verify the partition/stabilizer correspondence; returns the report");

  m.def(
      "lattice",
      [](int max_size, int max_width, bool allow_rec, int grid, int size_cap,
         int count_cap, const std::vector<std::string> &universes) {
        Fragment f = enumerate_fragment(
            frag_params(max_size, max_width, allow_rec, grid));
        GaloisOptions opts;
        opts.caps = {size_cap, count_cap};
        opts.grid = grid;
        for (const std::string &name : universes)
          opts.universes.push_back(uni(name));
        return json_to_py(lattice_report(f, opts));
      },
      py::arg("max_size") = 5, py::arg("max_width") = 2,
      py::arg("allow_rec") = true, py::arg("grid") = 4,
      py::arg("size_cap") = 11, py::arg("count_cap") = 2000,
      py::arg("universes") = std::vector<std::string>{},
      "universes grouped by partition, with refinement edges");

  m.def(
      "rule_soundness",
      [](const std::string &universe, int per_schema, int grid,
         uint64_t seed) {
        SoundnessReport rep =
            check_rule_soundness(uni(universe), per_schema, grid, {}, seed);
        py::list rules;
        for (const auto &pr : rep.rules) {
          py::dict d;
          d["rule"] = pr.rule;
          d["skipped"] = pr.skipped;
          d["requested"] = pr.requested;
          d["passed"] = pr.passed;
          d["failed"] = pr.failed;
          d["inconclusive"] = pr.inconclusive;
          rules.append(std::move(d));
        }
        return py::make_tuple(rules, rep.all_passed());
      },
      py::arg("universe"), py::arg("per_schema") = 50, py::arg("grid") = 4,
      py::arg("seed") = 0,
      "sample rule instances and compare fingerprints");
}
