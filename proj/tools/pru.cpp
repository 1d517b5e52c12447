// Command-line front end: evaluation, equivalence checking, normalization,
// fragment enumeration, correspondence reports, and fuzzing.
//
// Exit codes: 0 equal/ok, 1 notequal or hard report failure, 2 usage or
// static error (parse/type/path/arity), 3 budget exhausted, 4 unknown
// verdict, 5 capacity exceeded.

#include "pru/galois.hpp"
#include "pru/parse.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

using nlohmann::json;
using namespace pru;

namespace {

struct Config {
  int grid = 4;
  uint64_t steps = 1'000'000;
  uint32_t bits = 4096;
  int caps_size = 11;
  int caps_count = 2000;
  std::string format = "text";
  uint64_t seed = 0;
  int max_size = 5;
  int max_width = 2;
  bool allow_rec = true;
  std::string universe = "Cat";

  Budget budget() const { return {steps, bits}; }
  ClosureCaps caps() const { return {caps_size, caps_count}; }
  FragmentParams fragment() const {
    return {max_size, max_width, allow_rec, grid, 20000};
  }
  bool json_out() const { return format == "json"; }
};

// PRU_CONFIG names a JSON config file with the same keys as the flags
// (an inline JSON object is also accepted). Flags override it.
void load_env_config(Config &cfg) {
  const char *env = std::getenv("PRU_CONFIG");
  if (!env || !*env)
    return;
  std::string text(env);
  if (text.front() != '{') {
    std::ifstream in(text);
    if (!in)
      throw SpecError("PRU_CONFIG file not readable: " + text);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j = json::parse(text);
  if (!j.is_object())
    throw SpecError("PRU_CONFIG must hold a JSON object");
  if (j.contains("grid"))
    cfg.grid = j["grid"].get<int>();
  if (j.contains("steps"))
    cfg.steps = j["steps"].get<uint64_t>();
  if (j.contains("bits"))
    cfg.bits = j["bits"].get<uint32_t>();
  if (j.contains("caps_size"))
    cfg.caps_size = j["caps_size"].get<int>();
  if (j.contains("caps_count"))
    cfg.caps_count = j["caps_count"].get<int>();
  if (j.contains("format"))
    cfg.format = j["format"].get<std::string>();
  if (j.contains("seed"))
    cfg.seed = j["seed"].get<uint64_t>();
  if (j.contains("max_size"))
    cfg.max_size = j["max_size"].get<int>();
  if (j.contains("max_width"))
    cfg.max_width = j["max_width"].get<int>();
  if (j.contains("allow_rec"))
    cfg.allow_rec = j["allow_rec"].get<bool>();
  if (j.contains("universe"))
    cfg.universe = j["universe"].get<std::string>();
  if (cfg.grid < 1 || cfg.steps < 1 || cfg.bits < 1 || cfg.caps_size < 1 ||
      cfg.caps_count < 1 || cfg.max_size < 1 || cfg.max_width < 1)
    throw SpecError("PRU_CONFIG bounds must be positive");
  if (cfg.format != "text" && cfg.format != "json")
    throw SpecError("PRU_CONFIG format must be text or json");
}

// A term argument is inline DSL text, or @path to read the DSL from a file.
Term term_arg(const std::string &arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in)
      throw SpecError("cannot read term file " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }
  return parse(arg);
}

Tuple parse_tuple(const std::string &text) {
  Tuple out;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    if (cur.empty() || cur.find_first_not_of("0123456789") != std::string::npos)
      throw SpecError("inputs must be comma-separated naturals, got '" + cur +
                      "'");
    out.emplace_back(cur);
  }
  if (out.empty())
    throw SpecError("empty input tuple");
  return out;
}

json nat_json(const Nat &n) {
  if (n <= std::numeric_limits<uint64_t>::max())
    return n.convert_to<uint64_t>();
  return nat_to_string(n);
}

std::string tuple_string(const Tuple &t) {
  std::string out;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i)
      out += ',';
    out += nat_to_string(t[i]);
  }
  return out;
}

std::vector<UniverseName> parse_universes(const std::string &list) {
  std::vector<UniverseName> out;
  std::string cur;
  std::stringstream ss(list);
  while (std::getline(ss, cur, ','))
    if (!cur.empty())
      out.push_back(universe_from_string(cur));
  return out;
}

int cmd_eval(const Config &cfg, const std::string &term_text,
             const std::string &input_text) {
  Term t = term_arg(term_text);
  Tuple in = parse_tuple(input_text);
  Tuple out = eval(t, in, cfg.budget());
  if (cfg.json_out()) {
    json jin = json::array(), jout = json::array();
    for (const Nat &n : in)
      jin.push_back(nat_json(n));
    for (const Nat &n : out)
      jout.push_back(nat_json(n));
    std::cout << json{{"term", print(t)},
                      {"arity", {t.dom(), t.cod()}},
                      {"input", jin},
                      {"output", jout}}
                     .dump()
              << "\n";
  } else {
    std::cout << tuple_string(out) << "\n";
  }
  return 0;
}

int cmd_check(const Config &cfg, const std::string &a_text,
              const std::string &b_text, bool witness) {
  UniverseName u = universe_from_string(cfg.universe);
  Term a = term_arg(a_text);
  Term b = term_arg(b_text);
  if (a.arity() != b.arity())
    throw ArityMismatch("terms have arities " + to_string(a.arity()) +
                        " and " + to_string(b.arity()));
  EquivVerdict v = equiv(a, b, u, cfg.caps(), cfg.grid, cfg.budget());
  if (cfg.json_out()) {
    std::cout << verdict_json(v, u, cfg.caps()).dump() << "\n";
  } else {
    const char *k = v.kind == EquivVerdict::Kind::Equal      ? "equal"
                    : v.kind == EquivVerdict::Kind::NotEqual ? "notequal"
                                                             : "unknown";
    std::cout << k;
    if (v.approximate)
      std::cout << " (approximate)";
    std::cout << "\n";
    if (!v.reason.empty())
      std::cout << "reason: " << v.reason << "\n";
    if (witness && !v.witness.empty()) {
      // Replay both sides of the valley so every intermediate is shown.
      Term ca = a, cb = b;
      std::cout << "a: " << print(ca) << "\n";
      std::cout << "b: " << print(cb) << "\n";
      for (const WitnessStep &ws : v.witness) {
        Term &cur = ws.from_b ? cb : ca;
        cur = apply_step(cur, ws.step);
        std::cout << (ws.from_b ? "b" : "a") << ": " << print(cur) << "  ["
                  << ws.step.rule << (ws.step.forward ? "" : " rev") << " @";
        if (ws.step.path.empty())
          std::cout << "root";
        for (int p : ws.step.path)
          std::cout << "." << p;
        std::cout << "]\n";
      }
      std::cout << "meet: " << print(ca) << "\n";
      if (!(ca == cb)) {
        std::cerr << "witness replay failed to meet\n";
        return 2;
      }
    }
  }
  switch (v.kind) {
  case EquivVerdict::Kind::Equal:
    return 0;
  case EquivVerdict::Kind::NotEqual:
    return 1;
  default:
    return 4;
  }
}

int cmd_normalize(const Config &cfg, const std::string &term_text,
                  bool show_steps) {
  UniverseName u = universe_from_string(cfg.universe);
  Term t = term_arg(term_text);
  NormalizeResult r;
  if (u == UniverseName::CatX || u == UniverseName::CatXN)
    r = normalize_best_effort(t);
  else
    r = normalize(t, u); // throws SpecError for non-normalizing universes
  if (cfg.json_out()) {
    json steps = json::array();
    for (const RewriteStep &s : r.steps)
      steps.push_back(step_json(s, false));
    std::cout << json{{"input", print(t)},
                      {"normal", print(r.term)},
                      {"steps", steps}}
                     .dump()
              << "\n";
  } else {
    std::cout << print(r.term) << "\n";
    if (show_steps)
      for (const RewriteStep &s : r.steps)
        std::cout << "  " << s.rule << (s.forward ? "" : " rev") << "\n";
  }
  return 0;
}

int cmd_enum(const Config &cfg, bool show_terms, const std::string &arity) {
  Fragment f = enumerate_fragment(cfg.fragment());
  int only_h = -1;
  if (!arity.empty()) {
    auto comma = arity.find(',');
    if (comma == std::string::npos)
      throw SpecError("--arity wants dom,cod");
    Arity a{std::stoi(arity.substr(0, comma)),
            std::stoi(arity.substr(comma + 1))};
    only_h = f.homset_index(a);
    if (only_h < 0)
      throw SpecError("no hom-set with arity " + to_string(a));
  }
  if (cfg.json_out()) {
    json homsets = json::array();
    for (size_t h = 0; h < f.homsets.size(); ++h) {
      if (only_h >= 0 && static_cast<int>(h) != only_h)
        continue;
      json entry = {{"arity",
                     {f.homset_arities[h].dom, f.homset_arities[h].cod}},
                    {"count", f.homsets[h].size()}};
      if (show_terms) {
        json terms = json::array();
        for (const Term &t : f.homsets[h])
          terms.push_back(print(t));
        entry["terms"] = std::move(terms);
      }
      homsets.push_back(std::move(entry));
    }
    std::cout << json{{"max_size", f.params.max_size},
                      {"max_width", f.params.max_width},
                      {"allow_rec", f.params.allow_rec},
                      {"total", f.total_terms},
                      {"homsets", homsets}}
                     .dump()
              << "\n";
  } else {
    for (size_t h = 0; h < f.homsets.size(); ++h) {
      if (only_h >= 0 && static_cast<int>(h) != only_h)
        continue;
      std::cout << to_string(f.homset_arities[h]) << ": "
                << f.homsets[h].size() << " terms\n";
      if (show_terms)
        for (const Term &t : f.homsets[h])
          std::cout << "  " << print(t) << "\n";
    }
    if (only_h < 0)
      std::cout << "total: " << f.total_terms << "\n";
  }
  return 0;
}

GaloisOptions galois_options(const Config &cfg, const std::string &universes,
                             int samples, int partition_samples,
                             bool rigidity) {
  GaloisOptions opts;
  opts.caps = cfg.caps();
  opts.budget = cfg.budget();
  opts.grid = cfg.grid;
  opts.subgroup_samples = samples;
  opts.partition_samples = partition_samples;
  opts.seed = cfg.seed;
  opts.universes = parse_universes(universes);
  opts.rigidity = rigidity;
  return opts;
}

OpSet parse_ops(const std::string &list) {
  OpSet ops{false, false, false};
  std::string cur;
  std::stringstream ss(list);
  while (std::getline(ss, cur, ',')) {
    if (cur == "comp")
      ops.comp = true;
    else if (cur == "rec")
      ops.rec = true;
    else if (cur == "pair")
      ops.pair = true;
    else if (!cur.empty())
      throw SpecError("unknown operation '" + cur + "' (comp, rec, pair)");
  }
  return ops;
}

int cmd_galois(const Config &cfg, const std::string &universes, int samples,
               int partition_samples, bool rigidity, const std::string &ops,
               bool fix_initials) {
  Fragment f = enumerate_fragment(cfg.fragment());
  GaloisOptions opts =
      galois_options(cfg, universes, samples, partition_samples, rigidity);
  GaloisReport rep = galois_check(f, opts);

  // Explicitly requested operation set: report the preserved subgroup of
  // the full symmetric product under exactly those operations.
  json op_report;
  if (!ops.empty() || fix_initials) {
    OpSet o = ops.empty() ? OpSet{} : parse_ops(ops);
    Partition trivial;
    trivial.block_of.resize(f.homsets.size());
    for (size_t h = 0; h < f.homsets.size(); ++h)
      trivial.block_of[h].assign(f.homsets[h].size(), 0);
    std::vector<std::vector<Perm>> correlated;
    PermGroupFamily sub =
        op_preserving_subgroup(full_stabilizer(f, trivial), f, o,
                               fix_initials, &correlated);
    op_report = {{"ops",
                  {{"comp", o.comp}, {"rec", o.rec}, {"pair", o.pair}}},
                 {"fix_initials", fix_initials},
                 {"order", sub.order().str()},
                 {"correlated_families", correlated.size()}};
  }

  if (cfg.json_out()) {
    json j = galois_json(f, rep);
    if (!op_report.is_null())
      j["op_preserving"] = op_report;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "fragment: size<=" << f.params.max_size << " width<="
              << f.params.max_width
              << (f.params.allow_rec ? "" : " rec-free") << ", "
              << f.total_terms << " terms\n";
    for (const auto &[u, upr] : rep.partitions) {
      int blocks = 0;
      for (const auto &hs : upr.partition.blocks())
        blocks += static_cast<int>(hs.size());
      std::cout << to_string(u) << ": " << blocks << " blocks, stabilizer order "
                << rep.stabilizer_orders.at(u).str()
                << (upr.truncated ? " (truncated)" : "") << "\n";
    }
    for (const GaloisCheck &c : rep.checks)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    for (const std::string &d : rep.defects)
      std::cout << "[WARN] " << d << "\n";
    if (!op_report.is_null())
      std::cout << "op-preserving subgroup order: "
                << op_report["order"].get<std::string>() << " ("
                << op_report["correlated_families"].get<size_t>()
                << " correlated families)\n";
  }
  return rep.hard_fail() ? 1 : 0;
}

int cmd_lattice(const Config &cfg, const std::string &universes) {
  Fragment f = enumerate_fragment(cfg.fragment());
  GaloisOptions opts = galois_options(cfg, universes, 0, 0, false);
  json j = lattice_report(f, opts);
  if (cfg.json_out()) {
    std::cout << j.dump() << "\n";
    return 0;
  }
  std::cout << "fragment: " << j["fragment"]["total"].get<int>()
            << " terms\n";
  for (const auto &node : j["nodes"]) {
    std::cout << "node " << node["id"].get<int>() << ":";
    for (const auto &u : node["universes"])
      std::cout << " " << u.get<std::string>();
    std::cout << "  (" << node["block_count"].get<int>() << " blocks, order "
              << node["stabilizer_order"].get<std::string>() << ")\n";
  }
  for (const auto &e : j["edges"]) {
    std::cout << e["from"].get<std::string>() << " -> "
              << e["to"].get<std::string>()
              << (e["strict"].get<bool>() ? "  strict" : "  collapsed");
    if (!e["witness"].is_null())
      std::cout << "  e.g. " << e["witness"]["terms"][0].get<std::string>()
                << " ~ " << e["witness"]["terms"][1].get<std::string>();
    std::cout << "\n";
  }
  if (!j["truncated"].empty()) {
    std::cout << "truncated:";
    for (const auto &u : j["truncated"])
      std::cout << " " << u.get<std::string>();
    std::cout << "\n";
  }
  return 0;
}

int cmd_fuzz(const Config &cfg, const std::string &target, int n) {
  std::cout << "seed: " << cfg.seed << "\n";
  TermGen gen(cfg.seed);
  GenParams gp{cfg.max_size * 5, std::max(cfg.max_width, 3), cfg.allow_rec};
  int failures = 0;

  if (target == "roundtrip") {
    for (int i = 0; i < n; ++i) {
      Term t = gen.term(1 + static_cast<int>(gen.rng()() % 25), gp);
      Term back = parse(print(t));
      if (!(back == t)) {
        ++failures;
        std::cout << "roundtrip mismatch: " << print(t) << "\n";
      }
    }
  } else if (target == "normalize") {
    for (int i = 0; i < n; ++i) {
      Term t = gen.term(1 + static_cast<int>(gen.rng()() % 17), gp);
      NormalizeResult r = normalize(t, UniverseName::Cat);
      NormalizeResult again = normalize(r.term, UniverseName::Cat);
      if (!(again.term == r.term)) {
        ++failures;
        std::cout << "not idempotent: " << print(t) << "\n";
        continue;
      }
      Fingerprint before = fingerprint(t, 3, cfg.budget());
      Fingerprint after = fingerprint(r.term, 3, cfg.budget());
      if (!before.partial && !after.partial && !(before == after)) {
        ++failures;
        std::cout << "semantics changed: " << print(t) << " vs "
                  << print(r.term) << "\n";
      }
    }
  } else if (target == "rules") {
    for (UniverseName u : all_universes()) {
      SoundnessReport rep = check_rule_soundness(
          u, n, cfg.grid, cfg.budget(), cfg.seed, InstanceBounds{});
      for (const auto &pr : rep.rules) {
        if (pr.skipped)
          continue;
        if (pr.failed) {
          ++failures;
          std::cout << to_string(u) << "/" << pr.rule << ": " << pr.failed
                    << " failures\n";
          for (const std::string &s : pr.failures)
            std::cout << "  " << s << "\n";
        }
      }
    }
  } else {
    throw SpecError("unknown fuzz target '" + target +
                    "' (roundtrip, normalize, rules)");
  }
  std::cout << (failures ? "FAIL" : "ok") << "\n";
  return failures ? 1 : 0;
}

} // namespace

int main(int argc, char **argv) {
  Config cfg;
  try {
    load_env_config(cfg);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"primitive recursive descriptions: evaluation, universes, "
               "and the partition/stabilizer correspondence"};
  app.require_subcommand(1);
  // Global options are accepted after the subcommand name too.
  app.fallthrough();
  app.add_option("--grid", cfg.grid, "fingerprint grid bound")
      ->capture_default_str();
  app.add_option("--steps", cfg.steps, "evaluation step budget")
      ->capture_default_str();
  app.add_option("--bits", cfg.bits, "magnitude budget in bits")
      ->capture_default_str();
  app.add_option("--caps-size", cfg.caps_size, "closure size cap")
      ->capture_default_str();
  app.add_option("--caps-count", cfg.caps_count, "closure count cap")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "output format: text or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  auto add_fragment_flags = [&](CLI::App *sub) {
    sub->add_option("--max-size", cfg.max_size, "fragment term size bound")
        ->capture_default_str();
    sub->add_option("--max-width", cfg.max_width, "fragment arity bound")
        ->capture_default_str();
    sub->add_flag("--rec,!--no-rec", cfg.allow_rec,
                  "allow recursion in the fragment");
  };

  // eval
  std::string term_text, input_text;
  CLI::App *eval_cmd = app.add_subcommand("eval", "evaluate a term on a tuple");
  eval_cmd->add_option("term", term_text, "term (inline DSL or @file)")
      ->required();
  eval_cmd->add_option("--in", input_text, "comma-separated input tuple")
      ->required();

  // check
  std::string a_text, b_text;
  bool witness = false;
  CLI::App *check_cmd =
      app.add_subcommand("check", "decide equivalence in a universe");
  check_cmd->add_option("a", a_text, "left term")->required();
  check_cmd->add_option("b", b_text, "right term")->required();
  check_cmd->add_option("-u,--universe", cfg.universe, "universe name")
      ->capture_default_str();
  check_cmd->add_flag("--witness", witness, "replay the equality witness");

  // normalize
  std::string norm_text;
  bool show_steps = false;
  CLI::App *norm_cmd =
      app.add_subcommand("normalize", "canonical or best-effort form");
  norm_cmd->add_option("term", norm_text, "term (inline DSL or @file)")
      ->required();
  norm_cmd->add_option("-u,--universe", cfg.universe, "universe name")
      ->capture_default_str();
  norm_cmd->add_flag("--show-steps", show_steps, "list applied rules");

  // enum
  bool show_terms = false;
  std::string arity_filter;
  CLI::App *enum_cmd =
      app.add_subcommand("enum", "enumerate the fragment's hom-sets");
  add_fragment_flags(enum_cmd);
  enum_cmd->add_flag("--terms", show_terms, "print every term");
  enum_cmd->add_option("--arity", arity_filter, "restrict to one hom-set: dom,cod");

  // galois
  std::string universes_list, ops_list;
  int samples = 20, partition_samples = 10;
  bool rigidity = true, fix_initials = false;
  CLI::App *galois_cmd = app.add_subcommand(
      "galois", "verify the partition/stabilizer correspondence");
  add_fragment_flags(galois_cmd);
  galois_cmd->add_option("--universes", universes_list,
                         "comma-separated universe names (default all)");
  galois_cmd->add_option("--samples", samples, "sampled generated subgroups")
      ->capture_default_str();
  galois_cmd
      ->add_option("--partition-samples", partition_samples,
                   "sampled partition refinements")
      ->capture_default_str();
  galois_cmd->add_flag("--rigidity,!--no-rigidity", rigidity,
                       "include the rigidity check");
  galois_cmd->add_option("--ops", ops_list,
                         "report the subgroup preserving these operations "
                         "(comp,rec,pair)");
  galois_cmd->add_flag("--fix-initials", fix_initials,
                       "require size-1 descriptions to stay fixed");

  // lattice
  std::string lattice_universes;
  CLI::App *lattice_cmd = app.add_subcommand(
      "lattice", "universes grouped by partition, with refinement edges");
  add_fragment_flags(lattice_cmd);
  lattice_cmd->add_option("--universes", lattice_universes,
                          "comma-separated universe names (default all)");

  // fuzz
  std::string fuzz_target;
  int fuzz_n = 100;
  CLI::App *fuzz_cmd =
      app.add_subcommand("fuzz", "randomized self-checks, seeded");
  fuzz_cmd
      ->add_option("target", fuzz_target,
                   "one of: roundtrip, normalize, rules")
      ->required();
  fuzz_cmd->add_option("--n", fuzz_n, "iterations per target or schema")
      ->capture_default_str();
  add_fragment_flags(fuzz_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(eval_cmd))
      return cmd_eval(cfg, term_text, input_text);
    if (app.got_subcommand(check_cmd))
      return cmd_check(cfg, a_text, b_text, witness);
    if (app.got_subcommand(norm_cmd))
      return cmd_normalize(cfg, norm_text, show_steps);
    if (app.got_subcommand(enum_cmd))
      return cmd_enum(cfg, show_terms, arity_filter);
    if (app.got_subcommand(galois_cmd))
      return cmd_galois(cfg, universes_list, samples, partition_samples,
                        rigidity, ops_list, fix_initials);
    if (app.got_subcommand(lattice_cmd))
      return cmd_lattice(cfg, lattice_universes);
    if (app.got_subcommand(fuzz_cmd))
      return cmd_fuzz(cfg, fuzz_target, fuzz_n);
  } catch (const BudgetExceeded &e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 3;
  } catch (const CapacityError &e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return 5;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
