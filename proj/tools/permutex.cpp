// permutex: command-line front end.
//
// Exit codes: 0 property holds / analysis done, 1 property violated or
// counterexample found, 2 usage, parse, resolution or structural error.
// Every command prints human-readable lines followed by one machine line
// "@report {...}"; with --quiet only the JSON is printed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "permutex/algebra.hpp"
#include "permutex/diagrams.hpp"
#include "permutex/errors.hpp"
#include "permutex/io.hpp"
#include "permutex/relexpr.hpp"
#include "permutex/search.hpp"

using json   = nlohmann::ordered_json;
using namespace permutex;

namespace {

  bool quiet = false;

  // Human text goes through here so --quiet can drop it.
  std::ostringstream human;

  int finish(json const& report, int code) {
    if (quiet) {
      std::cout << report.dump() << "\n";
    } else {
      std::cout << human.str() << "@report " << report.dump() << "\n";
    }
    return code;
  }

  json cell_json(std::pair<Element, Element> p) {
    return json::array({p.first, p.second});
  }

  std::string cell_text(std::pair<Element, Element> p) {
    return "(" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")";
  }

  ////////////////////////////////////////////////////////////////////////

  struct ClassifyArgs {
    std::string file;
    std::size_t budget = default_term_budget;
  };

  int run_classify(ClassifyArgs const& args) {
    FiniteAlgebra a      = load_algebra(args.file);
    auto          result = permutability_class(a);
    json          report = {{"command", "classify"},
                            {"algebra", a.name()},
                            {"carrier", a.size()},
                            {"class", to_string(result.cls)}};
    human << "algebra: " << a.name() << " (" << a.size() << " elements)\n";

    std::string term;
    std::string term_note;
    try {
      auto t = find_maltsev_term(a, args.budget);
      term   = t.witness ? "found" : "none";
      report["closure_size"] = t.closure_size;
      term_note = t.witness ? "maltsev term found" : "no maltsev term";
    } catch (ResourceError const&) {
      term      = "unknown";
      term_note = "maltsev term unknown (budget of " + std::to_string(args.budget)
                  + " term operations exhausted)";
    }
    report["maltsev_term"] = term;
    report["budget"]       = args.budget;

    human << to_string(result.cls) << "; " << term_note << "\n";
    if (result.witness) {
      auto const& w = *result.witness;
      bool const  two = result.cls == PermutabilityClass::three_permutable_not_two;
      human << "witness: alpha = " << w.alpha.to_string() << ", beta = " << w.beta.to_string()
            << ", " << cell_text(w.cell) << (two ? " in alpha.beta but not beta.alpha"
                                                 : " in alpha.beta.alpha but not beta.alpha.beta")
            << "\n";
      report["witness"] = {{"alpha", w.alpha.to_string()},
                           {"beta", w.beta.to_string()},
                           {"cell", cell_json(w.cell)}};
    } else {
      report["witness"] = nullptr;
    }
    human << "note: the class describes this algebra's congruence lattice, not its variety\n";
    return finish(report, 0);
  }

  ////////////////////////////////////////////////////////////////////////

  struct CongruenceArgs {
    std::string file;
    std::string strategy = "auto";
  };

  int run_congruences(CongruenceArgs const& args) {
    FiniteAlgebra      a = load_algebra(args.file);
    CongruenceStrategy strategy =
        args.strategy == "partitions"        ? CongruenceStrategy::partitions
        : args.strategy == "principal-joins" ? CongruenceStrategy::principal_joins
                                             : CongruenceStrategy::automatic;
    auto congruences = all_congruences(a, strategy);
    json list        = json::array();
    human << a.name() << ": " << congruences.size() << " congruences\n";
    for (auto const& theta : congruences) {
      human << "  " << theta.to_string() << "\n";
      list.push_back(theta.to_string());
    }
    return finish({{"command", "congruences"},
                   {"algebra", a.name()},
                   {"count", congruences.size()},
                   {"congruences", list}},
                  0);
  }

  ////////////////////////////////////////////////////////////////////////

  int run_maltsev_term(ClassifyArgs const& args) {
    FiniteAlgebra a      = load_algebra(args.file);
    json          report = {{"command", "maltsev-term"}, {"algebra", a.name()}, {"budget", args.budget}};
    try {
      auto t                 = find_maltsev_term(a, args.budget);
      report["closure_size"] = t.closure_size;
      if (t.witness) {
        report["result"] = "found";
        report["table"]  = *t.witness;
        human << "maltsev term found among " << t.closure_size << " ternary term operations\n";
        std::size_t const n = a.size();
        for (std::size_t x = 0; x < n; ++x) {
          human << "  p(" << x << ", -, -):";
          for (std::size_t y = 0; y < n; ++y) {
            human << (y == 0 ? " " : " | ");
            for (std::size_t z = 0; z < n; ++z) {
              human << (z == 0 ? "" : " ") << (*t.witness)[(x * n + y) * n + z];
            }
          }
          human << "\n";
        }
      } else {
        report["result"] = "none";
        human << "no maltsev term: the " << t.closure_size
              << " ternary term operations contain none\n";
      }
    } catch (ResourceError const&) {
      report["result"] = "unknown";
      human << "unknown: budget of " << args.budget << " term operations exhausted\n";
    }
    return finish(report, 0);
  }

  ////////////////////////////////////////////////////////////////////////

  struct CheckArgs {
    std::string file;
    std::string property;
  };

  std::string default_property(std::string const& shape) {
    if (shape == "square") {
      return "regular-pushout";
    }
    if (shape == "fork") {
      return "exact-fork";
    }
    return shape;
  }

  std::string required_shape(std::string const& property) {
    if (property == "regular-pushout") {
      return "square";
    }
    if (property == "exact-fork") {
      return "fork";
    }
    return property;
  }

  int run_check(CheckArgs const& args) {
    LabeledDiagram d        = load_diagram(args.file);
    std::string    property = args.property.empty() ? default_property(d.shape) : args.property;
    if (required_shape(property) != d.shape) {
      throw StructuralError("property " + property + " needs a " + required_shape(property)
                            + " diagram, got a " + d.shape);
    }
    json report = {{"command", "check"}, {"property", property}, {"shape", d.shape}};
    bool holds  = true;
    json highlight = json::array();

    if (property == "regular-pushout") {
      SquareDiagram sq  = square_from(d);
      bool          epi = is_regular_pushout(sq);
      bool          rel = regular_pushout_relational(sq);
      holds             = epi;
      report["pairing_onto"] = epi;
      report["relational"]   = rel;
      human << "comparison C -> D x_B A onto: " << (epi ? "yes" : "no") << "\n";
      human << "c g° = f° d: " << (rel ? "yes" : "no") << "\n";
      if (epi != rel) {
        throw Error("internal: the two regular-pushout checks disagree");
      }
      if (!holds) {
        highlight = {"g", "c"};
      }
    } else if (property == "cube") {
      CubeDiagram cube = cube_from(d);
      auto        cmp  = cube_comparison(cube);
      holds            = cmp.is_epi;
      report["comparison_onto"] = cmp.is_epi;
      report["v"]               = cmp.v.table();
      human << "comparison v: V -> X onto: " << (cmp.is_epi ? "yes" : "no") << "\n";
      human << "v = " << cmp.v.to_string() << "\n";
      if (!holds) {
        highlight = {"v"};
      }
    } else if (property == "cuboid") {
      CuboidDiagram cuboid = cuboid_from(d);
      CuboidReport  r      = check_cuboid(cuboid);
      holds                = r.conforms;
      report["split"]                  = cuboid.is_split();
      report["lower_exact"]            = r.lower_exact;
      report["upper_exact"]            = r.upper_exact;
      report["middle_rows_exact"]      = r.middle_rows_exact;
      report["diamonds_are_pullbacks"] = r.diamonds_are_pullbacks;
      report["v_surjective"]           = r.v_surjective;
      report["top_is_kernel_pair"]     = r.top_is_kernel_pair;
      human << "lower row exact: " << (r.lower_exact ? "yes" : "no") << "\n";
      human << "upper row exact: " << (r.upper_exact ? "yes" : "no") << " (v onto: "
            << (r.v_surjective ? "yes" : "no")
            << ", (t1, t2) tabulates R_v: " << (r.top_is_kernel_pair ? "yes" : "no") << ")\n";
      if (!holds) {
        highlight = {"t1", "t2", "v"};
      }
    } else if (property == "exact-fork") {
      Fork fork = fork_from(d);
      holds     = is_exact_fork(fork);
      human << "fork exact: " << (holds ? "yes" : "no") << "\n";
      if (!holds) {
        highlight = {"r1", "r2", "f"};
      }
    } else {
      throw PreconditionError("unknown property '" + property + "'");
    }
    report["holds"]     = holds;
    report["highlight"] = highlight;
    human << "verdict: " << (holds ? "holds" : "violated") << "\n";
    return finish(report, holds ? 0 : 1);
  }

  ////////////////////////////////////////////////////////////////////////

  struct SweepArgs {
    std::vector<std::string>   backend{"set"};
    std::string                shape = "square";
    std::optional<std::size_t> max_carrier;
    std::uint64_t              seed = 0;
    std::optional<std::size_t> cases;
    std::string                mode = "exhaustive";
    std::string                out  = "counterexample.diag";
    bool                       all  = false;
  };

  int run_sweep(SweepArgs const& args) {
    auto shape = parse_shape(args.shape);
    auto mode  = parse_mode(args.mode);
    if (!shape) {
      throw PreconditionError("unknown shape '" + args.shape + "'");
    }
    if (!mode) {
      throw PreconditionError("unknown mode '" + args.mode + "'");
    }
    std::optional<SearchSpace> space;
    SweepOptions               options;
    options.shape       = *shape;
    options.first_hit   = !args.all;
    options.bounds.mode = *mode;
    options.bounds.seed = args.seed;
    if (args.cases) {
      options.bounds.max_cases = *args.cases;
    } else if (*mode == SearchMode::random) {
      options.bounds.max_cases = 1000;
    }

    if (args.backend.at(0) == "set") {
      if (args.backend.size() != 1) {
        throw PreconditionError("--backend set takes no file");
      }
      options.bounds.max_carrier = args.max_carrier.value_or(3);
      space.emplace(SearchSpace::sets(options.bounds.max_carrier));
    } else if (args.backend.at(0) == "algebra") {
      if (args.backend.size() != 2) {
        throw PreconditionError("--backend algebra needs an algebra file");
      }
      FiniteAlgebra a            = load_algebra(args.backend[1]);
      options.bounds.max_carrier = args.max_carrier.value_or(a.size());
      space.emplace(SearchSpace::algebras(a, options.bounds.max_carrier));
    } else {
      throw PreconditionError("unknown backend '" + args.backend[0] + "'");
    }

    SearchReport report = sweep(*space, options);
    human << report.human();
    if (!report.all_conform()) {
      std::ofstream out(args.out, std::ios::binary);
      if (!out) {
        throw ResolutionError("cannot write '" + args.out + "'");
      }
      out << serialize_diagram(report.violations.front().diagram);
      human << "first violation written to " << args.out << "\n";
    }
    json machine = json::parse(report.machine());
    machine["command"] = "sweep";
    return finish(machine, report.all_conform() ? 0 : 1);
  }

  ////////////////////////////////////////////////////////////////////////

  struct ReplayArgs {
    std::string file;
    std::string env;
  };

  int run_replay(ReplayArgs const& args) {
    Derivation     derivation = load_derivation(args.file);
    LabeledDiagram d          = load_diagram(args.env);
    Environment    env        = environment(d);
    auto           result     = check_derivation(derivation, env);

    json steps = json::array();
    for (auto const& s : result.steps) {
      auto const& lhs = derivation.steps()[s.index];
      auto const& rhs = derivation.steps()[s.index + 1];
      human << "step " << s.index + 1 << ": " << lhs.expr.to_string() << " = "
            << rhs.expr.to_string();
      if (!rhs.justification.empty()) {
        human << "  [" << rhs.justification << "]";
      }
      human << (s.equal ? "  ok" : "  FAILS") << "\n";
      if (s.first_difference) {
        human << "  first differing cell " << cell_text(*s.first_difference) << "\n";
      }
      steps.push_back({{"step", s.index + 1},
                       {"equal", s.equal},
                       {"difference", s.first_difference ? cell_json(*s.first_difference)
                                                         : json(nullptr)}});
    }
    auto failure = result.first_failure();
    human << "verdict: " << (result.verdict ? "all steps hold" : "fails");
    if (failure) {
      human << " at step " << *failure + 1;
    }
    human << "\n";
    return finish({{"command", "replay"},
                   {"verdict", result.verdict},
                   {"first_failure", failure ? json(*failure + 1) : json(nullptr)},
                   {"steps", steps}},
                  result.verdict ? 0 : 1);
  }

  ////////////////////////////////////////////////////////////////////////

  struct DotArgs {
    std::string file;
    std::string report;
  };

  int run_emit_dot(DotArgs const& args) {
    LabeledDiagram d = load_diagram(args.file);
    if (d.shape == "cube") {
      d = label(cube_from(d), true);
    }
    std::set<std::string> highlight;
    if (!args.report.empty()) {
      std::ifstream in(args.report, std::ios::binary);
      if (!in) {
        throw ResolutionError("cannot open '" + args.report + "'");
      }
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      // Accept the bare JSON or a full human report ending in "@report".
      if (auto at = text.rfind("@report "); at != std::string::npos) {
        text = text.substr(at + 8);
      }
      json r;
      try {
        r = json::parse(text);
      } catch (json::exception const&) {
        throw ParseError("report '" + args.report + "' is not a check report");
      }
      if (r.contains("highlight")) {
        for (auto const& name : r["highlight"]) {
          highlight.insert(name.get<std::string>());
        }
      }
    }
    std::cout << to_dot(d, highlight);
    return 0;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-model checks for relations, congruences and diagrams"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-q,--quiet", quiet, "print only the machine-readable report");

  ClassifyArgs classify;
  auto*        c_classify = app.add_subcommand("classify", "permutability class and Mal'tsev term");
  c_classify->add_option("file", classify.file, "algebra file")->required();
  c_classify->add_option("--budget", classify.budget, "term operations to generate at most");

  CongruenceArgs congruences;
  auto* c_cong = app.add_subcommand("congruences", "list the congruence lattice");
  c_cong->add_option("file", congruences.file, "algebra file")->required();
  c_cong->add_option("--strategy", congruences.strategy)
      ->check(CLI::IsMember({"auto", "partitions", "principal-joins"}));

  ClassifyArgs term;
  auto*        c_term = app.add_subcommand("maltsev-term", "search for a Mal'tsev term");
  c_term->add_option("file", term.file, "algebra file")->required();
  c_term->add_option("--budget", term.budget, "term operations to generate at most");

  CheckArgs check;
  auto*     c_check = app.add_subcommand("check", "check a diagram property");
  c_check->add_option("file", check.file, "diagram file")->required();
  c_check->add_option("--property", check.property)
      ->check(CLI::IsMember({"regular-pushout", "cube", "cuboid", "exact-fork"}));

  SweepArgs sweep_args;
  auto*     c_sweep = app.add_subcommand("sweep", "enumerate or sample diagrams and check them");
  c_sweep->add_option("--backend", sweep_args.backend, "set | algebra FILE")->expected(1, 2);
  c_sweep->add_option("--shape", sweep_args.shape)
      ->check(CLI::IsMember({"square", "cube", "cuboid", "permutation"}));
  c_sweep->add_option("--max-carrier", sweep_args.max_carrier, "largest object size (default 3, or the algebra size)");
  c_sweep->add_option("--seed", sweep_args.seed, "seed for random mode");
  c_sweep->add_option("--cases", sweep_args.cases, "case cap (random mode default 1000)");
  c_sweep->add_option("--mode", sweep_args.mode)->check(CLI::IsMember({"exhaustive", "random"}));
  c_sweep->add_option("--out", sweep_args.out, "where to write the first violation");
  c_sweep->add_flag("--all", sweep_args.all, "report every violation, not just the first");

  ReplayArgs replay;
  auto*      c_replay = app.add_subcommand("replay", "replay a derivation in a diagram");
  c_replay->add_option("file", replay.file, "derivation file")->required();
  c_replay->add_option("--env", replay.env, "diagram file")->required();

  DotArgs dot;
  auto*   c_dot = app.add_subcommand("emit-dot", "print a diagram as DOT");
  c_dot->add_option("file", dot.file, "diagram file")->required();
  c_dot->add_option("--report", dot.report, "check report whose highlighted edges to mark");

  try {
    app.parse(argc, argv);
  } catch (CLI::Success const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_classify) {
      return run_classify(classify);
    }
    if (*c_cong) {
      return run_congruences(congruences);
    }
    if (*c_term) {
      return run_maltsev_term(term);
    }
    if (*c_check) {
      return run_check(check);
    }
    if (*c_sweep) {
      return run_sweep(sweep_args);
    }
    if (*c_replay) {
      return run_replay(replay);
    }
    if (*c_dot) {
      return run_emit_dot(dot);
    }
  } catch (ParseError const& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) {
      std::cerr << " at line " << e.line() << ", column " << e.column();
    }
    std::cerr << "\n";
    return 2;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
