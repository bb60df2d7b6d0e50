// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if
// any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "permutex/algebra.hpp"
#include "permutex/diagrams.hpp"
#include "permutex/io.hpp"
#include "permutex/relexpr.hpp"
#include "permutex/rng.hpp"
#include "permutex/search.hpp"

using namespace permutex;
namespace fs = std::filesystem;

namespace {
  std::string const fixtures = PERMUTEX_FIXTURES;
  std::string const binary   = PERMUTEX_BINARY;

  FiniteAlgebra fixture(std::string const& name) {
    return load_algebra(fixtures + "/algebras/" + name + ".alg");
  }

  LabeledDiagram diagram(std::string const& name) {
    return load_diagram(fixtures + "/diagrams/" + name + ".diag");
  }

  // Collects failures; the first few are printed.
  struct Tally {
    std::size_t        checks   = 0;
    std::size_t        failures = 0;
    std::ostringstream notes;

    void expect(bool ok, std::string const& what) {
      ++checks;
      if (!ok && failures++ < 5) {
        notes << "\n    failed: " << what;
      }
    }
  };

  struct Outcome {
    Tally       tally;
    std::string summary;
  };

  FunctionArrow arrow(oracle::Table const& t, std::size_t m) {
    return FunctionArrow(Carrier(t.size()), Carrier(m), t);
  }

  SweepOptions exhaustive(SearchShape shape, std::size_t max, bool first_hit = true) {
    SweepOptions o;
    o.shape              = shape;
    o.bounds.max_carrier = max;
    o.first_hit          = first_hit;
    return o;
  }

  ////////////////////////////////////////////////////////////////////////

  void map_identities(FunctionArrow const& f, Tally& t) {
    Relation g  = graph(f);
    Relation go = opposite(g);
    // compose is diagrammatic: compose(g, go) relates a to a' when f(a) = f(a').
    t.expect(compose(compose(g, go), g) == g, "f f° f = f");
    t.expect(compose(compose(go, g), go) == go, "f° f f° = f°");
    t.expect((compose(go, g) == Relation::identity(f.dst())) == oracle::onto(f.table(), f.dst().size()),
             "f f° = 1 iff f onto");
  }

  Outcome relation_identities() {
    Outcome     o;
    std::size_t exhaustive_maps = 0;
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t m = 1; m <= 3; ++m) {
        oracle::tables(n, m, [&](oracle::Table const& table) {
          map_identities(arrow(table, m), o.tally);
          ++exhaustive_maps;
        });
      }
    }
    std::size_t const seeded = 10'000;
    for (std::uint64_t i = 0; i < seeded; ++i) {
      SplitMix      rng = SplitMix::for_case(2024, i);
      std::size_t   n   = 4 + rng.below(3);
      std::size_t   m   = 4 + rng.below(3);
      oracle::Table table(n);
      for (auto& x : table) {
        x = rng.below(m);
      }
      map_identities(arrow(table, m), o.tally);
    }
    o.summary = std::to_string(exhaustive_maps) + " maps up to 3 elements, " + std::to_string(seeded)
                + " seeded maps on 4 to 6";
    return o;
  }

  Outcome classification() {
    Outcome o;
    for (auto const* name : {"z2", "z4", "v4", "s3", "z6"}) {
      auto a = fixture(name);
      auto r = permutability_class(a);
      o.tally.expect(r.cls == PermutabilityClass::two_permutable, std::string(name) + " is two_permutable");
      auto term = find_maltsev_term(a);
      o.tally.expect(term.witness.has_value(), std::string(name) + " has a Mal'tsev term");
      if (term.witness) {
        // p(x, y, y) = x and p(x, x, y) = y, read straight off the table.
        std::size_t n  = a.size();
        bool        ok = true;
        for (Element x = 0; x < n; ++x) {
          for (Element y = 0; y < n; ++y) {
            ok = ok && (*term.witness)[(x * n + y) * n + y] == x && (*term.witness)[(x * n + x) * n + y] == y;
          }
        }
        o.tally.expect(ok, std::string(name) + " term satisfies both equations");
      }
    }

    auto c3 = permutability_class(fixture("chain3_semilattice"));
    o.tally.expect(c3.cls == PermutabilityClass::three_permutable_not_two, "chain3 is three_permutable_not_two");
    o.tally.expect(c3.witness && c3.witness->alpha.to_string() == "{01|2}"
                       && c3.witness->beta.to_string() == "{0|12}",
                   "chain3 witness is ({01|2}, {0|12})");
    if (c3.witness) {
      auto a = c3.witness->alpha.relation().pairs();
      auto b = c3.witness->beta.relation().pairs();
      auto [x, y] = c3.witness->cell;
      o.tally.expect(oracle::holds(oracle::compose(a, b), x, y) && !oracle::holds(oracle::compose(b, a), x, y),
                     "chain3 witness cell separates the two products");
    }
    o.tally.expect(!find_maltsev_term(fixture("chain3_semilattice")).witness, "chain3 has no Mal'tsev term");

    auto c4 = permutability_class(fixture("chain4_semilattice"));
    o.tally.expect(c4.cls == PermutabilityClass::not_three_permutable, "chain4 is not_three_permutable");
    if (c4.witness) {
      auto a      = c4.witness->alpha.relation().pairs();
      auto b      = c4.witness->beta.relation().pairs();
      auto [x, y] = c4.witness->cell;
      o.tally.expect(oracle::holds(oracle::compose(oracle::compose(a, b), a), x, y)
                         && !oracle::holds(oracle::compose(oracle::compose(b, a), b), x, y),
                     "chain4 witness cell separates the two triple products");
    } else {
      o.tally.expect(false, "chain4 has a witness");
    }
    o.summary = "five groups, two chains";
    return o;
  }

  Outcome regular_pushout_equivalence() {
    Outcome                     o;
    std::vector<oracle::Square> naive;
    oracle::squares(3, [&](oracle::Square const& q) { naive.push_back(q); });

    std::size_t i = 0, agree = 0, violations = 0;
    for_each_square(SearchSpace::sets(3), [&](SquareDiagram const& sq) {
      bool surj = is_regular_pushout(sq);
      bool rel  = regular_pushout_relational(sq);
      bool ref  = i < naive.size() && oracle::regular_pushout(naive[i]);
      o.tally.expect(surj == rel, "checkers agree at case " + std::to_string(i));
      o.tally.expect(surj == ref, "brute force agrees at case " + std::to_string(i));
      agree += surj == rel;
      violations += !surj;
      ++i;
      return true;
    });
    o.tally.expect(i == naive.size(), "enumeration count matches the brute-force count");

    auto report = sweep(SearchSpace::sets(3), exhaustive(SearchShape::square, 3, false));
    o.tally.expect(report.disagreements == 0, "sweep reports no disagreements");
    o.tally.expect(report.violations.size() == violations && violations > 0, "at least one violation");

    // Where the shipped counterexample sits in the brute-force order.
    auto                       shipped = square_from(diagram("counterexample_square")).parts();
    std::optional<std::size_t> at;
    for (std::size_t k = 0; k < naive.size(); ++k) {
      auto const& q = naive[k];
      if (q.C == shipped.C.size() && q.A == shipped.A.size() && q.D == shipped.D.size()
          && q.B == shipped.B.size() && q.d == shipped.d.table() && q.f == shipped.f.table()
          && q.s == shipped.s.table() && q.g == shipped.g.table() && q.t == shipped.t.table()
          && q.c == shipped.c.table()) {
        at = k;
      }
    }
    bool found = false;
    if (at) {
      for (auto const& v : report.violations) {
        found = found || v.index == *at;
      }
    }
    o.tally.expect(found, "the shipped counterexample is reported at its canonical index");
    o.summary = std::to_string(i) + " squares, checkers agree on " + std::to_string(agree) + ", "
                + std::to_string(violations) + " violations, shipped counterexample at index "
                + (at ? std::to_string(*at) : std::string("?")) + ", first at "
                + (report.violations.empty() ? std::string("?") : std::to_string(report.violations[0].index));
    return o;
  }

  Outcome maltsev_direction() {
    Outcome     o;
    std::size_t squares = 0, cubes = 0;
    for (auto const* name : {"z4", "v4", "s3"}) {
      auto a     = fixture(name);
      auto space = SearchSpace::algebras(a, a.size());
      auto sq    = sweep(space, exhaustive(SearchShape::square, a.size(), false));
      auto cu    = sweep(space, exhaustive(SearchShape::cube, a.size(), false));
      o.tally.expect(sq.all_conform() && !sq.truncated && sq.disagreements == 0,
                     std::string(name) + " squares are regular pushouts");
      o.tally.expect(cu.all_conform() && !cu.truncated, std::string(name) + " cube comparisons are onto");
      squares += sq.cases_checked;
      cubes += cu.cases_checked;
    }
    o.summary = std::to_string(squares) + " squares, " + std::to_string(cubes) + " cubes over z4, v4, s3";
    return o;
  }

  Outcome cuboids() {
    Outcome           o;
    std::size_t const per_fixture = 1000;
    std::size_t       built       = 0;
    for (auto const* name : {"z4", "v4", "s3"}) {
      auto         a     = fixture(name);
      auto         space = SearchSpace::algebras(a, a.size());
      SearchBounds b;
      b.max_carrier = a.size();
      b.seed        = 17;
      b.mode        = SearchMode::random;
      for (std::uint64_t i = 0; i < per_fixture; ++i) {
        auto cube = random_cube(space, b, i);
        if (!cube) {
          o.tally.expect(false, std::string(name) + " cube generation at " + std::to_string(i));
          continue;
        }
        auto cuboid = build_split_cuboid(*cube);
        auto r      = check_cuboid(cuboid);
        ++built;
        o.tally.expect(r.lower_exact, "lower row exact");
        o.tally.expect(!r.lower_exact || r.upper_exact, "upper row exact");
        // Upper exactness by hand: v onto, and the image of (t1, t2) is R_v.
        auto const& p = cuboid.parts();
        oracle::Pairs image;
        for (Element x = 0; x < p.T.size(); ++x) {
          image.emplace_back(p.t1.table()[x], p.t2.table()[x]);
        }
        std::sort(image.begin(), image.end());
        oracle::Pairs kernel;
        for (Element x = 0; x < p.V.size(); ++x) {
          for (Element y = 0; y < p.V.size(); ++y) {
            if (p.v.table()[x] == p.v.table()[y]) {
              kernel.emplace_back(x, y);
            }
          }
        }
        o.tally.expect(oracle::onto(p.v.table(), p.X.size()) && image == kernel, "upper row exact by hand");
      }
    }

    // Sets: the counterexample square's cube.
    auto cube   = cube_from(diagram("counterexample_cube"));
    auto cuboid = build_split_cuboid(cube);
    auto r      = check_cuboid(cuboid);
    o.tally.expect(r.lower_exact && !r.upper_exact, "set cuboid: lower exact, upper not");
    std::size_t largest = 0;
    for (auto const& [name, x] : label(cube, true).objects) {
      largest = std::max(largest, x.size());
    }
    o.tally.expect(largest <= 4, "cube objects have at most 4 elements");
    auto again = check_cuboid(cuboid_from(parse_diagram(serialize_diagram(label(cuboid)))));
    o.tally.expect(again.lower_exact && !again.upper_exact, "emitted cuboid re-validates");

    auto swept = sweep(SearchSpace::sets(4), exhaustive(SearchShape::cuboid, 4));
    o.tally.expect(swept.violations.size() == 1, "exhaustive set cuboid sweep finds a violation");
    if (!swept.violations.empty()) {
      auto re = check_cuboid(cuboid_from(parse_diagram(serialize_diagram(swept.violations[0].diagram))));
      o.tally.expect(re.lower_exact && !re.upper_exact, "swept cuboid re-validates");
    }
    o.summary = std::to_string(built) + " seeded group cuboids, set counterexample from a cube with objects of at most "
                + std::to_string(largest) + " elements, sweep hit at case "
                + (swept.violations.empty() ? std::string("?") : std::to_string(swept.violations[0].index));
    return o;
  }

  Outcome derivation_replay() {
    Outcome     o;
    auto        chain   = load_derivation(fixtures + "/derivations/prop_maltsev_po.deriv");
    std::size_t checked = 0;
    o.tally.expect(chain.size() == 6, "the chain has five steps");
    std::vector<SearchSpace> spaces;
    for (auto const* name : {"z4", "v4", "s3"}) {
      auto a = fixture(name);
      spaces.push_back(SearchSpace::algebras(a, a.size()));
    }
    for (std::uint64_t i = 0; i < 100; ++i) {
      auto const&  space = spaces[i % spaces.size()];
      SearchBounds b;
      b.max_carrier = space.source()->size();
      b.seed        = 99;
      b.mode        = SearchMode::random;
      auto sq       = random_square(space, b, i);
      if (!sq) {
        o.tally.expect(false, "square generation at " + std::to_string(i));
        continue;
      }
      o.tally.expect(check_derivation(chain, environment(label(*sq))).verdict,
                     "chain holds on seeded square " + std::to_string(i));
      ++checked;
    }
    auto bad = check_derivation(chain, environment(diagram("counterexample_square")));
    auto at  = bad.first_failure();
    o.tally.expect(!bad.verdict && at == std::optional<std::size_t>(3), "counterexample fails at step 4");
    if (at) {
      o.tally.expect(chain.steps()[*at + 1].justification == "R_g R_c = R_c R_g", "step 4 is the permutation step");
    }
    o.summary = std::to_string(checked) + " group squares pass; counterexample fails at step "
                + (at ? std::to_string(*at + 1) : std::string("none"));
    return o;
  }

  FiniteAlgebra random_algebra(std::uint64_t i) {
    SplitMix                  rng = SplitMix::for_case(7, i);
    std::size_t               n   = 1 + rng.below(6);
    std::vector<OpTable>      ops;
    std::size_t const         count = 1 + rng.below(2);
    for (std::size_t k = 0; k < count; ++k) {
      unsigned             arity = 1 + rng.below(2);
      std::size_t          cells = arity == 1 ? n : n * n;
      std::vector<Element> table(cells);
      // Mostly a projection, so the lattices are not all trivial.
      for (std::size_t c = 0; c < cells; ++c) {
        table[c] = rng.below(4) == 0 ? rng.below(n) : (arity == 1 ? c : c / n);
      }
      ops.push_back({"op" + std::to_string(k), arity, table});
    }
    return FiniteAlgebra("random" + std::to_string(i), Carrier(n), ops);
  }

  Outcome congruence_oracles() {
    Outcome                    o;
    std::vector<FiniteAlgebra> algebras;
    for (auto const* name : {"z2", "z4", "v4", "s3", "z6", "chain3_semilattice", "chain4_semilattice", "trivial1"}) {
      algebras.push_back(fixture(name));
    }
    std::size_t const fixture_count = algebras.size();
    for (std::uint64_t i = 0; i < 300; ++i) {
      algebras.push_back(random_algebra(i));
    }
    for (std::size_t n = 1; n <= 6; ++n) {
      algebras.emplace_back(Carrier(n));
    }
    std::size_t generators = 0, lattices = 0;
    for (std::size_t k = 0; k < algebras.size(); ++k) {
      auto const& a    = algebras[k];
      auto        all  = oracle::congruences(a);
      std::string name = a.name().empty() ? "set" + std::to_string(a.size()) : a.name();
      o.tally.expect(all_congruences(a) == all, name + ": all_congruences");
      o.tally.expect(all_congruences(a, CongruenceStrategy::partitions) == all, name + ": partitions");
      o.tally.expect(all_congruences(a, CongruenceStrategy::principal_joins) == all, name + ": principal joins");
      ++lattices;
      if (k >= fixture_count) {
        continue;
      }
      for (Element x = 0; x < a.size(); ++x) {
        for (Element y = 0; y < a.size(); ++y) {
          oracle::Pairs pair{{x, y}};
          o.tally.expect(congruence_generated(a, pair).relation() == oracle::generated(a, all, pair),
                         name + ": generated by (" + std::to_string(x) + ", " + std::to_string(y) + ")");
          ++generators;
        }
      }
    }
    o.summary = std::to_string(generators) + " single-pair generators on fixtures, " + std::to_string(lattices)
                + " lattices up to 6 elements";
    return o;
  }

  std::string run_cli(std::string const& args, std::string const& env) {
    auto dir = fs::temp_directory_path() / ("permutex_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + binary + "' -q " + args + " 2>&1";
    std::string out;
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
      char buf[4096];
      while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) {
        out.append(buf, n);
      }
      pclose(pipe);
    }
    fs::remove_all(dir);
    return out;
  }

  Outcome determinism() {
    Outcome                    o;
    std::size_t                runs = 0;
    std::vector<SearchSpace>   spaces{SearchSpace::sets(3), SearchSpace::algebras(fixture("z4"), 4),
                                    SearchSpace::algebras(fixture("chain3_semilattice"), 3)};
    for (auto const& space : spaces) {
      for (auto shape : {SearchShape::square, SearchShape::cube, SearchShape::cuboid, SearchShape::permutation}) {
        for (auto mode : {SearchMode::exhaustive, SearchMode::random}) {
          for (bool first_hit : {true, false}) {
            auto opts         = exhaustive(shape, space.pool().back().size(), first_hit);
            opts.bounds.mode  = mode;
            if (mode == SearchMode::random) {
              opts.bounds.seed      = 31;
              opts.bounds.max_cases = 500;
            }
            auto a = sweep(space, opts).machine();
            auto b = sweep(space, opts).machine();
            o.tally.expect(a == b, space.backend().name() + " " + to_string(shape) + " " + to_string(mode));
            ++runs;
          }
        }
      }
    }
    std::string const args = "sweep --backend set --shape cube --max-carrier 3 --all --out x.diag";
    auto              one  = run_cli(args, "PERMUTEX_THREADS=1");
    auto              many = run_cli(args, "PERMUTEX_THREADS=4");
    o.tally.expect(!one.empty() && one == many && one == run_cli(args, ""), "CLI reports match across thread counts");
    o.summary = std::to_string(runs) + " sweep configurations run twice, plus the CLI at three thread counts";
    return o;
  }

  struct Criterion {
    int                      number;
    std::string              name;
    double                   limit_seconds;  // 0: no limit
    std::function<Outcome()> run;
  };
}  // namespace

int main() {
  std::vector<Criterion> const criteria{
      {1, "relation identities", 5, relation_identities},
      {2, "permutability classification", 5, classification},
      {3, "regular-pushout equivalence over sets", 60, regular_pushout_equivalence},
      {4, "group squares and cubes", 30, maltsev_direction},
      {5, "cuboids", 60, cuboids},
      {6, "derivation replay", 5, derivation_replay},
      {7, "congruence oracles", 0, congruence_oracles},
      {8, "determinism", 0, determinism},
  };
  int failed = 0;
  for (auto const& c : criteria) {
    auto    start = std::chrono::steady_clock::now();
    Outcome out;
    bool    threw = false;
    try {
      out = c.run();
    } catch (std::exception const& e) {
      threw = true;
      out.summary = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool   in_time = c.limit_seconds == 0 || seconds < c.limit_seconds;
    bool   pass    = !threw && out.tally.failures == 0 && in_time;
    failed += !pass;

    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (pass ? "PASS" : "FAIL") << "  criterion " << c.number << " (" << c.name << "): " << out.summary
         << "; " << out.tally.checks - out.tally.failures << "/" << out.tally.checks << " checks, " << seconds
         << " s";
    if (c.limit_seconds > 0) {
      line << " (limit " << c.limit_seconds << " s)";
    }
    std::cout << line.str() << out.tally.notes.str() << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
