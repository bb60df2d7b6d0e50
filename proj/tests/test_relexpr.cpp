#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "permutex/errors.hpp"
#include "permutex/io.hpp"
#include "permutex/relexpr.hpp"

using namespace permutex;

namespace {
  std::string const fixtures = PERMUTEX_FIXTURES;

  Environment small_env() {
    Environment env;
    env.bind_carrier("A", Carrier(3));
    env.bind_carrier("B", Carrier(2));
    env.bind("f", FunctionArrow(Carrier(3), Carrier(2), {0, 1, 1}));
    env.bind("h", FunctionArrow(Carrier(2), Carrier(3), {2, 0}));
    return env;
  }
}  // namespace

TEST_CASE("parse and print") {
  auto e = parse_expression("comp(op(f), f)");
  CHECK(e.kind() == RelExpr::Kind::compose);
  CHECK(e.first().kind() == RelExpr::Kind::opposite);
  CHECK(e.first().first().name() == "f");
  CHECK(e.to_string() == "comp(op(f), f)");
  // Several factors apply left to right.
  auto chain = parse_expression("comp(a, b, c)");
  CHECK(chain.first().kind() == RelExpr::Kind::compose);
  CHECK(chain.second().name() == "c");
  CHECK(chain.to_string() == "comp(a, b, c)");
  CHECK(parse_expression("  id( A ) ").to_string() == "id(A)");
  CHECK_THROWS_AS(parse_expression("comp(f)"), ParseError);
  CHECK_THROWS_AS(parse_expression("op(f"), ParseError);
  CHECK_THROWS_AS(parse_expression("f g"), ParseError);
}

TEST_CASE("evaluate") {
  Environment env = small_env();
  CHECK(evaluate(parse_expression("id(A)"), env) == Relation::identity(Carrier(3)));
  auto f = FunctionArrow(Carrier(3), Carrier(2), {0, 1, 1});
  CHECK(evaluate(parse_expression("comp(f, op(f))"), env) == kernel_pair(f));
  CHECK(evaluate(parse_expression("op(op(comp(f, h)))"), env)
        == evaluate(parse_expression("comp(f, h)"), env));
  CHECK_THROWS_AS(evaluate(parse_expression("g"), env), ResolutionError);
  CHECK_THROWS_AS(evaluate(parse_expression("id(Z)"), env), ResolutionError);
  try {
    evaluate(parse_expression("comp(op(h), f, f)"), env);
    FAIL("expected a dimension error");
  } catch (DimensionError const& e) {
    CHECK(std::string(e.what()).find("cannot compose in comp(op(h), f)") != std::string::npos);
  }
}

TEST_CASE("environments reject duplicate names") {
  Environment env = small_env();
  CHECK_THROWS_AS(env.bind("f", Relation::identity(Carrier(2))), ResolutionError);
  CHECK_THROWS_AS(env.bind_carrier("A", Carrier(1)), ResolutionError);
}

TEST_CASE("identities") {
  Environment env = small_env();
  auto        e   = parse_expression("comp(h, f)");
  CHECK(check_identity(e, e, env));
  CHECK_FALSE(check_identity(parse_expression("comp(h, f)"), parse_expression("id(B)"), env));
  CHECK_THROWS_AS(check_identity(parse_expression("f"), parse_expression("h"), env), DimensionError);
}

TEST_CASE("derivations") {
  CHECK_THROWS_AS(parse_derivation("f\n"), PreconditionError);
  auto d = parse_derivation("# comment\n\nf ; first\nf ; same again\n");
  REQUIRE(d.size() == 2);
  CHECK(d.steps()[1].justification == "same again");
  CHECK(d.steps()[1].line == 4);
  auto report = check_derivation(d, small_env());
  CHECK(report.verdict);
  CHECK(report.steps.size() == 1);
  CHECK_FALSE(report.first_failure());

  auto bad = parse_derivation("comp(f, op(f))\nid(A)\nid(A)\n");
  auto r   = check_derivation(bad, small_env());
  CHECK_FALSE(r.verdict);
  CHECK(r.first_failure() == std::optional<std::size_t>(0));
  CHECK(r.steps[0].first_difference == std::optional(std::pair<Element, Element>{1, 2}));
  CHECK(r.steps[1].equal);

  try {
    check_derivation(parse_derivation("f\nnope\n"), small_env());
    FAIL("expected a resolution error");
  } catch (ResolutionError const& e) {
    CHECK(std::string(e.what()).rfind("expression 2: ", 0) == 0);
  }
  CHECK_THROWS_AS(load_derivation(fixtures + "/derivations/missing.deriv"), ResolutionError);
}

TEST_CASE("shipped square chain") {
  auto chain = load_derivation(fixtures + "/derivations/prop_maltsev_po.deriv");
  CHECK(chain.size() == 6);

  auto good = check_derivation(chain, environment(load_diagram(fixtures + "/diagrams/group_square.diag")));
  CHECK(good.verdict);

  auto env = environment(load_diagram(fixtures + "/diagrams/counterexample_square.diag"));
  auto bad = check_derivation(chain, env);
  CHECK_FALSE(bad.verdict);
  REQUIRE(bad.first_failure());
  // Expressions 4 and 5 are the two orders of R_g and R_c.
  CHECK(*bad.first_failure() == 3);
  CHECK(bad.steps[3].first_difference == std::optional(std::pair<Element, Element>{0, 1}));
  CHECK_FALSE(check_identity(parse_expression("comp(op(g), c)"), parse_expression("comp(d, op(f))"), env));
}

TEST_CASE("shipped cuboid chain") {
  auto chain = load_derivation(fixtures + "/derivations/upper_cuboid.deriv");
  CHECK(chain.size() == 6);
  auto report = check_derivation(chain, environment(load_diagram(fixtures + "/diagrams/group_cube.diag")));
  CHECK(report.verdict);
}
