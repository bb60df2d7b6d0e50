#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "permutex/diagrams.hpp"
#include "permutex/errors.hpp"
#include "permutex/io.hpp"
#include "permutex/search.hpp"

using namespace permutex;

namespace {
  std::string const fixtures = PERMUTEX_FIXTURES;

  FiniteAlgebra set(std::size_t n) {
    return FiniteAlgebra(Carrier(n));
  }

  FunctionArrow fn(std::size_t n, std::size_t m, std::vector<Element> table) {
    return FunctionArrow(Carrier(n), Carrier(m), std::move(table));
  }

  SquareDiagram counterexample() {
    return SquareDiagram(Backend::sets(), {set(3), set(2), set(2), set(1), fn(3, 2, {0, 0, 1}),
                                           fn(3, 2, {0, 1, 1}), fn(2, 1, {0, 0}), fn(2, 1, {0, 0}),
                                           fn(1, 2, {0}), fn(2, 3, {0, 1})});
  }

  FiniteAlgebra fixture(std::string const& name) {
    return load_algebra(fixtures + "/algebras/" + name + ".alg");
  }
}  // namespace

TEST_CASE("pullbacks") {
  auto b = Backend::sets();
  auto p = pullback(b, set(2), fn(2, 1, {0, 0}), set(2), fn(2, 1, {0, 0}));
  CHECK(p.object.size() == 4);
  CHECK(p.elements == std::vector<std::pair<Element, Element>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(p.first.table() == std::vector<Element>{0, 0, 1, 1});

  // Along an identity: the domain again.
  auto f  = fn(3, 2, {1, 0, 1});
  auto id = pullback(b, set(3), f, set(2), FunctionArrow::identity(Carrier(2)));
  CHECK(id.object.size() == 3);
  CHECK(id.first == FunctionArrow::identity(Carrier(3)));
  CHECK(id.second == f);
  CHECK(is_pullback_square(id.first, id.second, f, FunctionArrow::identity(Carrier(2))));

  CHECK_THROWS(pullback(b, set(2), fn(2, 3, {0, 0}), set(2), fn(2, 2, {0, 0})));
}

TEST_CASE("pullback factorisation is unique for small cones") {
  auto b = Backend::sets();
  auto p = fn(3, 2, {0, 1, 1});
  auto q = fn(2, 2, {1, 0});
  auto P = pullback(b, set(3), p, set(2), q);
  // Every cone from a 2-element set.
  for (Element a0 = 0; a0 < 3; ++a0) {
    for (Element a1 = 0; a1 < 3; ++a1) {
      for (Element b0 = 0; b0 < 2; ++b0) {
        for (Element b1 = 0; b1 < 2; ++b1) {
          auto q1 = fn(2, 3, {a0, a1});
          auto q2 = fn(2, 2, {b0, b1});
          bool cone = then(q1, p) == then(q2, q);
          if (!cone) {
            CHECK_THROWS_AS(P.factor(q1, q2), PreconditionError);
            continue;
          }
          auto u = P.factor(q1, q2);
          CHECK(then(u, P.first) == q1);
          CHECK(then(u, P.second) == q2);
        }
      }
    }
  }
}

TEST_CASE("tabulations") {
  auto d = tabulate(Relation::identity(Carrier(2)));
  CHECK(d.carrier.size() == 2);
  CHECK(d.p1.table() == std::vector<Element>{0, 1});
  CHECK(d.p2.table() == std::vector<Element>{0, 1});
  CHECK(tabulate(Relation::full(Carrier(2), Carrier(2))).carrier.size() == 4);
  auto k = tabulate(kernel_pair(fn(3, 2, {0, 1, 1})));
  CHECK(k.p1.table() == std::vector<Element>{0, 1, 1, 2, 2});
  CHECK(k.p2.table() == std::vector<Element>{0, 1, 2, 1, 2});
  CHECK(jointly_injective(k.p1, k.p2));
}

TEST_CASE("exact forks") {
  auto b = Backend::sets();
  auto f = fn(3, 2, {0, 1, 1});
  auto k = tabulate(kernel_pair(f));
  CHECK(is_exact_fork(Fork(b, {set(5), set(3), set(2), k.p1, k.p2, f})));
  auto idf = FunctionArrow::identity(Carrier(3));
  CHECK_FALSE(is_exact_fork(Fork(b, {set(3), set(3), set(2), idf, idf, f})));
  auto into = fn(3, 4, {0, 1, 1});
  CHECK_FALSE(fork_exact(k.p1, k.p2, into));
  // The legs must be coequalised.
  CHECK_THROWS_AS(Fork(b, {set(2), set(3), set(2), fn(2, 3, {0, 1}), fn(2, 3, {1, 0}), f}), StructuralError);
}

TEST_CASE("square validation") {
  auto ok = counterexample();
  auto p  = ok.parts();
  auto bad_c = p;
  bad_c.c    = fn(3, 2, {1, 0, 1});  // c.t != s.d
  CHECK_THROWS_AS(SquareDiagram(Backend::sets(), bad_c), StructuralError);
  auto bad_t = p;
  bad_t.t    = fn(2, 3, {0, 0});
  CHECK_THROWS_AS(SquareDiagram(Backend::sets(), bad_t), StructuralError);
  auto not_onto = p;
  not_onto.A    = set(3);
  not_onto.c    = fn(3, 3, {0, 0, 1});
  not_onto.f    = fn(3, 1, {0, 0, 0});
  not_onto.s    = fn(1, 3, {0});
  CHECK_THROWS_AS(SquareDiagram(Backend::sets(), not_onto), StructuralError);
}

TEST_CASE("regular pushouts") {
  auto sq = counterexample();
  CHECK_FALSE(is_regular_pushout(sq));
  CHECK_FALSE(regular_pushout_relational(sq));
  auto corner = pullback(sq.backend(), set(2), sq.parts().d, set(2), sq.parts().f);
  auto pairing_gc = pairing(sq, corner);
  CHECK(pairing_gc.table() == std::vector<Element>{0, 2, 3});  // (0,1) is missed

  auto pb = square_from(load_diagram(fixtures + "/diagrams/pullback_square.diag"));
  CHECK(is_regular_pushout(pb));
  CHECK(regular_pushout_relational(pb));
  auto gs = square_from(load_diagram(fixtures + "/diagrams/group_square.diag"));
  CHECK(gs.backend().signature().size() == 3);
  CHECK(is_regular_pushout(gs));
  CHECK(regular_pushout_relational(gs));
}

TEST_CASE("both regular-pushout checks agree, and R_d is the image of R_c") {
  auto check_all = [](SearchSpace const& space) {
    std::size_t n = for_each_square(space, [](SquareDiagram const& sq) {
      auto const& p = sq.parts();
      REQUIRE(is_regular_pushout(sq) == regular_pushout_relational(sq));
      REQUIRE(image_along(kernel_pair(p.c), p.g) == kernel_pair(p.d));
      return true;
    });
    CHECK(n > 0);
  };
  check_all(SearchSpace::sets(3));
  for (auto const& name : {"z4", "v4", "s3", "chain3_semilattice"}) {
    CAPTURE(name);
    auto a = fixture(name);
    check_all(SearchSpace::algebras(a, a.size()));
  }
}

TEST_CASE("cubes") {
  auto sq   = counterexample();
  auto cube = degenerate_cube(sq);
  auto cmp  = cube_comparison(cube);
  CHECK_FALSE(cmp.is_epi);
  CHECK(cmp.is_epi == is_regular_pushout(sq));
  CHECK(cube.back_corner().object.size() == 3);
  CHECK(cube.front_corner().object.size() == 4);

  // W = D, Y = B, w = d, beta = id collapses v to c, which is always onto.
  auto const& p = sq.parts();
  CubeDiagram collapsed({sq, p.D, p.B, p.d, FunctionArrow::identity(Carrier(2)),
                         FunctionArrow::identity(Carrier(1))});
  CHECK(cube_comparison(collapsed).is_epi);

  auto gc = cube_from(load_diagram(fixtures + "/diagrams/group_cube.diag"));
  CHECK(cube_comparison(gc).is_epi);
  auto ce = cube_from(load_diagram(fixtures + "/diagrams/counterexample_cube.diag"));
  CHECK(cube_comparison(ce).v == cmp.v);

  // w must be onto.
  CHECK_THROWS_AS(CubeDiagram({sq, set(2), set(2), fn(2, 2, {0, 0}), fn(2, 2, {0, 1}), fn(2, 1, {0, 0})}),
                  StructuralError);
}

TEST_CASE("cuboids") {
  auto sq     = counterexample();
  auto cuboid = build_split_cuboid(degenerate_cube(sq));
  CHECK(cuboid.is_split());
  auto r = check_cuboid(cuboid);
  CHECK(r.lower_exact);
  CHECK(r.middle_rows_exact);
  CHECK(r.diamonds_are_pullbacks);
  CHECK_FALSE(r.upper_exact);
  CHECK_FALSE(r.v_surjective);
  CHECK(r.top_is_kernel_pair);
  CHECK_FALSE(r.conforms);

  auto regular = without_sections(cuboid);
  CHECK_FALSE(regular.is_split());
  CHECK(check_cuboid(regular).conforms == r.conforms);

  auto group = build_split_cuboid(cube_from(load_diagram(fixtures + "/diagrams/group_cube.diag")));
  auto gr    = check_cuboid(group);
  CHECK(gr.lower_exact);
  CHECK(gr.upper_exact);
  CHECK(gr.conforms);
}

TEST_CASE("a cuboid over points conforms") {
  auto b  = Backend::sets();
  auto pt = set(1);
  auto z  = FunctionArrow::identity(Carrier(1));
  CuboidDiagram::Parts p{pt, pt, pt, z, z, z,   // top
                         pt, pt, pt, z, z, z,   // back
                         pt, pt, pt, z, z, z,   // middle
                         pt, pt, pt, z, z, z,   // bottom
                         z,  z,  z,  z, z, z, z, z, z, z, z, z,
                         std::nullopt};
  auto r = check_cuboid(CuboidDiagram(b, p));
  CHECK(r.lower_exact);
  CHECK(r.upper_exact);
  CHECK(r.conforms);
}

TEST_CASE("invalid cuboids are rejected") {
  auto cuboid = build_split_cuboid(degenerate_cube(counterexample()));
  auto p      = cuboid.parts();
  auto broken = p;
  broken.v    = FunctionArrow::constant(p.V.carrier(), p.X.carrier(), 0);
  CHECK_THROWS_AS(CuboidDiagram(cuboid.backend(), broken), StructuralError);
  auto twisted = p;
  twisted.c1   = FunctionArrow::constant(p.Rc.carrier(), p.C.carrier(), 0);
  CHECK_THROWS_AS(CuboidDiagram(cuboid.backend(), twisted), StructuralError);
}

TEST_CASE("split cuboids have an exact lower row in both backends") {
  std::size_t built = 0;
  for_each_cube(SearchSpace::sets(2), [&](CubeDiagram const& cube) {
    auto r = check_cuboid(build_split_cuboid(cube));
    REQUIRE(r.lower_exact);
    REQUIRE(r.upper_exact == cube_comparison(cube).is_epi);
    ++built;
    return true;
  });
  CHECK(built > 0);
  auto z4 = fixture("z4");
  built   = 0;
  for_each_cube(SearchSpace::algebras(z4, 4), [&](CubeDiagram const& cube) {
    auto r = check_cuboid(build_split_cuboid(cube));
    REQUIRE(r.lower_exact);
    REQUIRE(r.conforms);
    return ++built < 2000;
  });
  CHECK(built == 2000);
}

TEST_CASE("algebra backend validates homomorphisms") {
  auto z4 = fixture("z4");
  auto z2 = fixture("z2");
  auto b  = Backend::algebras(z4.signature());
  CHECK(b.valid_morphism(z4, z2, fn(4, 2, {0, 1, 0, 1})));
  CHECK_FALSE(b.valid_morphism(z4, z2, fn(4, 2, {0, 0, 1, 1})));
  CHECK_FALSE(b.valid_object(set(2)));
  CHECK(Backend::sets().valid_object(set(2)));
  CHECK(b.name() == "algebra");
  CHECK(Backend::sets().name() == "set");
}
