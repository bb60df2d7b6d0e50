#pragma once

// Text formats: algebra files, diagram files, and DOT output.
//
// Algebra file (JSON):
//   {"name": "z2", "carrier": 2,
//    "ops": [{"name": "mul", "arity": 2, "table": [0, 1, 1, 0]}, ...]}
//
// Diagram file (JSON):
//   {"shape": "square",
//    "objects":   {"C": {"carrier": 3}, "B": {"algebra": "z2.alg"}, ...},
//    "morphisms": {"c": {"from": "C", "to": "A", "table": [0, 0, 1]}, ...},
//    "roles":     {"c": "my_c", ...}}
//
// An object is either a bare set ({"carrier": n}) or an algebra, given inline
// or as a path relative to the diagram file. "roles" is optional and maps the
// shape's role names onto entry names; unmapped roles use their own name.

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permutex/algebra.hpp"
#include "permutex/diagrams.hpp"
#include "permutex/relexpr.hpp"

namespace permutex {

  FiniteAlgebra parse_algebra(std::string_view text);
  FiniteAlgebra load_algebra(std::filesystem::path const& path);
  std::string   serialize_algebra(FiniteAlgebra const& a);

  struct NamedMorphism {
    std::string   name;
    std::string   from;
    std::string   to;
    FunctionArrow map;
  };

  // A diagram as named objects and morphisms, independent of its shape.
  struct LabeledDiagram {
    std::string                                        shape;
    Backend                                            backend = Backend::sets();
    std::vector<std::pair<std::string, FiniteAlgebra>> objects;
    std::vector<NamedMorphism>                         morphisms;

    FiniteAlgebra const& object(std::string const& name) const;
    NamedMorphism const& morphism(std::string const& name) const;
    bool                 has_morphism(std::string const& name) const;
  };

  LabeledDiagram label(Fork const& fork);
  LabeledDiagram label(SquareDiagram const& sq);
  // With `derived`, also the pullback corners V, X and k, gamma, h, alpha, j,
  // i, v.
  LabeledDiagram label(CubeDiagram const& cube, bool derived = false);
  LabeledDiagram label(CuboidDiagram const& cuboid);
  // Two surjections out of one object, as reported by permutation sweeps.
  LabeledDiagram label_span(Backend const&       b,
                            FiniteAlgebra const& x,
                            FiniteAlgebra const& y,
                            FiniteAlgebra const& z,
                            FunctionArrow const& f,
                            FunctionArrow const& g);

  Fork          fork_from(LabeledDiagram const& d);
  SquareDiagram square_from(LabeledDiagram const& d);
  CubeDiagram   cube_from(LabeledDiagram const& d);
  CuboidDiagram cuboid_from(LabeledDiagram const& d);

  LabeledDiagram parse_diagram(std::string_view             text,
                               std::filesystem::path const& base_dir = {});
  LabeledDiagram load_diagram(std::filesystem::path const& path);
  // Deterministic; algebras are written inline so the file stands alone.
  std::string serialize_diagram(LabeledDiagram const& d);

  // Every morphism under its name, every object's carrier under its name.
  // Cubes are expanded with their derived corners first.
  Environment environment(LabeledDiagram const& d);

  std::string to_dot(LabeledDiagram const& d, std::set<std::string> const& highlight = {});

}  // namespace permutex
