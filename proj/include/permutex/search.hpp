#pragma once

// Enumeration and seeded generation of squares, cubes and cuboids, and the
// sweeps that check them.
//
// Canonical order: objects are drawn from a pool sorted by carrier size;
// squares run over (C, A, D, B) lexicographically in pool order, then over
// the morphism tables d, f, s, g, t, c, each in lexicographic table order.
// Cubes extend a square by W, delta, Y, w in that order (beta is forced
// by beta.w = d.delta since w is onto).

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "permutex/algebra.hpp"
#include "permutex/diagrams.hpp"
#include "permutex/io.hpp"

namespace permutex {

  enum class SearchMode { exhaustive, random };
  enum class SearchShape { square, cube, cuboid, permutation };

  std::string                to_string(SearchMode m);
  std::string                to_string(SearchShape s);
  std::optional<SearchMode>  parse_mode(std::string const& text);
  std::optional<SearchShape> parse_shape(std::string const& text);

  struct SearchBounds {
    std::size_t   max_carrier = 3;
    std::size_t   max_cases   = 1'000'000;
    std::uint64_t seed        = 0;
    SearchMode    mode        = SearchMode::exhaustive;
  };

  // Exhaustive cube and cuboid enumeration over plain sets stops here.
  constexpr std::size_t max_exhaustive_cube_carrier = 4;

  // The objects a sweep draws from, with homomorphisms cached per pair.
  class SearchSpace {
   public:
    // Sets of size 1..max_carrier.
    static SearchSpace sets(std::size_t max_carrier);
    // Quotients of `a` and binary products of those, up to max_carrier
    // elements, duplicates (identical tables) removed.
    static SearchSpace algebras(FiniteAlgebra const& a, std::size_t max_carrier);

    Backend const& backend() const noexcept {
      return _backend;
    }
    std::vector<FiniteAlgebra> const& pool() const noexcept {
      return _pool;
    }
    // The algebra an algebra space was generated from.
    std::optional<FiniteAlgebra> const& source() const noexcept {
      return _source;
    }
    std::vector<FunctionArrow> const& homs(std::size_t from, std::size_t to) const;
    // The onto members of homs(from, to).
    std::vector<FunctionArrow> const& surjections(std::size_t from, std::size_t to) const;

   private:
    SearchSpace(Backend b, std::vector<FiniteAlgebra> pool);

    Backend                                         _backend;
    std::vector<FiniteAlgebra>                      _pool;
    std::optional<FiniteAlgebra>                    _source;
    mutable std::vector<std::optional<std::vector<FunctionArrow>>> _homs;
    mutable std::vector<std::optional<std::vector<FunctionArrow>>> _surj;
  };

  // Visit every valid square (or cube) in canonical order until the visitor
  // returns false. Returns the number visited.
  std::size_t for_each_square(SearchSpace const&                                 space,
                              std::function<bool(SquareDiagram const&)> const& visit);
  std::size_t for_each_cube(SearchSpace const&                               space,
                            std::function<bool(CubeDiagram const&)> const& visit);

  // A valid diagram determined by (bounds.seed, index). Returns nothing
  // once the retry budget is spent.
  std::optional<SquareDiagram> random_square(SearchSpace const&  space,
                                             SearchBounds const& bounds,
                                             std::uint64_t       index);
  std::optional<CubeDiagram>   random_cube(SearchSpace const&  space,
                                           SearchBounds const& bounds,
                                           std::uint64_t       index);

  constexpr int random_retries = 256;

  struct Violation {
    std::size_t    index;
    std::string    detail;
    LabeledDiagram diagram;
  };

  struct SearchReport {
    SearchShape            shape   = SearchShape::square;
    std::string            backend = "set";
    SearchBounds           bounds;
    bool                   first_hit         = true;
    std::size_t            cases_checked     = 0;
    std::size_t            generation_errors = 0;
    // Cases where the surjectivity and relational regular-pushout checks
    // disagree; always zero unless something is broken.
    std::size_t            disagreements = 0;
    bool                   truncated     = false;
    std::vector<Violation> violations;
    std::chrono::duration<double> elapsed{};

    bool        all_conform() const noexcept {
      return violations.empty();
    }
    std::string verdict() const {
      return all_conform() ? "all_conform" : "counterexample_found";
    }
    // One JSON line, without timing, so equal runs give equal bytes.
    std::string machine() const;
    std::string human() const;
  };

  struct SweepOptions {
    SearchShape  shape = SearchShape::square;
    SearchBounds bounds;
    // Stop at the first violation (cases past it are not reported).
    bool first_hit = true;
  };

  // The object checked by a permutation sweep: the algebra itself, or the
  // sets 1..max_carrier when the space holds plain sets.
  SearchReport sweep(SearchSpace const& space, SweepOptions const& options);

  // Kernel pairs of every pair of surjections out of x commute.
  SearchReport verify_permutation(SearchSpace const&   space,
                                  FiniteAlgebra const& x,
                                  SearchBounds const&  bounds,
                                  bool                 first_hit = true);

  SearchReport search_counterexample(SearchSpace const&  space,
                                     SearchShape         shape,
                                     SearchBounds const& bounds);

  // Worker count: PERMUTEX_THREADS if set and positive, else all cores.
  std::size_t worker_count();

}  // namespace permutex
