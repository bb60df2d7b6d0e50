#pragma once

// Diagram shapes over a finite backend: exact forks, split squares, cubes
// with their two pullback corners, and cuboids (three pullback diamonds over
// four horizontal forks).
//
// Objects are FiniteAlgebras throughout; a plain set is an algebra with the
// empty signature, so the set backend is the algebra backend with no
// operations.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "permutex/algebra.hpp"
#include "permutex/relcore.hpp"

namespace permutex {

  class Backend {
   public:
    static Backend sets();
    static Backend algebras(Signature signature);

    bool is_set() const noexcept {
      return _signature.empty() && !_algebraic;
    }
    Signature const& signature() const noexcept {
      return _signature;
    }
    std::string name() const;

    bool valid_object(FiniteAlgebra const& x) const;
    bool valid_morphism(FiniteAlgebra const& src,
                        FiniteAlgebra const& dst,
                        FunctionArrow const& f) const;

    // Throws StructuralError naming `what` if the morphism is invalid.
    void require_morphism(std::string const&   what,
                          FiniteAlgebra const& src,
                          FiniteAlgebra const& dst,
                          FunctionArrow const& f) const;

    friend bool operator==(Backend const&, Backend const&) = default;

   private:
    Backend(Signature signature, bool algebraic)
        : _signature(std::move(signature)), _algebraic(algebraic) {}

    Signature _signature;
    bool      _algebraic;
  };

  // X *_B Y for p: X -> B and q: Y -> B. Elements are the pairs (x, y) with
  // p(x) = q(y), in lexicographic order.
  struct Pullback {
    FiniteAlgebra                            object;
    FunctionArrow                            first;   // P -> X
    FunctionArrow                            second;  // P -> Y
    std::vector<std::pair<Element, Element>> elements;

    std::optional<Element> index_of(Element x, Element y) const;

    // The unique u: Q -> P with first.u = q1 and second.u = q2. Throws
    // PreconditionError if (q1, q2) is not a cone over the cospan.
    FunctionArrow factor(FunctionArrow const& q1, FunctionArrow const& q2) const;

    std::size_t              x_size = 0;
    std::size_t              y_size = 0;
    std::vector<std::size_t> lookup;  // x * y_size + y -> index or npos
  };

  Pullback pullback(Backend const&       b,
                    FiniteAlgebra const& x,
                    FunctionArrow const& p,
                    FiniteAlgebra const& y,
                    FunctionArrow const& q);

  // True iff the square e1: P -> X, e2: P -> Y over p, q commutes and
  // P -> X *_B Y is a bijection.
  bool is_pullback_square(FunctionArrow const& e1,
                          FunctionArrow const& e2,
                          FunctionArrow const& p,
                          FunctionArrow const& q);

  struct Tabulation {
    Carrier       carrier;
    FunctionArrow p1;
    FunctionArrow p2;
  };

  // Pairs of r enumerated row-major.
  Tabulation tabulate(Relation const& r);

  // The tabulated relation as an object of the backend (a subalgebra of the
  // product in the algebra backend).
  FiniteAlgebra tabulation_object(Backend const&       b,
                                  FiniteAlgebra const& a,
                                  FiniteAlgebra const& c,
                                  Tabulation const&    t,
                                  std::string          name);

  bool jointly_injective(FunctionArrow const& r1, FunctionArrow const& r2);

  // f surjective, (r1, r2) jointly injective, and its image is R_f.
  bool fork_exact(FunctionArrow const& r1, FunctionArrow const& r2, FunctionArrow const& f);

  class Fork {
   public:
    struct Parts {
      FiniteAlgebra R;
      FiniteAlgebra A;
      FiniteAlgebra B;
      FunctionArrow r1;
      FunctionArrow r2;
      FunctionArrow f;
    };

    Fork(Backend b, Parts parts);

    Backend const& backend() const noexcept {
      return _backend;
    }
    Parts const& parts() const noexcept {
      return _parts;
    }

   private:
    Backend _backend;
    Parts   _parts;
  };

  bool is_exact_fork(Fork const& fork);

  // C --c--> A
  // |g ^t    |f ^s
  // D --d--> B
  class SquareDiagram {
   public:
    struct Parts {
      FiniteAlgebra C;
      FiniteAlgebra A;
      FiniteAlgebra D;
      FiniteAlgebra B;
      FunctionArrow c;
      FunctionArrow g;
      FunctionArrow d;
      FunctionArrow f;
      FunctionArrow s;
      FunctionArrow t;
    };

    SquareDiagram(Backend b, Parts parts);

    Backend const& backend() const noexcept {
      return _backend;
    }
    Parts const& parts() const noexcept {
      return _parts;
    }

   private:
    Backend _backend;
    Parts   _parts;
  };

  // The pairing x -> (g(x), c(x)) into D *_B A.
  FunctionArrow pairing(SquareDiagram const& sq, Pullback const& corner);
  bool          is_regular_pushout(SquareDiagram const& sq);
  // c g° = f° d
  bool regular_pushout_relational(SquareDiagram const& sq);

  class CubeDiagram {
   public:
    struct Parts {
      SquareDiagram front;
      FiniteAlgebra W;
      FiniteAlgebra Y;
      FunctionArrow w;
      FunctionArrow delta;
      FunctionArrow beta;
    };

    explicit CubeDiagram(Parts parts);

    Parts const& parts() const noexcept {
      return _parts;
    }
    Backend const& backend() const noexcept {
      return _parts.front.backend();
    }
    // V = W *_D C with k = first, gamma = second.
    Pullback const& back_corner() const noexcept {
      return _v;
    }
    // X = Y *_B A with h = first, alpha = second.
    Pullback const& front_corner() const noexcept {
      return _x;
    }
    FunctionArrow const& j() const noexcept {
      return _j;
    }
    FunctionArrow const& i() const noexcept {
      return _i;
    }

   private:
    Parts         _parts;
    Pullback      _v;
    Pullback      _x;
    FunctionArrow _j;
    FunctionArrow _i;
  };

  // W = D, Y = D, w = id, delta = id, beta = d: the comparison map is the
  // pairing <g, c> into D *_B A.
  CubeDiagram degenerate_cube(SquareDiagram const& sq);

  struct CubeComparison {
    FunctionArrow v;
    bool          is_epi;
  };

  CubeComparison cube_comparison(CubeDiagram const& cube);

  class CuboidDiagram {
   public:
    struct Sections {
      FunctionArrow tbar;  // S -> R_c
      FunctionArrow t;     // D -> C
      FunctionArrow s;     // B -> A
      FunctionArrow jbar;  // R_w -> T
      FunctionArrow j;     // W -> V
      FunctionArrow i;     // Y -> X
    };

    struct Parts {
      // top row T => V -> X
      FiniteAlgebra T;
      FiniteAlgebra V;
      FiniteAlgebra X;
      FunctionArrow t1;
      FunctionArrow t2;
      FunctionArrow v;
      // back row R_w => W -> Y
      FiniteAlgebra Rw;
      FiniteAlgebra W;
      FiniteAlgebra Y;
      FunctionArrow w1;
      FunctionArrow w2;
      FunctionArrow w;
      // middle row R_c => C -> A
      FiniteAlgebra Rc;
      FiniteAlgebra C;
      FiniteAlgebra A;
      FunctionArrow c1;
      FunctionArrow c2;
      FunctionArrow c;
      // bottom row S => D -> B
      FiniteAlgebra S;
      FiniteAlgebra D;
      FiniteAlgebra B;
      FunctionArrow s1;
      FunctionArrow s2;
      FunctionArrow d;
      // diamonds
      FunctionArrow kbar;      // T -> R_w
      FunctionArrow gammabar;  // T -> R_c
      FunctionArrow deltabar;  // R_w -> S
      FunctionArrow gbar;      // R_c -> S
      FunctionArrow k;         // V -> W
      FunctionArrow gamma;     // V -> C
      FunctionArrow delta;     // W -> D
      FunctionArrow g;         // C -> D
      FunctionArrow h;         // X -> Y
      FunctionArrow alpha;     // X -> A
      FunctionArrow beta;      // Y -> B
      FunctionArrow f;         // A -> B

      std::optional<Sections> sections;
    };

    // Checks every commutation, joint injectivity of the four pairs,
    // backend validity, and the split or regular conditions on the diamond
    // verticals. Throws StructuralError naming the first failure.
    CuboidDiagram(Backend b, Parts parts);

    Backend const& backend() const noexcept {
      return _backend;
    }
    Parts const& parts() const noexcept {
      return _parts;
    }
    bool is_split() const noexcept {
      return _parts.sections.has_value();
    }

   private:
    Backend _backend;
    Parts   _parts;
  };

  struct CuboidReport {
    bool lower_exact            = false;
    bool upper_exact            = false;
    bool middle_rows_exact      = false;
    bool diamonds_are_pullbacks = false;
    bool v_surjective           = false;
    bool top_is_kernel_pair     = false;
    bool conforms               = false;
  };

  // Throws StructuralError if a middle row is not exact or a diamond is not
  // a pullback.
  CuboidReport check_cuboid(CuboidDiagram const& cuboid);

  // Kernel pairs of c, d and w with the induced maps, and T the pullback of
  // gbar and deltabar.
  CuboidDiagram build_split_cuboid(CubeDiagram const& cube);

  // The same cuboid with the sections dropped.
  CuboidDiagram without_sections(CuboidDiagram const& cuboid);

}  // namespace permutex
