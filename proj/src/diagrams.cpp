#include "permutex/diagrams.hpp"

namespace permutex {

  namespace {
    constexpr std::size_t npos = std::size_t(-1);

    void require(bool ok, std::string const& what) {
      if (!ok) {
        throw StructuralError(what);
      }
    }

    void require_equal(FunctionArrow const& x,
                       FunctionArrow const& y,
                       std::string const&   what) {
      require(x == y, "diagram does not commute: " + what);
    }

    void require_object(Backend const&       b,
                        FiniteAlgebra const& x,
                        std::string const&   what) {
      require(b.valid_object(x),
              "object " + what + " does not belong to the " + b.name()
                  + " backend");
    }

    // g after f
    FunctionArrow operator*(FunctionArrow const& g, FunctionArrow const& f) {
      return then(f, g);
    }

    FunctionArrow id(FiniteAlgebra const& x) {
      return FunctionArrow::identity(x.carrier());
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // Backend
  ////////////////////////////////////////////////////////////////////////

  Backend Backend::sets() {
    return Backend({}, false);
  }

  Backend Backend::algebras(Signature signature) {
    return Backend(std::move(signature), true);
  }

  std::string Backend::name() const {
    return is_set() ? "set" : "algebra";
  }

  bool Backend::valid_object(FiniteAlgebra const& x) const {
    return x.signature() == _signature;
  }

  bool Backend::valid_morphism(FiniteAlgebra const& src,
                               FiniteAlgebra const& dst,
                               FunctionArrow const& f) const {
    if (f.src() != src.carrier() || f.dst() != dst.carrier()) {
      return false;
    }
    if (!valid_object(src) || !valid_object(dst)) {
      return false;
    }
    return _signature.empty() || hom_check(src, dst, f);
  }

  void Backend::require_morphism(std::string const&   what,
                                 FiniteAlgebra const& src,
                                 FiniteAlgebra const& dst,
                                 FunctionArrow const& f) const {
    if (f.src() != src.carrier() || f.dst() != dst.carrier()) {
      throw StructuralError("morphism " + what + " has the wrong domain or codomain");
    }
    if (!valid_morphism(src, dst, f)) {
      throw StructuralError("morphism " + what + " is not a morphism of the "
                            + name() + " backend");
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Pullbacks and tabulations
  ////////////////////////////////////////////////////////////////////////

  std::optional<Element> Pullback::index_of(Element x, Element y) const {
    if (x >= x_size || y >= y_size) {
      return std::nullopt;
    }
    auto at = lookup[x * y_size + y];
    if (at == npos) {
      return std::nullopt;
    }
    return static_cast<Element>(at);
  }

  FunctionArrow Pullback::factor(FunctionArrow const& q1, FunctionArrow const& q2) const {
    if (q1.src() != q2.src() || q1.dst().size() != x_size
        || q2.dst().size() != y_size) {
      throw DimensionError("cone legs do not match the pullback");
    }
    std::vector<Element> table(q1.src().size());
    for (Element e = 0; e < table.size(); ++e) {
      auto at = index_of(q1(e), q2(e));
      if (!at) {
        throw PreconditionError("the given maps do not form a cone over the cospan");
      }
      table[e] = *at;
    }
    return FunctionArrow(q1.src(), object.carrier(), std::move(table));
  }

  Pullback pullback(Backend const&       b,
                    FiniteAlgebra const& x,
                    FunctionArrow const& p,
                    FiniteAlgebra const& y,
                    FunctionArrow const& q) {
    if (p.dst() != q.dst()) {
      throw DimensionError("pullback of maps with different codomains");
    }
    if (p.src() != x.carrier() || q.src() != y.carrier()) {
      throw DimensionError("pullback legs do not start at the given objects");
    }
    std::vector<std::pair<Element, Element>> elements;
    std::vector<std::size_t>                 lookup(x.size() * y.size(), npos);
    for (Element a = 0; a < x.size(); ++a) {
      for (Element c = 0; c < y.size(); ++c) {
        if (p(a) == q(c)) {
          lookup[a * y.size() + c] = elements.size();
          elements.emplace_back(a, c);
        }
      }
    }
    if (elements.empty()) {
      // Only reachable when p and q have disjoint images, which the shapes
      // built here never produce.
      throw PreconditionError("pullback is empty; empty carriers are not supported");
    }
    FiniteAlgebra object = subalgebra_of_product(x, y, elements, x.name() + "x_" + y.name());
    if (!b.valid_object(object)) {
      throw StructuralError("pullback object is not in the backend");
    }
    std::vector<Element> first;
    std::vector<Element> second;
    for (auto [a, c] : elements) {
      first.push_back(a);
      second.push_back(c);
    }
    Carrier const carrier = object.carrier();
    return Pullback{std::move(object),
                    FunctionArrow(carrier, x.carrier(), std::move(first)),
                    FunctionArrow(carrier, y.carrier(), std::move(second)),
                    std::move(elements),
                    x.size(),
                    y.size(),
                    std::move(lookup)};
  }

  bool is_pullback_square(FunctionArrow const& e1,
                          FunctionArrow const& e2,
                          FunctionArrow const& p,
                          FunctionArrow const& q) {
    if (e1.src() != e2.src() || e1.dst() != p.src() || e2.dst() != q.src()
        || p.dst() != q.dst()) {
      return false;
    }
    if (then(e1, p) != then(e2, q)) {
      return false;
    }
    // Count the pairs of the set-level pullback and check the comparison map
    // hits each exactly once.
    std::size_t const        ys = q.src().size();
    std::vector<std::size_t> hits(p.src().size() * ys, 0);
    for (Element e = 0; e < e1.src().size(); ++e) {
      if (++hits[e1(e) * ys + e2(e)] > 1) {
        return false;
      }
    }
    for (Element a = 0; a < p.src().size(); ++a) {
      for (Element c = 0; c < ys; ++c) {
        if (p(a) == q(c) && hits[a * ys + c] == 0) {
          return false;
        }
      }
    }
    return true;
  }

  Tabulation tabulate(Relation const& r) {
    auto pairs = r.pairs();
    if (pairs.empty()) {
      throw PreconditionError("cannot tabulate the empty relation");
    }
    std::vector<Element> p1;
    std::vector<Element> p2;
    for (auto [a, b] : pairs) {
      p1.push_back(a);
      p2.push_back(b);
    }
    Carrier carrier(pairs.size());
    return {carrier,
            FunctionArrow(carrier, r.src(), std::move(p1)),
            FunctionArrow(carrier, r.dst(), std::move(p2))};
  }

  FiniteAlgebra tabulation_object(Backend const&       b,
                                  FiniteAlgebra const& a,
                                  FiniteAlgebra const& c,
                                  Tabulation const&    t,
                                  std::string          name) {
    std::vector<std::pair<Element, Element>> pairs;
    for (Element e = 0; e < t.carrier.size(); ++e) {
      pairs.emplace_back(t.p1(e), t.p2(e));
    }
    FiniteAlgebra out = subalgebra_of_product(a, c, pairs, std::move(name));
    require_object(b, out, out.name());
    return out;
  }

  bool jointly_injective(FunctionArrow const& r1, FunctionArrow const& r2) {
    if (r1.src() != r2.src()) {
      return false;
    }
    std::size_t const ys = r2.dst().size();
    std::vector<bool> seen(r1.dst().size() * ys, false);
    for (Element e = 0; e < r1.src().size(); ++e) {
      auto at = r1(e) * ys + r2(e);
      if (seen[at]) {
        return false;
      }
      seen[at] = true;
    }
    return true;
  }

  bool fork_exact(FunctionArrow const& r1, FunctionArrow const& r2, FunctionArrow const& f) {
    if (!f.is_surjective() || !jointly_injective(r1, r2)) {
      return false;
    }
    Relation image(r1.dst(), r2.dst());
    for (Element e = 0; e < r1.src().size(); ++e) {
      image.insert(r1(e), r2(e));
    }
    return image == kernel_pair(f);
  }

  ////////////////////////////////////////////////////////////////////////
  // Forks
  ////////////////////////////////////////////////////////////////////////

  Fork::Fork(Backend b, Parts parts) : _backend(std::move(b)), _parts(std::move(parts)) {
    auto const& p = _parts;
    _backend.require_morphism("r1", p.R, p.A, p.r1);
    _backend.require_morphism("r2", p.R, p.A, p.r2);
    _backend.require_morphism("f", p.A, p.B, p.f);
    require_equal(p.f * p.r1, p.f * p.r2, "f.r1 = f.r2");
    require(jointly_injective(p.r1, p.r2), "fork legs r1, r2 are not jointly injective");
  }

  bool is_exact_fork(Fork const& fork) {
    auto const& p = fork.parts();
    return fork_exact(p.r1, p.r2, p.f);
  }

  ////////////////////////////////////////////////////////////////////////
  // Squares
  ////////////////////////////////////////////////////////////////////////

  SquareDiagram::SquareDiagram(Backend b, Parts parts)
      : _backend(std::move(b)), _parts(std::move(parts)) {
    auto const& p = _parts;
    require_object(_backend, p.C, "C");
    require_object(_backend, p.A, "A");
    require_object(_backend, p.D, "D");
    require_object(_backend, p.B, "B");
    _backend.require_morphism("c", p.C, p.A, p.c);
    _backend.require_morphism("g", p.C, p.D, p.g);
    _backend.require_morphism("d", p.D, p.B, p.d);
    _backend.require_morphism("f", p.A, p.B, p.f);
    _backend.require_morphism("s", p.B, p.A, p.s);
    _backend.require_morphism("t", p.D, p.C, p.t);
    require_equal(p.f * p.c, p.d * p.g, "f.c = d.g");
    require_equal(p.s * p.d, p.c * p.t, "s.d = c.t");
    require_equal(p.f * p.s, id(p.B), "f.s = 1");
    require_equal(p.g * p.t, id(p.D), "g.t = 1");
    require(p.c.is_surjective(), "c is not surjective");
    require(p.d.is_surjective(), "d is not surjective");
  }

  FunctionArrow pairing(SquareDiagram const& sq, Pullback const& corner) {
    auto const& p = sq.parts();
    return corner.factor(p.g, p.c);
  }

  bool is_regular_pushout(SquareDiagram const& sq) {
    auto const& p      = sq.parts();
    auto        corner = pullback(sq.backend(), p.D, p.d, p.A, p.f);
    return pairing(sq, corner).is_surjective();
  }

  bool regular_pushout_relational(SquareDiagram const& sq) {
    auto const& p = sq.parts();
    // c g° : D -> A, applying g° first.
    Relation lhs = compose(opposite(graph(p.g)), graph(p.c));
    // f° d : D -> A, applying d first.
    Relation rhs = compose(graph(p.d), opposite(graph(p.f)));
    return lhs == rhs;
  }

  ////////////////////////////////////////////////////////////////////////
  // Cubes
  ////////////////////////////////////////////////////////////////////////

  namespace {
    CubeDiagram::Parts const& validate_cube(CubeDiagram::Parts const& parts) {
      auto const& b  = parts.front.backend();
      auto const& sq = parts.front.parts();
      require_object(b, parts.W, "W");
      require_object(b, parts.Y, "Y");
      b.require_morphism("w", parts.W, parts.Y, parts.w);
      b.require_morphism("delta", parts.W, sq.D, parts.delta);
      b.require_morphism("beta", parts.Y, sq.B, parts.beta);
      require(parts.w.is_surjective(), "w is not surjective");
      require_equal(parts.beta * parts.w, sq.d * parts.delta, "beta.w = d.delta");
      return parts;
    }
  }  // namespace

  CubeDiagram::CubeDiagram(Parts parts)
      : _parts(validate_cube(parts)),
        _v(pullback(_parts.front.backend(),
                    _parts.W,
                    _parts.delta,
                    _parts.front.parts().C,
                    _parts.front.parts().g)),
        _x(pullback(_parts.front.backend(),
                    _parts.Y,
                    _parts.beta,
                    _parts.front.parts().A,
                    _parts.front.parts().f)),
        _j(_v.factor(id(_parts.W), _parts.front.parts().t * _parts.delta)),
        _i(_x.factor(id(_parts.Y), _parts.front.parts().s * _parts.beta)) {}

  CubeDiagram degenerate_cube(SquareDiagram const& sq) {
    auto const& p = sq.parts();
    return CubeDiagram({sq, p.D, p.D, id(p.D), id(p.D), p.d});
  }

  CubeComparison cube_comparison(CubeDiagram const& cube) {
    auto const& p  = cube.parts();
    auto const& sq = p.front.parts();
    auto const& V  = cube.back_corner();
    auto const& X  = cube.front_corner();
    FunctionArrow v = X.factor(p.w * V.first, sq.c * V.second);
    bool const    epi = v.is_surjective();
    return {std::move(v), epi};
  }

  ////////////////////////////////////////////////////////////////////////
  // Cuboids
  ////////////////////////////////////////////////////////////////////////

  CuboidDiagram::CuboidDiagram(Backend b, Parts parts)
      : _backend(std::move(b)), _parts(std::move(parts)) {
    auto const& p  = _parts;
    auto const& bk = _backend;

    for (auto const& [name, obj] :
         {std::pair{"T", &p.T}, {"V", &p.V}, {"X", &p.X}, {"R_w", &p.Rw},
          {"W", &p.W}, {"Y", &p.Y}, {"R_c", &p.Rc}, {"C", &p.C}, {"A", &p.A},
          {"S", &p.S}, {"D", &p.D}, {"B", &p.B}}) {
      require_object(bk, *obj, name);
    }

    bk.require_morphism("t1", p.T, p.V, p.t1);
    bk.require_morphism("t2", p.T, p.V, p.t2);
    bk.require_morphism("v", p.V, p.X, p.v);
    bk.require_morphism("w1", p.Rw, p.W, p.w1);
    bk.require_morphism("w2", p.Rw, p.W, p.w2);
    bk.require_morphism("w", p.W, p.Y, p.w);
    bk.require_morphism("c1", p.Rc, p.C, p.c1);
    bk.require_morphism("c2", p.Rc, p.C, p.c2);
    bk.require_morphism("c", p.C, p.A, p.c);
    bk.require_morphism("s1", p.S, p.D, p.s1);
    bk.require_morphism("s2", p.S, p.D, p.s2);
    bk.require_morphism("d", p.D, p.B, p.d);
    bk.require_morphism("kbar", p.T, p.Rw, p.kbar);
    bk.require_morphism("gammabar", p.T, p.Rc, p.gammabar);
    bk.require_morphism("deltabar", p.Rw, p.S, p.deltabar);
    bk.require_morphism("gbar", p.Rc, p.S, p.gbar);
    bk.require_morphism("k", p.V, p.W, p.k);
    bk.require_morphism("gamma", p.V, p.C, p.gamma);
    bk.require_morphism("delta", p.W, p.D, p.delta);
    bk.require_morphism("g", p.C, p.D, p.g);
    bk.require_morphism("h", p.X, p.Y, p.h);
    bk.require_morphism("alpha", p.X, p.A, p.alpha);
    bk.require_morphism("beta", p.Y, p.B, p.beta);
    bk.require_morphism("f", p.A, p.B, p.f);

    require(jointly_injective(p.t1, p.t2), "t1, t2 are not jointly injective");
    require(jointly_injective(p.w1, p.w2), "w1, w2 are not jointly injective");
    require(jointly_injective(p.c1, p.c2), "c1, c2 are not jointly injective");
    require(jointly_injective(p.s1, p.s2), "s1, s2 are not jointly injective");

    // diamonds
    require_equal(p.gbar * p.gammabar, p.deltabar * p.kbar, "gbar.gammabar = deltabar.kbar");
    require_equal(p.g * p.gamma, p.delta * p.k, "g.gamma = delta.k");
    require_equal(p.f * p.alpha, p.beta * p.h, "f.alpha = beta.h");
    // rows against diamonds
    require_equal(p.k * p.t1, p.w1 * p.kbar, "k.t1 = w1.kbar");
    require_equal(p.k * p.t2, p.w2 * p.kbar, "k.t2 = w2.kbar");
    require_equal(p.gamma * p.t1, p.c1 * p.gammabar, "gamma.t1 = c1.gammabar");
    require_equal(p.gamma * p.t2, p.c2 * p.gammabar, "gamma.t2 = c2.gammabar");
    require_equal(p.h * p.v, p.w * p.k, "h.v = w.k");
    require_equal(p.alpha * p.v, p.c * p.gamma, "alpha.v = c.gamma");
    require_equal(p.delta * p.w1, p.s1 * p.deltabar, "delta.w1 = s1.deltabar");
    require_equal(p.delta * p.w2, p.s2 * p.deltabar, "delta.w2 = s2.deltabar");
    require_equal(p.g * p.c1, p.s1 * p.gbar, "g.c1 = s1.gbar");
    require_equal(p.g * p.c2, p.s2 * p.gbar, "g.c2 = s2.gbar");
    require_equal(p.beta * p.w, p.d * p.delta, "beta.w = d.delta");
    require_equal(p.f * p.c, p.d * p.g, "f.c = d.g");

    if (p.sections) {
      auto const& s = *p.sections;
      bk.require_morphism("tbar", p.S, p.Rc, s.tbar);
      bk.require_morphism("t", p.D, p.C, s.t);
      bk.require_morphism("s", p.B, p.A, s.s);
      bk.require_morphism("jbar", p.Rw, p.T, s.jbar);
      bk.require_morphism("j", p.W, p.V, s.j);
      bk.require_morphism("i", p.Y, p.X, s.i);
      require_equal(p.gbar * s.tbar, id(p.S), "gbar.tbar = 1");
      require_equal(p.g * s.t, id(p.D), "g.t = 1");
      require_equal(p.f * s.s, id(p.B), "f.s = 1");
      require_equal(p.kbar * s.jbar, id(p.Rw), "kbar.jbar = 1");
      require_equal(p.k * s.j, id(p.W), "k.j = 1");
      require_equal(p.h * s.i, id(p.Y), "h.i = 1");
      require_equal(p.gammabar * s.jbar, s.tbar * p.deltabar, "gammabar.jbar = tbar.deltabar");
      require_equal(p.gamma * s.j, s.t * p.delta, "gamma.j = t.delta");
      require_equal(p.alpha * s.i, s.s * p.beta, "alpha.i = s.beta");
      require_equal(p.c1 * s.tbar, s.t * p.s1, "c1.tbar = t.s1");
      require_equal(p.c2 * s.tbar, s.t * p.s2, "c2.tbar = t.s2");
      require_equal(p.c * s.t, s.s * p.d, "c.t = s.d");
      require_equal(p.t1 * s.jbar, s.j * p.w1, "t1.jbar = j.w1");
      require_equal(p.t2 * s.jbar, s.j * p.w2, "t2.jbar = j.w2");
      require_equal(p.v * s.j, s.i * p.w, "v.j = i.w");
    } else {
      require(p.gbar.is_surjective(), "gbar is not surjective");
      require(p.g.is_surjective(), "g is not surjective");
      require(p.f.is_surjective(), "f is not surjective");
    }
  }

  CuboidReport check_cuboid(CuboidDiagram const& cuboid) {
    auto const&  p = cuboid.parts();
    CuboidReport r;
    r.middle_rows_exact = fork_exact(p.c1, p.c2, p.c) && fork_exact(p.w1, p.w2, p.w);
    if (!r.middle_rows_exact) {
      throw StructuralError("a middle row of the cuboid is not an exact fork");
    }
    r.diamonds_are_pullbacks = is_pullback_square(p.kbar, p.gammabar, p.deltabar, p.gbar)
                               && is_pullback_square(p.k, p.gamma, p.delta, p.g)
                               && is_pullback_square(p.h, p.alpha, p.beta, p.f);
    if (!r.diamonds_are_pullbacks) {
      throw StructuralError("a diamond of the cuboid is not a pullback");
    }
    r.lower_exact        = fork_exact(p.s1, p.s2, p.d);
    r.v_surjective       = p.v.is_surjective();
    r.top_is_kernel_pair = [&] {
      Relation image(p.V.carrier(), p.V.carrier());
      for (Element e = 0; e < p.T.size(); ++e) {
        image.insert(p.t1(e), p.t2(e));
      }
      return image == kernel_pair(p.v);
    }();
    r.upper_exact = r.v_surjective && r.top_is_kernel_pair;
    r.conforms    = !r.lower_exact || r.upper_exact;
    return r;
  }

  CuboidDiagram build_split_cuboid(CubeDiagram const& cube) {
    auto const& b  = cube.backend();
    auto const& cp = cube.parts();
    auto const& sq = cp.front.parts();
    auto const& V  = cube.back_corner();
    auto const& X  = cube.front_corner();

    Tabulation    tc = tabulate(kernel_pair(sq.c));
    Tabulation    td = tabulate(kernel_pair(sq.d));
    Tabulation    tw = tabulate(kernel_pair(cp.w));
    FiniteAlgebra Rc = tabulation_object(b, sq.C, sq.C, tc, "R_c");
    FiniteAlgebra S  = tabulation_object(b, sq.D, sq.D, td, "S");
    FiniteAlgebra Rw = tabulation_object(b, cp.W, cp.W, tw, "R_w");

    // The pullback of td's legs lets maps into S be induced from pairs.
    Pullback const s_pairs = pullback(b, sq.D, sq.d, sq.D, sq.d);
    auto           into_s  = [&](FunctionArrow const& x1, FunctionArrow const& x2) {
      FunctionArrow u = s_pairs.factor(x1, x2);
      // s_pairs and td enumerate the same pairs in the same order.
      return FunctionArrow(u.src(), S.carrier(), u.table());
    };
    FunctionArrow gbar     = into_s(sq.g * tc.p1, sq.g * tc.p2);
    FunctionArrow deltabar = into_s(cp.delta * tw.p1, cp.delta * tw.p2);

    Pullback const c_pairs = pullback(b, sq.C, sq.c, sq.C, sq.c);
    FunctionArrow  tbar    = [&] {
      FunctionArrow u = c_pairs.factor(sq.t * td.p1, sq.t * td.p2);
      return FunctionArrow(S.carrier(), Rc.carrier(), u.table());
    }();

    Pullback T = pullback(b, Rw, deltabar, Rc, gbar);
    T.object   = T.object.renamed("T");

    FunctionArrow t1   = V.factor(tw.p1 * T.first, tc.p1 * T.second);
    FunctionArrow t2   = V.factor(tw.p2 * T.first, tc.p2 * T.second);
    FunctionArrow jbar = T.factor(id(Rw), tbar * deltabar);
    FunctionArrow v    = cube_comparison(cube).v;

    CuboidDiagram::Parts parts{
        .T        = T.object,
        .V        = V.object.renamed("V"),
        .X        = X.object.renamed("X"),
        .t1       = t1,
        .t2       = t2,
        .v        = v,
        .Rw       = Rw,
        .W        = cp.W,
        .Y        = cp.Y,
        .w1       = tw.p1,
        .w2       = tw.p2,
        .w        = cp.w,
        .Rc       = Rc,
        .C        = sq.C,
        .A        = sq.A,
        .c1       = tc.p1,
        .c2       = tc.p2,
        .c        = sq.c,
        .S        = S,
        .D        = sq.D,
        .B        = sq.B,
        .s1       = td.p1,
        .s2       = td.p2,
        .d        = sq.d,
        .kbar     = T.first,
        .gammabar = T.second,
        .deltabar = deltabar,
        .gbar     = gbar,
        .k        = V.first,
        .gamma    = V.second,
        .delta    = cp.delta,
        .g        = sq.g,
        .h        = X.first,
        .alpha    = X.second,
        .beta     = cp.beta,
        .f        = sq.f,
        .sections = CuboidDiagram::Sections{tbar, sq.t, sq.s, jbar, cube.j(), cube.i()},
    };
    return CuboidDiagram(b, std::move(parts));
  }

  CuboidDiagram without_sections(CuboidDiagram const& cuboid) {
    auto parts     = cuboid.parts();
    parts.sections = std::nullopt;
    return CuboidDiagram(cuboid.backend(), std::move(parts));
  }

}  // namespace permutex
