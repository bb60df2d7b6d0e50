#include "permutex/search.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "permutex/rng.hpp"

namespace permutex {

  std::string to_string(SearchMode m) {
    return m == SearchMode::exhaustive ? "exhaustive" : "random";
  }

  std::string to_string(SearchShape s) {
    switch (s) {
      case SearchShape::square: return "square";
      case SearchShape::cube: return "cube";
      case SearchShape::cuboid: return "cuboid";
      case SearchShape::permutation: return "permutation";
    }
    return "?";
  }

  std::optional<SearchMode> parse_mode(std::string const& text) {
    if (text == "exhaustive") {
      return SearchMode::exhaustive;
    }
    if (text == "random") {
      return SearchMode::random;
    }
    return std::nullopt;
  }

  std::optional<SearchShape> parse_shape(std::string const& text) {
    for (auto s : {SearchShape::square, SearchShape::cube, SearchShape::cuboid,
                   SearchShape::permutation}) {
      if (to_string(s) == text) {
        return s;
      }
    }
    return std::nullopt;
  }

  std::size_t worker_count() {
    if (char const* env = std::getenv("PERMUTEX_THREADS")) {
      char* end = nullptr;
      long  n   = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && n > 0) {
        return static_cast<std::size_t>(n);
      }
    }
    return std::max(1u, std::thread::hardware_concurrency());
  }

  ////////////////////////////////////////////////////////////////////////
  // SearchSpace
  ////////////////////////////////////////////////////////////////////////

  namespace {
    // All functions n -> n for n = 6 is 46656 tables; that is where the
    // cached hom lists stop being cheap.
    constexpr std::size_t max_set_carrier = 6;

    bool is_identity(FunctionArrow const& f) {
      auto const& t = f.table();
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != i) {
          return false;
        }
      }
      return true;
    }
  }  // namespace

  SearchSpace::SearchSpace(Backend b, std::vector<FiniteAlgebra> pool)
      : _backend(std::move(b)),
        _pool(std::move(pool)),
        _homs(_pool.size() * _pool.size()),
        _surj(_pool.size() * _pool.size()) {}

  SearchSpace SearchSpace::sets(std::size_t max_carrier) {
    if (max_carrier < 1 || max_carrier > max_set_carrier) {
      throw PreconditionError("set sweeps need 1 <= max_carrier <= "
                              + std::to_string(max_set_carrier));
    }
    std::vector<FiniteAlgebra> pool;
    for (std::size_t n = 1; n <= max_carrier; ++n) {
      pool.emplace_back(Carrier(n));
    }
    return SearchSpace(Backend::sets(), std::move(pool));
  }

  SearchSpace SearchSpace::algebras(FiniteAlgebra const& a, std::size_t max_carrier) {
    if (max_carrier < 1) {
      throw PreconditionError("max_carrier must be at least 1");
    }
    std::vector<FiniteAlgebra> pool;
    auto add = [&](FiniteAlgebra x) {
      if (x.size() > max_carrier) {
        return;
      }
      for (auto const& y : pool) {
        if (y.same_structure(x)) {
          return;
        }
      }
      pool.push_back(std::move(x));
    };
    for (auto const& theta : all_congruences(a)) {
      add(quotient(a, theta).algebra);
    }
    std::size_t const quotients = pool.size();
    for (std::size_t i = 0; i < quotients; ++i) {
      for (std::size_t j = 0; j < quotients; ++j) {
        if (pool[i].size() * pool[j].size() <= max_carrier) {
          add(product(pool[i], pool[j]));
        }
      }
    }
    std::stable_sort(pool.begin(), pool.end(), [](auto const& x, auto const& y) {
      return x.size() < y.size();
    });
    SearchSpace space(Backend::algebras(a.signature()), std::move(pool));
    space._source = a;
    return space;
  }

  std::vector<FunctionArrow> const& SearchSpace::homs(std::size_t from, std::size_t to) const {
    auto& slot = _homs.at(from * _pool.size() + to);
    if (!slot) {
      std::vector<FunctionArrow> out;
      enumerate_homs(_pool[from], _pool[to], [&](FunctionArrow const& f) {
        out.push_back(f);
        return true;
      });
      slot = std::move(out);
    }
    return *slot;
  }

  std::vector<FunctionArrow> const& SearchSpace::surjections(std::size_t from,
                                                             std::size_t to) const {
    auto& slot = _surj.at(from * _pool.size() + to);
    if (!slot) {
      std::vector<FunctionArrow> out;
      if (_pool[to].size() <= _pool[from].size()) {
        for (auto const& f : homs(from, to)) {
          if (f.is_surjective()) {
            out.push_back(f);
          }
        }
      }
      slot = std::move(out);
    }
    return *slot;
  }

  ////////////////////////////////////////////////////////////////////////
  // Enumeration
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct SquareIndex {
      std::size_t C, A, D, B;
    };

    using SquareVisitor = std::function<bool(SquareDiagram const&, SquareIndex const&)>;

    // c with f.c = d.g, c.t = s.d and c onto.
    bool fits_c(FunctionArrow const& c,
                FunctionArrow const& d,
                FunctionArrow const& f,
                FunctionArrow const& s,
                FunctionArrow const& g,
                FunctionArrow const& t) {
      for (Element x = 0; x < c.src().size(); ++x) {
        if (f(c(x)) != d(g(x))) {
          return false;
        }
      }
      for (Element y = 0; y < t.src().size(); ++y) {
        if (c(t(y)) != s(d(y))) {
          return false;
        }
      }
      return true;
    }

    bool squares(SearchSpace const& space, SquareVisitor const& visit) {
      auto const&       pool = space.pool();
      std::size_t const n    = pool.size();
      for (std::size_t C = 0; C < n; ++C) {
        for (std::size_t A = 0; A < n; ++A) {
          for (std::size_t D = 0; D < n; ++D) {
            for (std::size_t B = 0; B < n; ++B) {
              auto const& cs = space.surjections(C, A);
              auto const& gs = space.surjections(C, D);
              if (cs.empty() || gs.empty()) {
                continue;
              }
              for (auto const& d : space.surjections(D, B)) {
                for (auto const& f : space.surjections(A, B)) {
                  for (auto const& s : space.homs(B, A)) {
                    if (!is_identity(then(s, f))) {
                      continue;
                    }
                    for (auto const& g : gs) {
                      for (auto const& t : space.homs(D, C)) {
                        if (!is_identity(then(t, g))) {
                          continue;
                        }
                        for (auto const& c : cs) {
                          if (!fits_c(c, d, f, s, g, t)) {
                            continue;
                          }
                          SquareDiagram sq(space.backend(),
                                           {pool[C], pool[A], pool[D], pool[B], c, g, d,
                                            f, s, t});
                          if (!visit(sq, {C, A, D, B})) {
                            return false;
                          }
                        }
                      }
                    }
                  }
                }
              }
            }
          }
        }
      }
      return true;
    }

    // beta with beta.w = d.delta, if one exists and is a morphism.
    std::optional<FunctionArrow> induced_beta(Backend const&       b,
                                              FiniteAlgebra const& Y,
                                              FiniteAlgebra const& B,
                                              FunctionArrow const& w,
                                              FunctionArrow const& d,
                                              FunctionArrow const& delta) {
      std::size_t const    unset = B.size();
      std::vector<Element> table(Y.size(), static_cast<Element>(unset));
      for (Element x = 0; x < w.src().size(); ++x) {
        Element const target = d(delta(x));
        Element&      slot   = table[w(x)];
        if (slot == unset) {
          slot = target;
        } else if (slot != target) {
          return std::nullopt;
        }
      }
      FunctionArrow beta(Y.carrier(), B.carrier(), std::move(table));
      if (!b.valid_morphism(Y, B, beta)) {
        return std::nullopt;
      }
      return beta;
    }

    // Cubes over one square in canonical order.
    bool cubes_over(SearchSpace const&                             space,
                    SquareDiagram const&                           sq,
                    SquareIndex const&                             idx,
                    std::function<bool(CubeDiagram const&)> const& visit) {
      auto const&       pool = space.pool();
      auto const&       p    = sq.parts();
      std::size_t const n    = pool.size();
      for (std::size_t W = 0; W < n; ++W) {
        for (auto const& delta : space.homs(W, idx.D)) {
          for (std::size_t Y = 0; Y < n; ++Y) {
            for (auto const& w : space.surjections(W, Y)) {
              auto beta = induced_beta(space.backend(), pool[Y], p.B, w, p.d, delta);
              if (!beta) {
                continue;
              }
              CubeDiagram cube({sq, pool[W], pool[Y], w, delta, *beta});
              if (!visit(cube)) {
                return false;
              }
            }
          }
        }
      }
      return true;
    }

    template <typename T>
    T const& pick(std::vector<T> const& xs, SplitMix& rng) {
      return xs[rng.below(xs.size())];
    }

    std::optional<std::size_t> pick_index(std::vector<std::size_t> const& xs, SplitMix& rng) {
      if (xs.empty()) {
        return std::nullopt;
      }
      return xs[rng.below(xs.size())];
    }

    std::optional<std::pair<SquareDiagram, SquareIndex>> random_square_with(
        SearchSpace const& space, SplitMix& rng) {
      auto const&       pool = space.pool();
      std::size_t const n    = pool.size();
      auto at_least = [&](std::size_t size) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n; ++i) {
          if (pool[i].size() >= size) {
            out.push_back(i);
          }
        }
        return out;
      };
      for (int attempt = 0; attempt < random_retries; ++attempt) {
        std::size_t const B = rng.below(n);
        auto              D = pick_index(at_least(pool[B].size()), rng);
        auto              A = pick_index(at_least(pool[B].size()), rng);
        if (!D || !A) {
          continue;
        }
        auto C = pick_index(at_least(std::max(pool[*D].size(), pool[*A].size())), rng);
        if (!C) {
          continue;
        }
        auto const& ds = space.surjections(*D, B);
        auto const& fs = space.surjections(*A, B);
        auto const& gs = space.surjections(*C, *D);
        if (ds.empty() || fs.empty() || gs.empty()) {
          continue;
        }
        auto const& d = pick(ds, rng);
        auto const& f = pick(fs, rng);
        auto const& g = pick(gs, rng);
        std::vector<FunctionArrow> ss, ts, cs;
        for (auto const& s : space.homs(B, *A)) {
          if (is_identity(then(s, f))) {
            ss.push_back(s);
          }
        }
        for (auto const& t : space.homs(*D, *C)) {
          if (is_identity(then(t, g))) {
            ts.push_back(t);
          }
        }
        if (ss.empty() || ts.empty()) {
          continue;
        }
        auto const& s = pick(ss, rng);
        auto const& t = pick(ts, rng);
        for (auto const& c : space.surjections(*C, *A)) {
          if (fits_c(c, d, f, s, g, t)) {
            cs.push_back(c);
          }
        }
        if (cs.empty()) {
          continue;
        }
        auto const& c = pick(cs, rng);
        SquareDiagram sq(space.backend(),
                         {pool[*C], pool[*A], pool[*D], pool[B], c, g, d, f, s, t});
        return std::pair{std::move(sq), SquareIndex{*C, *A, *D, B}};
      }
      return std::nullopt;
    }
  }  // namespace

  std::size_t for_each_square(SearchSpace const&                                 space,
                              std::function<bool(SquareDiagram const&)> const& visit) {
    std::size_t count = 0;
    squares(space, [&](SquareDiagram const& sq, SquareIndex const&) {
      ++count;
      return visit(sq);
    });
    return count;
  }

  std::size_t for_each_cube(SearchSpace const&                               space,
                            std::function<bool(CubeDiagram const&)> const& visit) {
    std::size_t count = 0;
    bool        go    = true;
    squares(space, [&](SquareDiagram const& sq, SquareIndex const& idx) {
      go = cubes_over(space, sq, idx, [&](CubeDiagram const& cube) {
        ++count;
        return visit(cube);
      });
      return go;
    });
    return count;
  }

  std::optional<SquareDiagram> random_square(SearchSpace const&  space,
                                             SearchBounds const& bounds,
                                             std::uint64_t       index) {
    SplitMix rng = SplitMix::for_case(bounds.seed, index);
    auto     r   = random_square_with(space, rng);
    if (!r) {
      return std::nullopt;
    }
    return std::move(r->first);
  }

  std::optional<CubeDiagram> random_cube(SearchSpace const&  space,
                                         SearchBounds const& bounds,
                                         std::uint64_t       index) {
    SplitMix          rng  = SplitMix::for_case(bounds.seed, index);
    auto const&       pool = space.pool();
    std::size_t const n    = pool.size();
    for (int attempt = 0; attempt < random_retries; ++attempt) {
      auto r = random_square_with(space, rng);
      if (!r) {
        return std::nullopt;
      }
      auto const& [sq, idx] = *r;
      std::size_t const W   = rng.below(n);
      std::size_t const Y   = rng.below(n);
      auto const&       ws  = space.surjections(W, Y);
      auto const&       dls = space.homs(W, idx.D);
      if (ws.empty() || dls.empty()) {
        continue;
      }
      auto const& w     = pick(ws, rng);
      auto const& delta = pick(dls, rng);
      auto beta = induced_beta(space.backend(), pool[Y], pool[idx.B], w, sq.parts().d, delta);
      if (!beta) {
        continue;
      }
      return CubeDiagram({sq, pool[W], pool[Y], w, delta, *beta});
    }
    return std::nullopt;
  }

  ////////////////////////////////////////////////////////////////////////
  // Checks
  ////////////////////////////////////////////////////////////////////////

  namespace {
    struct Outcome {
      bool                          disagreement = false;
      std::optional<std::string>    detail;
      std::optional<LabeledDiagram> diagram;
    };

    std::string cell(std::pair<Element, Element> p) {
      return "(" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")";
    }

    Outcome check_square(SquareDiagram const& sq) {
      auto const& p       = sq.parts();
      Pullback    corner  = pullback(sq.backend(), p.D, p.d, p.A, p.f);
      auto        pair_gc = pairing(sq, corner);
      bool        epi     = pair_gc.is_surjective();
      bool        rel     = regular_pushout_relational(sq);
      Outcome     out;
      out.disagreement = epi != rel;
      if (epi && rel) {
        return out;
      }
      std::ostringstream detail;
      if (!epi) {
        std::vector<bool> hit(corner.elements.size(), false);
        for (Element x = 0; x < p.C.size(); ++x) {
          hit[pair_gc(x)] = true;
        }
        auto miss = std::find(hit.begin(), hit.end(), false) - hit.begin();
        detail << "comparison C -> D x_B A misses " << cell(corner.elements[miss]);
      }
      Relation lhs  = compose(opposite(graph(p.g)), graph(p.c));
      Relation rhs  = compose(graph(p.d), opposite(graph(p.f)));
      auto     diff = lhs.first_difference(rhs);
      if (diff) {
        detail << (epi ? "" : "; ") << "c g° and f° d differ at " << cell(*diff);
      }
      if (out.disagreement) {
        detail << "; the two checks disagree";
      }
      out.detail  = detail.str();
      out.diagram = label(sq);
      return out;
    }

    Outcome check_cube(CubeDiagram const& cube) {
      Outcome out;
      auto    cmp = cube_comparison(cube);
      if (cmp.is_epi) {
        return out;
      }
      auto const&       X = cube.front_corner();
      std::vector<bool> hit(X.elements.size(), false);
      for (Element x = 0; x < cmp.v.src().size(); ++x) {
        hit[cmp.v(x)] = true;
      }
      auto miss   = std::find(hit.begin(), hit.end(), false) - hit.begin();
      out.detail  = "comparison v: V -> X misses " + cell(X.elements[miss]);
      out.diagram = label(cube);
      return out;
    }

    Outcome check_split_cuboid(CubeDiagram const& cube) {
      Outcome       out;
      CuboidDiagram cuboid = build_split_cuboid(cube);
      CuboidReport  r      = check_cuboid(cuboid);
      if (r.conforms) {
        return out;
      }
      std::ostringstream detail;
      detail << "lower row exact, upper row not (v onto: " << (r.v_surjective ? "yes" : "no")
             << ", (t1, t2) tabulates R_v: " << (r.top_is_kernel_pair ? "yes" : "no") << ")";
      out.detail  = detail.str();
      out.diagram = label(cuboid);
      return out;
    }

    // Static partition of a batch over the workers; results stay in case
    // order so the merge does not depend on timing.
    template <typename Item, typename Check>
    std::vector<Outcome> check_batch(std::vector<Item> const& items, Check const& check) {
      std::vector<Outcome> results(items.size());
      std::size_t const    workers = std::min(worker_count(), items.size());
      auto                 run     = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          results[i] = check(items[i]);
        }
      };
      if (workers <= 1) {
        run(0, items.size());
        return results;
      }
      std::vector<std::thread> threads;
      std::size_t const        chunk = (items.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(items.size(), lo + chunk);
        if (lo < hi) {
          threads.emplace_back(run, lo, hi);
        }
      }
      for (auto& t : threads) {
        t.join();
      }
      return results;
    }

    constexpr std::size_t batch_size = 1024;

    // Feeds cases to the checker in batches and folds the outcomes into the
    // report. `next(index)` yields the case at `index`, nullopt for a
    // generation failure; `more()` is false when the stream is exhausted.
    template <typename Item, typename Produce, typename Check>
    void drive(SearchReport& report, Produce const& produce, Check const& check) {
      std::vector<Item>        batch;
      std::vector<std::size_t> indices;
      bool                     stop = false;

      auto flush = [&] {
        auto results = check_batch(batch, check);
        for (std::size_t i = 0; i < results.size() && !stop; ++i) {
          report.cases_checked = indices[i] + 1;
          if (results[i].disagreement) {
            ++report.disagreements;
          }
          if (results[i].detail) {
            report.violations.push_back(
                {indices[i], *results[i].detail, std::move(*results[i].diagram)});
            stop = report.first_hit;
          }
        }
        batch.clear();
        indices.clear();
      };

      produce([&](std::size_t index, std::optional<Item> item) {
        if (item) {
          batch.push_back(std::move(*item));
          indices.push_back(index);
        } else {
          ++report.generation_errors;
        }
        if (batch.size() == batch_size) {
          flush();
        }
        return !stop;
      });
      if (!stop && !batch.empty()) {
        flush();
      }
    }

    // Exhaustive producers: truncation is flagged when a case beyond
    // max_cases exists.
    template <typename Item, typename ForEach>
    auto exhaustive(SearchReport& report, ForEach const& for_each) {
      return [&report, for_each](auto const& emit) {
        std::size_t index = 0;
        for_each([&](Item const& item) {
          if (index == report.bounds.max_cases) {
            report.truncated = true;
            return false;
          }
          return emit(index++, std::optional<Item>(item));
        });
      };
    }

    template <typename Item, typename Generate>
    auto sampled(SearchReport& report, Generate const& generate) {
      return [&report, generate](auto const& emit) {
        for (std::size_t index = 0; index < report.bounds.max_cases; ++index) {
          if (!emit(index, generate(index))) {
            return;
          }
        }
      };
    }

    SearchReport start(SearchSpace const& space, SweepOptions const& options) {
      SearchReport report;
      report.shape     = options.shape;
      report.backend   = space.backend().name();
      report.bounds    = options.bounds;
      report.first_hit = options.first_hit;
      if (report.bounds.mode == SearchMode::exhaustive) {
        report.bounds.seed = 0;
      }
      return report;
    }

    void require_cube_bounds(SearchSpace const& space, SearchBounds const& bounds) {
      if (bounds.mode == SearchMode::exhaustive && space.backend().is_set()
          && bounds.max_carrier > max_exhaustive_cube_carrier) {
        throw PreconditionError("exhaustive cube and cuboid sweeps over sets need max_carrier <= "
                                + std::to_string(max_exhaustive_cube_carrier)
                                + "; use random mode");
      }
    }

    void permutation_cases(SearchReport&        report,
                           SearchSpace const&   space,
                           FiniteAlgebra const& x,
                           std::size_t&         index,
                           bool&                stop) {
      struct Surjection {
        FiniteAlgebra target;
        FunctionArrow map;
      };
      std::vector<Surjection> maps;
      if (space.backend().is_set()) {
        for (std::size_t k = 1; k <= std::min(report.bounds.max_carrier, x.size()); ++k) {
          FiniteAlgebra target{Carrier(k)};
          enumerate_homs(x, target, [&](FunctionArrow const& f) {
            if (f.is_surjective()) {
              maps.push_back({target, f});
            }
            return true;
          });
        }
      } else {
        for (auto const& theta : all_congruences(x)) {
          auto q = quotient(x, theta);
          maps.push_back({q.algebra, q.surjection});
        }
      }
      std::vector<Relation> kernels;
      for (auto const& m : maps) {
        kernels.push_back(kernel_pair(m.map));
      }
      for (std::size_t i = 0; i < maps.size() && !stop; ++i) {
        for (std::size_t j = i + 1; j < maps.size() && !stop; ++j) {
          if (index == report.bounds.max_cases) {
            report.truncated = true;
            stop             = true;
            return;
          }
          Relation fg = compose(kernels[i], kernels[j]);
          Relation gf = compose(kernels[j], kernels[i]);
          report.cases_checked = index + 1;
          if (auto diff = fg.first_difference(gf)) {
            report.violations.push_back(
                {index,
                 "kernels " + Congruence::from_relation(kernels[i]).to_string() + " and "
                     + Congruence::from_relation(kernels[j]).to_string()
                     + " do not permute: R_f R_g and R_g R_f differ at " + cell(*diff),
                 label_span(space.backend(), x, maps[i].target, maps[j].target, maps[i].map,
                            maps[j].map)});
            stop = report.first_hit;
          }
          ++index;
        }
      }
    }
  }  // namespace

  SearchReport verify_permutation(SearchSpace const&   space,
                                  FiniteAlgebra const& x,
                                  SearchBounds const&  bounds,
                                  bool                 first_hit) {
    auto const   t0     = std::chrono::steady_clock::now();
    SearchReport report = start(space, {SearchShape::permutation, bounds, first_hit});
    report.bounds.mode  = SearchMode::exhaustive;
    report.bounds.seed  = 0;
    std::size_t index   = 0;
    bool        stop    = false;
    permutation_cases(report, space, x, index, stop);
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
  }

  SearchReport sweep(SearchSpace const& space, SweepOptions const& options) {
    auto const   t0     = std::chrono::steady_clock::now();
    SearchReport report = start(space, options);
    auto const&  bounds = report.bounds;
    bool const   random = bounds.mode == SearchMode::random;

    switch (options.shape) {
      case SearchShape::square: {
        if (random) {
          drive<SquareDiagram>(
              report,
              sampled<SquareDiagram>(
                  report, [&](std::size_t i) { return random_square(space, bounds, i); }),
              check_square);
        } else {
          drive<SquareDiagram>(
              report,
              exhaustive<SquareDiagram>(
                  report, [&](auto const& f) { for_each_square(space, f); }),
              check_square);
        }
        break;
      }
      case SearchShape::cube:
      case SearchShape::cuboid: {
        require_cube_bounds(space, bounds);
        auto check = options.shape == SearchShape::cube ? check_cube : check_split_cuboid;
        if (random) {
          drive<CubeDiagram>(
              report,
              sampled<CubeDiagram>(report,
                                   [&](std::size_t i) { return random_cube(space, bounds, i); }),
              check);
        } else {
          drive<CubeDiagram>(
              report,
              exhaustive<CubeDiagram>(report,
                                      [&](auto const& f) { for_each_cube(space, f); }),
              check);
        }
        break;
      }
      case SearchShape::permutation: {
        report.bounds.mode = SearchMode::exhaustive;
        report.bounds.seed = 0;
        std::size_t index  = 0;
        bool        stop   = false;
        if (space.backend().is_set()) {
          for (auto const& x : space.pool()) {
            permutation_cases(report, space, x, index, stop);
            if (stop) {
              break;
            }
          }
        } else {
          permutation_cases(report, space, *space.source(), index, stop);
        }
        break;
      }
    }
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return report;
  }

  SearchReport search_counterexample(SearchSpace const&  space,
                                     SearchShape         shape,
                                     SearchBounds const& bounds) {
    return sweep(space, {shape, bounds, true});
  }

  ////////////////////////////////////////////////////////////////////////
  // Report output
  ////////////////////////////////////////////////////////////////////////

  std::string SearchReport::machine() const {
    using json      = nlohmann::ordered_json;
    json violations = json::array();
    for (auto const& v : this->violations) {
      violations.push_back({{"index", v.index},
                            {"detail", v.detail},
                            {"diagram", json::parse(serialize_diagram(v.diagram))}});
    }
    json j = {{"shape", to_string(shape)},
              {"backend", backend},
              {"mode", to_string(bounds.mode)},
              {"max_carrier", bounds.max_carrier},
              {"max_cases", bounds.max_cases},
              {"seed", bounds.seed},
              {"first_hit", first_hit},
              {"verdict", verdict()},
              {"cases_checked", cases_checked},
              {"truncated", truncated},
              {"generation_errors", generation_errors},
              {"disagreements", disagreements},
              {"violation_count", this->violations.size()},
              {"violations", violations}};
    return j.dump();
  }

  std::string SearchReport::human() const {
    std::ostringstream out;
    out << "sweep: " << to_string(shape) << " over " << backend << " ("
        << to_string(bounds.mode) << ", max carrier " << bounds.max_carrier;
    if (bounds.mode == SearchMode::random) {
      out << ", seed " << bounds.seed;
    }
    out << ")\n";
    out << "cases checked: " << cases_checked;
    if (truncated) {
      out << " (truncated at " << bounds.max_cases << ")";
    }
    out << "\n";
    if (generation_errors > 0) {
      out << "generation errors: " << generation_errors << "\n";
    }
    if (disagreements > 0) {
      out << "checker disagreements: " << disagreements << "\n";
    }
    out << "verdict: " << verdict() << "\n";
    for (auto const& v : violations) {
      out << "  case " << v.index << ": " << v.detail << "\n";
    }
    out << "elapsed: " << elapsed.count() << " s\n";
    return out.str();
  }

}  // namespace permutex
