#include "permutex/algebra.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <string_view>
#include <unordered_set>

namespace permutex {

  namespace {
    std::size_t power(std::size_t n, unsigned k) {
      std::size_t p = 1;
      for (unsigned i = 0; i < k; ++i) {
        p *= n;
      }
      return p;
    }

    std::size_t tuple_index(std::size_t n, std::span<Element const> args) {
      std::size_t idx = 0;
      for (auto a : args) {
        idx = idx * n + a;
      }
      return idx;
    }

    void check_same_signature(FiniteAlgebra const& a, FiniteAlgebra const& b) {
      if (a.signature() != b.signature()) {
        throw DimensionError("algebras '" + a.name() + "' and '" + b.name()
                             + "' have different signatures");
      }
    }

    // Union-find over a carrier, used for congruence closure.
    class Blocks {
     public:
      explicit Blocks(std::size_t n) : _parent(n) {
        std::iota(_parent.begin(), _parent.end(), Element(0));
      }

      Element find(Element x) {
        while (_parent[x] != x) {
          _parent[x] = _parent[_parent[x]];
          x          = _parent[x];
        }
        return x;
      }

      bool merge(Element x, Element y) {
        x = find(x);
        y = find(y);
        if (x == y) {
          return false;
        }
        if (y < x) {
          std::swap(x, y);
        }
        _parent[y] = x;
        return true;
      }

      std::vector<Element> labels() {
        std::vector<Element> out(_parent.size());
        for (Element x = 0; x < out.size(); ++x) {
          out[x] = find(x);
        }
        return out;
      }

     private:
      std::vector<Element> _parent;
    };

    // Closes the partition in `blocks` under compatibility with every
    // operation of `a`.
    void close_under_ops(FiniteAlgebra const& a, Blocks& blocks) {
      std::size_t const    n = a.size();
      std::vector<Element> moved;
      bool                 changed = true;
      while (changed) {
        changed = false;
        for (std::size_t op = 0; op < a.ops().size(); ++op) {
          unsigned const k = a.ops()[op].arity;
          for (unsigned pos = 0; pos < k; ++pos) {
            for_each_tuple(n, k, [&](std::span<Element const> args) {
              Element root = blocks.find(args[pos]);
              if (root == args[pos]) {
                return;
              }
              moved.assign(args.begin(), args.end());
              moved[pos] = root;
              if (blocks.merge(a.apply(op, args), a.apply(op, moved))) {
                changed = true;
              }
            });
          }
        }
      }
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // FiniteAlgebra
  ////////////////////////////////////////////////////////////////////////

  FiniteAlgebra::FiniteAlgebra(std::string name, Carrier carrier, std::vector<OpTable> ops)
      : _name(std::move(name)), _carrier(carrier), _ops(std::move(ops)) {
    std::set<std::string> names;
    for (auto const& op : _ops) {
      if (op.arity > max_arity) {
        throw PreconditionError("operation '" + op.name + "' has arity "
                                + std::to_string(op.arity)
                                + "; at most 3 is supported");
      }
      if (!names.insert(op.name).second) {
        throw PreconditionError("duplicate operation name '" + op.name + "'");
      }
      std::size_t expected = power(carrier.size(), op.arity);
      if (op.table.size() != expected) {
        throw DimensionError("operation '" + op.name + "' needs "
                             + std::to_string(expected) + " table entries, got "
                             + std::to_string(op.table.size()));
      }
      for (auto v : op.table) {
        if (v >= carrier.size()) {
          throw DimensionError("operation '" + op.name + "' has value "
                               + std::to_string(v) + " outside the carrier");
        }
      }
    }
  }

  FiniteAlgebra::FiniteAlgebra(Carrier carrier)
      : FiniteAlgebra("set" + std::to_string(carrier.size()), carrier, {}) {}

  Signature FiniteAlgebra::signature() const {
    Signature sig;
    for (auto const& op : _ops) {
      sig.push_back({op.name, op.arity});
    }
    return sig;
  }

  Element FiniteAlgebra::apply(std::size_t op, std::span<Element const> args) const {
    return _ops[op].table[tuple_index(size(), args)];
  }

  FiniteAlgebra FiniteAlgebra::renamed(std::string name) const {
    FiniteAlgebra copy = *this;
    copy._name         = std::move(name);
    return copy;
  }

  void for_each_tuple(std::size_t                                          n,
                      unsigned                                             arity,
                      std::function<void(std::span<Element const>)> const& f) {
    std::vector<Element> args(arity, 0);
    for (;;) {
      f(args);
      unsigned i = arity;
      while (i > 0) {
        --i;
        if (++args[i] < n) {
          break;
        }
        args[i] = 0;
        if (i == 0) {
          return;
        }
      }
      if (arity == 0) {
        return;
      }
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Congruences
  ////////////////////////////////////////////////////////////////////////

  Congruence::Congruence(Carrier carrier, std::vector<Element> labels)
      : _labels(std::move(labels)), _block_count(0), _relation(carrier, carrier) {
    if (_labels.size() != carrier.size()) {
      throw DimensionError("partition labels do not match the carrier");
    }
    std::vector<Element> rename(carrier.size(), Element(-1));
    for (auto& l : _labels) {
      if (l >= carrier.size()) {
        throw DimensionError("partition label out of range");
      }
      if (rename[l] == Element(-1)) {
        rename[l] = static_cast<Element>(_block_count++);
      }
      l = rename[l];
    }
    for (Element x = 0; x < carrier.size(); ++x) {
      for (Element y = 0; y < carrier.size(); ++y) {
        if (_labels[x] == _labels[y]) {
          _relation.insert(x, y);
        }
      }
    }
  }

  Congruence Congruence::from_relation(Relation const& r) {
    if (!eq_props(r).equivalence) {
      throw PreconditionError("relation " + r.to_string()
                              + " is not an equivalence relation");
    }
    std::vector<Element> labels(r.src().size());
    for (Element x = 0; x < labels.size(); ++x) {
      labels[x] = r.row(x).front();
    }
    return Congruence(r.src(), std::move(labels));
  }

  std::vector<std::vector<Element>> Congruence::blocks() const {
    std::vector<std::vector<Element>> out(_block_count);
    for (Element x = 0; x < _labels.size(); ++x) {
      out[_labels[x]].push_back(x);
    }
    return out;
  }

  std::string Congruence::to_string() const {
    bool const  wide = _labels.size() > 10;
    std::string out  = "{";
    bool        first_block = true;
    for (auto const& block : blocks()) {
      if (!first_block) {
        out += '|';
      }
      first_block = false;
      for (std::size_t i = 0; i < block.size(); ++i) {
        if (wide && i > 0) {
          out += ',';
        }
        out += std::to_string(block[i]);
      }
    }
    return out + "}";
  }

  bool is_congruence(FiniteAlgebra const& a, Relation const& r) {
    if (r.src() != a.carrier() || r.dst() != a.carrier()) {
      throw DimensionError("relation is not on the carrier of '" + a.name() + "'");
    }
    if (!eq_props(r).equivalence) {
      return false;
    }
    // For an equivalence it suffices to vary one argument at a time.
    std::size_t const    n = a.size();
    std::vector<Element> moved;
    for (std::size_t op = 0; op < a.ops().size(); ++op) {
      unsigned const k  = a.ops()[op].arity;
      bool           ok = true;
      for (unsigned pos = 0; pos < k && ok; ++pos) {
        for_each_tuple(n, k, [&](std::span<Element const> args) {
          if (!ok) {
            return;
          }
          Element u = a.apply(op, args);
          moved.assign(args.begin(), args.end());
          for (Element b : r.row(args[pos])) {
            moved[pos] = b;
            if (!r.contains(u, a.apply(op, moved))) {
              ok = false;
              return;
            }
          }
        });
      }
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  Congruence congruence_generated(FiniteAlgebra const&                         a,
                                  std::span<std::pair<Element, Element> const> pairs) {
    Blocks blocks(a.size());
    for (auto [x, y] : pairs) {
      if (x >= a.size() || y >= a.size()) {
        throw DimensionError("generator pair outside the carrier");
      }
      blocks.merge(x, y);
    }
    close_under_ops(a, blocks);
    return Congruence(a.carrier(), blocks.labels());
  }

  namespace {
    std::vector<Congruence> by_partitions(FiniteAlgebra const& a) {
      std::size_t const       n = a.size();
      std::vector<Congruence> out;
      // Restricted growth strings: labels[i] <= 1 + max(labels[0..i)).
      std::vector<Element> labels(n, 0);
      std::vector<Element> prefix_max(n, 0);
      for (;;) {
        Congruence candidate(a.carrier(), labels);
        if (is_congruence(a, candidate.relation())) {
          out.push_back(std::move(candidate));
        }
        std::size_t i = n;
        for (;;) {
          if (i <= 1) {
            return out;
          }
          --i;
          if (labels[i] <= prefix_max[i - 1]) {
            ++labels[i];
            prefix_max[i] = std::max(prefix_max[i - 1], labels[i]);
            for (std::size_t j = i + 1; j < n; ++j) {
              labels[j]     = 0;
              prefix_max[j] = prefix_max[i];
            }
            break;
          }
        }
      }
    }

    Congruence join(FiniteAlgebra const& a, Congruence const& x, Congruence const& y) {
      // Merge each element with the least element of its block in x and y.
      std::vector<Element> first_x(x.block_count(), Element(-1));
      std::vector<Element> first_y(y.block_count(), Element(-1));
      Blocks               joined(a.size());
      for (Element e = 0; e < a.size(); ++e) {
        auto& fx = first_x[x.labels()[e]];
        auto& fy = first_y[y.labels()[e]];
        fx       = fx == Element(-1) ? e : fx;
        fy       = fy == Element(-1) ? e : fy;
        joined.merge(e, fx);
        joined.merge(e, fy);
      }
      return Congruence(a.carrier(), joined.labels());
    }

    std::vector<Congruence> by_principal_joins(FiniteAlgebra const& a) {
      std::size_t const n = a.size();
      std::set<Congruence> found;
      found.insert(Congruence(a.carrier(), [&] {
        std::vector<Element> id(n);
        std::iota(id.begin(), id.end(), Element(0));
        return id;
      }()));
      std::vector<Congruence> principal;
      for (Element x = 0; x < n; ++x) {
        for (Element y = x + 1; y < n; ++y) {
          std::pair<Element, Element> gen{x, y};
          auto c = congruence_generated(a, std::span(&gen, 1));
          if (found.insert(c).second) {
            principal.push_back(c);
          }
        }
      }
      // Every congruence is a join of principal ones; grow joins until no
      // new element appears.
      std::vector<Congruence> frontier(found.begin(), found.end());
      while (!frontier.empty()) {
        std::vector<Congruence> next;
        for (auto const& c : frontier) {
          for (auto const& p : principal) {
            auto j = join(a, c, p);
            if (found.insert(j).second) {
              if (found.size() > max_congruence_count) {
                throw ResourceError("more than "
                                    + std::to_string(max_congruence_count)
                                    + " congruences");
              }
              next.push_back(std::move(j));
            }
          }
        }
        frontier = std::move(next);
      }
      return {found.begin(), found.end()};
    }
  }  // namespace

  std::vector<Congruence> all_congruences(FiniteAlgebra const& a,
                                          CongruenceStrategy   strategy) {
    if (strategy == CongruenceStrategy::automatic) {
      strategy = a.size() <= partition_threshold ? CongruenceStrategy::partitions
                                                 : CongruenceStrategy::principal_joins;
    }
    std::vector<Congruence> out;
    if (strategy == CongruenceStrategy::partitions) {
      if (a.size() > 12) {
        throw ResourceError("partition enumeration is limited to 12 elements");
      }
      out = by_partitions(a);
    } else {
      if (a.size() > max_congruence_carrier) {
        throw ResourceError("congruence enumeration is limited to "
                            + std::to_string(max_congruence_carrier)
                            + " elements");
      }
      out = by_principal_joins(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Permutability
  ////////////////////////////////////////////////////////////////////////

  std::string to_string(PermutabilityClass c) {
    switch (c) {
      case PermutabilityClass::two_permutable:
        return "two_permutable";
      case PermutabilityClass::three_permutable_not_two:
        return "three_permutable_not_two";
      case PermutabilityClass::not_three_permutable:
        return "not_three_permutable";
    }
    return "?";
  }

  namespace {
    std::optional<std::pair<Element, Element>> first_only_in(Relation const& x,
                                                              Relation const& y) {
      for (auto p : x.pairs()) {
        if (!y.contains(p.first, p.second)) {
          return p;
        }
      }
      return std::nullopt;
    }
  }  // namespace

  PermutabilityResult permutability_class(FiniteAlgebra const& a) {
    auto const congruences = all_congruences(a);

    std::optional<PermutabilityWitness> two;
    std::optional<PermutabilityWitness> three;
    for (std::size_t i = 0; i < congruences.size() && !three; ++i) {
      for (std::size_t j = i + 1; j < congruences.size() && !three; ++j) {
        auto const& x  = congruences[i];
        auto const& y  = congruences[j];
        Relation    xy = compose(x.relation(), y.relation());
        Relation    yx = compose(y.relation(), x.relation());
        if (xy == yx) {
          continue;
        }
        if (!two) {
          two = PermutabilityWitness{x, y, *first_only_in(xy, yx)};
        }
        Relation xyx = compose(xy, x.relation());
        Relation yxy = compose(yx, y.relation());
        if (auto cell = first_only_in(xyx, yxy)) {
          three = PermutabilityWitness{x, y, *cell};
        } else if (auto other = first_only_in(yxy, xyx)) {
          three = PermutabilityWitness{y, x, *other};
        }
      }
    }
    if (three) {
      return {PermutabilityClass::not_three_permutable, three};
    }
    if (two) {
      return {PermutabilityClass::three_permutable_not_two, two};
    }
    return {PermutabilityClass::two_permutable, std::nullopt};
  }

  ////////////////////////////////////////////////////////////////////////
  // Mal'tsev terms
  ////////////////////////////////////////////////////////////////////////

  bool is_maltsev_operation(std::size_t n, std::span<Element const> table) {
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        // p(x, y, y) = x and p(x, x, y) = y
        if (table[(x * n + y) * n + y] != x || table[(x * n + x) * n + y] != y) {
          return false;
        }
      }
    }
    return true;
  }

  namespace {
    bool maltsev_bytes(std::size_t n, std::string const& t) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          if (static_cast<unsigned char>(t[(x * n + y) * n + y]) != x
              || static_cast<unsigned char>(t[(x * n + x) * n + y]) != y) {
            return false;
          }
        }
      }
      return true;
    }
  }  // namespace

  MaltsevTermResult find_maltsev_term(FiniteAlgebra const& a, std::size_t budget) {
    std::size_t const n = a.size();
    if (n > 256) {
      throw ResourceError("Mal'tsev term search is limited to 256 elements");
    }
    std::size_t const cells = n * n * n;

    // Ternary term operations as byte strings of length n^3. The deque keeps
    // the strings in place so the hash set can index them by view.
    std::deque<std::string>              terms;
    std::unordered_set<std::string_view> seen;
    MaltsevTermResult                    result;

    auto add = [&](std::string&& t) -> bool {
      if (seen.contains(t)) {
        return false;
      }
      terms.push_back(std::move(t));
      seen.insert(terms.back());
      if (maltsev_bytes(n, terms.back())) {
        result.witness.emplace(terms.back().begin(), terms.back().end());
      }
      if (terms.size() > budget && !result.witness) {
        throw ResourceError("Mal'tsev term search exceeded its budget of "
                            + std::to_string(budget) + " term operations");
      }
      return true;
    };

    for (std::size_t proj = 0; proj < 3; ++proj) {
      std::string t(cells, '\0');
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          for (std::size_t z = 0; z < n; ++z) {
            std::size_t v[] = {x, y, z};
            t[(x * n + y) * n + z] = static_cast<char>(v[proj]);
          }
        }
      }
      add(std::move(t));
    }
    for (std::size_t op = 0; op < a.ops().size(); ++op) {
      if (a.ops()[op].arity == 0) {
        add(std::string(cells, static_cast<char>(a.ops()[op].table[0])));
      }
    }

    std::size_t          frontier = 0;
    std::vector<Element> point;
    std::vector<std::size_t> pick;
    while (!result.witness) {
      std::size_t const known = terms.size();
      for (std::size_t op = 0; op < a.ops().size() && !result.witness; ++op) {
        unsigned const k = a.ops()[op].arity;
        if (k == 0) {
          continue;
        }
        // Every k-tuple of known terms with at least one new component.
        pick.assign(k, 0);
        point.assign(k, 0);
        for (;;) {
          bool fresh = std::any_of(pick.begin(), pick.end(),
                                   [&](std::size_t i) { return i >= frontier; });
          if (fresh) {
            std::string t(cells, '\0');
            for (std::size_t c = 0; c < cells; ++c) {
              for (unsigned i = 0; i < k; ++i) {
                point[i] = static_cast<unsigned char>(terms[pick[i]][c]);
              }
              t[c] = static_cast<char>(a.apply(op, point));
            }
            add(std::move(t));
            if (result.witness) {
              break;
            }
          }
          unsigned i = k;
          while (i > 0 && ++pick[i - 1] == known) {
            pick[--i] = 0;
          }
          if (i == 0) {
            break;
          }
        }
      }
      if (terms.size() == known) {
        break;
      }
      frontier = known;
    }
    result.closure_size = terms.size();
    return result;
  }

  ////////////////////////////////////////////////////////////////////////
  // Quotients and homomorphisms
  ////////////////////////////////////////////////////////////////////////

  Quotient quotient(FiniteAlgebra const& a, Congruence const& theta) {
    if (theta.labels().size() != a.size() || !is_congruence(a, theta.relation())) {
      throw PreconditionError("quotient of '" + a.name() + "' by "
                              + theta.to_string() + ", which is not a congruence");
    }
    auto const           blocks = theta.blocks();
    Carrier const        q(blocks.size());
    std::vector<OpTable> ops;
    std::vector<Element> reps;
    for (std::size_t op = 0; op < a.ops().size(); ++op) {
      OpTable t{a.ops()[op].name, a.ops()[op].arity, {}};
      for_each_tuple(q.size(), t.arity, [&](std::span<Element const> args) {
        reps.clear();
        for (auto b : args) {
          reps.push_back(blocks[b].front());
        }
        t.table.push_back(theta.labels()[a.apply(op, reps)]);
      });
      ops.push_back(std::move(t));
    }
    return {FiniteAlgebra(a.name() + "/" + theta.to_string(), q, std::move(ops)),
            FunctionArrow(a.carrier(), q, theta.labels())};
  }

  bool hom_check(FiniteAlgebra const& a, FiniteAlgebra const& b, FunctionArrow const& f) {
    check_same_signature(a, b);
    if (f.src() != a.carrier() || f.dst() != b.carrier()) {
      throw DimensionError("map does not go from '" + a.name() + "' to '"
                           + b.name() + "'");
    }
    std::vector<Element> image;
    for (std::size_t op = 0; op < a.ops().size(); ++op) {
      bool ok = true;
      for_each_tuple(a.size(), a.ops()[op].arity, [&](std::span<Element const> args) {
        if (!ok) {
          return;
        }
        image.clear();
        for (auto x : args) {
          image.push_back(f(x));
        }
        ok = f(a.apply(op, args)) == b.apply(op, image);
      });
      if (!ok) {
        return false;
      }
    }
    return true;
  }

  namespace {
    class HomSearch {
     public:
      HomSearch(FiniteAlgebra const&                              a,
                FiniteAlgebra const&                              b,
                std::function<bool(FunctionArrow const&)> const& visit)
          : _a(a), _b(b), _visit(visit), _map(a.size(), unassigned) {}

      void run() {
        // Constants are forced before any choice is made.
        if (propagate()) {
          descend(0);
        }
      }

     private:
      static constexpr Element unassigned = Element(-1);

      // Assigns forced values until nothing changes. Returns false on a
      // contradiction; every assignment is recorded on the trail.
      bool propagate() {
        bool changed = true;
        std::vector<Element> image;
        while (changed) {
          changed = false;
          for (std::size_t op = 0; op < _a.ops().size(); ++op) {
            bool ok = true;
            for_each_tuple(_a.size(), _a.ops()[op].arity,
                           [&](std::span<Element const> args) {
                             if (!ok) {
                               return;
                             }
                             image.clear();
                             for (auto x : args) {
                               if (_map[x] == unassigned) {
                                 return;
                               }
                               image.push_back(_map[x]);
                             }
                             Element r = _a.apply(op, args);
                             Element v = _b.apply(op, image);
                             if (_map[r] == unassigned) {
                               _map[r] = v;
                               _trail.push_back(r);
                               changed = true;
                             } else if (_map[r] != v) {
                               ok = false;
                             }
                           });
            if (!ok) {
              return false;
            }
          }
        }
        return true;
      }

      void undo(std::size_t mark) {
        while (_trail.size() > mark) {
          _map[_trail.back()] = unassigned;
          _trail.pop_back();
        }
      }

      bool descend(Element next) {
        while (next < _a.size() && _map[next] != unassigned) {
          ++next;
        }
        if (next == _a.size()) {
          if (!propagate()) {
            return true;
          }
          return _visit(FunctionArrow(_a.carrier(), _b.carrier(), _map));
        }
        for (Element v = 0; v < _b.size(); ++v) {
          std::size_t mark = _trail.size();
          _map[next]       = v;
          _trail.push_back(next);
          if (propagate() && !descend(next + 1)) {
            undo(mark);
            return false;
          }
          undo(mark);
        }
        return true;
      }

      FiniteAlgebra const&                              _a;
      FiniteAlgebra const&                              _b;
      std::function<bool(FunctionArrow const&)> const& _visit;
      std::vector<Element>                              _map;
      std::vector<Element>                              _trail;
    };
  }  // namespace

  void enumerate_homs(FiniteAlgebra const&                              a,
                      FiniteAlgebra const&                              b,
                      std::function<bool(FunctionArrow const&)> const& visit) {
    check_same_signature(a, b);
    HomSearch search(a, b, visit);
    search.run();
  }

  FiniteAlgebra subalgebra_of_product(FiniteAlgebra const&                         x,
                                      FiniteAlgebra const&                         y,
                                      std::span<std::pair<Element, Element> const> pairs,
                                      std::string                                  name) {
    check_same_signature(x, y);
    std::vector<std::size_t> index(x.size() * y.size(), std::size_t(-1));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto [a, b] = pairs[i];
      if (a >= x.size() || b >= y.size()) {
        throw DimensionError("pair outside the product carrier");
      }
      index[a * y.size() + b] = i;
    }
    Carrier const        carrier(pairs.size());
    std::vector<OpTable> ops;
    std::vector<Element> left;
    std::vector<Element> right;
    for (std::size_t op = 0; op < x.ops().size(); ++op) {
      OpTable t{x.ops()[op].name, x.ops()[op].arity, {}};
      for_each_tuple(carrier.size(), t.arity, [&](std::span<Element const> args) {
        left.clear();
        right.clear();
        for (auto e : args) {
          left.push_back(pairs[e].first);
          right.push_back(pairs[e].second);
        }
        auto at = index[x.apply(op, left) * y.size() + y.apply(op, right)];
        if (at == std::size_t(-1)) {
          throw StructuralError("subset of " + x.name() + " x " + y.name()
                                + " is not closed under '" + t.name + "'");
        }
        t.table.push_back(static_cast<Element>(at));
      });
      ops.push_back(std::move(t));
    }
    return FiniteAlgebra(std::move(name), carrier, std::move(ops));
  }

  FiniteAlgebra product(FiniteAlgebra const& x, FiniteAlgebra const& y) {
    std::vector<std::pair<Element, Element>> pairs;
    for (Element a = 0; a < x.size(); ++a) {
      for (Element b = 0; b < y.size(); ++b) {
        pairs.emplace_back(a, b);
      }
    }
    return subalgebra_of_product(x, y, pairs, x.name() + "x" + y.name());
  }

}  // namespace permutex
