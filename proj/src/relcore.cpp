#include "permutex/relcore.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace permutex {

  namespace {
    constexpr std::size_t word_count(std::size_t bits) {
      return (bits + 63) / 64;
    }

    std::string shape(Carrier src, Carrier dst) {
      return std::to_string(src.size()) + "x" + std::to_string(dst.size());
    }
  }  // namespace

  Carrier::Carrier(std::size_t size) : _size(size) {
    if (size == 0) {
      throw PreconditionError("carrier size must be at least 1");
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Relation
  ////////////////////////////////////////////////////////////////////////

  Relation::Relation(Carrier src, Carrier dst)
      : _src(src),
        _dst(dst),
        _words(word_count(dst.size())),
        _bits(src.size() * word_count(dst.size()), 0) {}

  Relation Relation::identity(Carrier a) {
    Relation r(a, a);
    for (Element x = 0; x < a.size(); ++x) {
      r.insert(x, x);
    }
    return r;
  }

  Relation Relation::full(Carrier src, Carrier dst) {
    Relation r(src, dst);
    for (Element x = 0; x < src.size(); ++x) {
      for (Element y = 0; y < dst.size(); ++y) {
        r.insert(x, y);
      }
    }
    return r;
  }

  Relation
  Relation::from_pairs(Carrier                                      src,
                       Carrier                                      dst,
                       std::span<std::pair<Element, Element> const> pairs) {
    Relation r(src, dst);
    for (auto [a, b] : pairs) {
      r.insert(a, b);
    }
    return r;
  }

  void Relation::check_cell(Element a, Element b) const {
    if (a >= _src.size() || b >= _dst.size()) {
      throw DimensionError("cell (" + std::to_string(a) + ", "
                           + std::to_string(b) + ") outside relation of shape "
                           + shape(_src, _dst));
    }
  }

  bool Relation::contains(Element a, Element b) const {
    check_cell(a, b);
    return (row_words(a)[b / 64] >> (b % 64)) & 1U;
  }

  void Relation::insert(Element a, Element b) {
    check_cell(a, b);
    row_words(a)[b / 64] |= std::uint64_t(1) << (b % 64);
  }

  std::size_t Relation::count() const noexcept {
    std::size_t n = 0;
    for (auto w : _bits) {
      n += std::popcount(w);
    }
    return n;
  }

  std::vector<std::pair<Element, Element>> Relation::pairs() const {
    std::vector<std::pair<Element, Element>> out;
    for (Element a = 0; a < _src.size(); ++a) {
      for (Element b : row(a)) {
        out.emplace_back(a, b);
      }
    }
    return out;
  }

  std::vector<Element> Relation::row(Element a) const {
    check_cell(a, 0);
    std::vector<Element> out;
    auto                 words = row_words(a);
    for (std::size_t w = 0; w < _words; ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        out.push_back(static_cast<Element>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  bool Relation::subset_of(Relation const& other) const {
    if (_src != other._src || _dst != other._dst) {
      throw DimensionError("inclusion between relations of shape "
                           + shape(_src, _dst) + " and "
                           + shape(other._src, other._dst));
    }
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      if ((_bits[i] & ~other._bits[i]) != 0) {
        return false;
      }
    }
    return true;
  }

  Relation Relation::intersect(Relation const& other) const {
    if (_src != other._src || _dst != other._dst) {
      throw DimensionError("intersection of relations of different shape");
    }
    Relation r = *this;
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      r._bits[i] &= other._bits[i];
    }
    return r;
  }

  Relation Relation::unite(Relation const& other) const {
    if (_src != other._src || _dst != other._dst) {
      throw DimensionError("union of relations of different shape");
    }
    Relation r = *this;
    for (std::size_t i = 0; i < _bits.size(); ++i) {
      r._bits[i] |= other._bits[i];
    }
    return r;
  }

  std::optional<std::pair<Element, Element>>
  Relation::first_difference(Relation const& other) const {
    if (_src != other._src || _dst != other._dst) {
      throw DimensionError("comparing relations of shape " + shape(_src, _dst)
                           + " and " + shape(other._src, other._dst));
    }
    for (Element a = 0; a < _src.size(); ++a) {
      auto x = row_words(a);
      auto y = other.row_words(a);
      for (std::size_t w = 0; w < _words; ++w) {
        if (x[w] != y[w]) {
          return std::pair<Element, Element>(
              a, static_cast<Element>(w * 64 + std::countr_zero(x[w] ^ y[w])));
        }
      }
    }
    return std::nullopt;
  }

  std::string Relation::to_string() const {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (auto [a, b] : pairs()) {
      out << (first ? "" : ", ") << '(' << a << ',' << b << ')';
      first = false;
    }
    out << '}';
    return out.str();
  }

  Relation compose(Relation const& r, Relation const& s) {
    if (r._dst != s._src) {
      throw DimensionError("cannot compose relations of shape "
                           + shape(r._src, r._dst) + " and "
                           + shape(s._src, s._dst));
    }
    Relation out(r._src, s._dst);
    for (Element a = 0; a < r._src.size(); ++a) {
      auto target = out.row_words(a);
      auto source = r.row_words(a);
      for (std::size_t w = 0; w < r._words; ++w) {
        std::uint64_t bits = source[w];
        while (bits != 0) {
          auto b   = static_cast<Element>(w * 64 + std::countr_zero(bits));
          auto add = s.row_words(b);
          for (std::size_t v = 0; v < out._words; ++v) {
            target[v] |= add[v];
          }
          bits &= bits - 1;
        }
      }
    }
    return out;
  }

  Relation opposite(Relation const& r) {
    Relation out(r._dst, r._src);
    for (auto [a, b] : r.pairs()) {
      out.insert(b, a);
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // FunctionArrow
  ////////////////////////////////////////////////////////////////////////

  FunctionArrow::FunctionArrow(Carrier src, Carrier dst, std::vector<Element> table)
      : _src(src), _dst(dst), _table(std::move(table)) {
    if (_table.size() != src.size()) {
      throw DimensionError("function table has " + std::to_string(_table.size())
                           + " entries but the domain has "
                           + std::to_string(src.size()) + " elements");
    }
    for (std::size_t x = 0; x < _table.size(); ++x) {
      if (_table[x] >= dst.size()) {
        throw DimensionError("function value " + std::to_string(_table[x])
                             + " at " + std::to_string(x)
                             + " is outside a codomain of size "
                             + std::to_string(dst.size()));
      }
    }
  }

  FunctionArrow FunctionArrow::identity(Carrier a) {
    std::vector<Element> table(a.size());
    for (Element x = 0; x < a.size(); ++x) {
      table[x] = x;
    }
    return FunctionArrow(a, a, std::move(table));
  }

  FunctionArrow FunctionArrow::constant(Carrier src, Carrier dst, Element value) {
    return FunctionArrow(src, dst, std::vector<Element>(src.size(), value));
  }

  bool FunctionArrow::is_injective() const {
    std::vector<bool> seen(_dst.size(), false);
    for (auto y : _table) {
      if (seen[y]) {
        return false;
      }
      seen[y] = true;
    }
    return true;
  }

  bool FunctionArrow::is_surjective() const {
    std::vector<bool> seen(_dst.size(), false);
    std::size_t       hit = 0;
    for (auto y : _table) {
      if (!seen[y]) {
        seen[y] = true;
        ++hit;
      }
    }
    return hit == _dst.size();
  }

  std::string FunctionArrow::to_string() const {
    std::ostringstream out;
    out << '[';
    for (std::size_t x = 0; x < _table.size(); ++x) {
      out << (x == 0 ? "" : ",") << _table[x];
    }
    out << ']';
    return out.str();
  }

  Relation graph(FunctionArrow const& f) {
    Relation r(f.src(), f.dst());
    for (Element x = 0; x < f.src().size(); ++x) {
      r.insert(x, f(x));
    }
    return r;
  }

  Relation kernel_pair(FunctionArrow const& f) {
    Relation r(f.src(), f.src());
    for (Element x = 0; x < f.src().size(); ++x) {
      for (Element y = 0; y < f.src().size(); ++y) {
        if (f(x) == f(y)) {
          r.insert(x, y);
        }
      }
    }
    return r;
  }

  FunctionArrow then(FunctionArrow const& f, FunctionArrow const& g) {
    if (f.dst() != g.src()) {
      throw DimensionError("cannot compose functions " + shape(f.src(), f.dst())
                           + " and " + shape(g.src(), g.dst()));
    }
    std::vector<Element> table(f.src().size());
    for (Element x = 0; x < f.src().size(); ++x) {
      table[x] = g(f(x));
    }
    return FunctionArrow(f.src(), g.dst(), std::move(table));
  }

  bool is_regular_epi(FunctionArrow const& f) {
    return f.is_surjective();
  }

  Relation image_along(Relation const& r, FunctionArrow const& f) {
    if (r.src() != f.src() || r.dst() != f.src()) {
      throw DimensionError("image_along: relation and function carriers differ");
    }
    if (!is_regular_epi(f)) {
      throw PreconditionError("image_along requires a surjective function");
    }
    Relation out(f.dst(), f.dst());
    for (auto [x, y] : r.pairs()) {
      out.insert(f(x), f(y));
    }
    return out;
  }

  EqClassification eq_props(Relation const& r) {
    if (r.src() != r.dst()) {
      throw DimensionError("eq_props requires a relation on a single carrier");
    }
    EqClassification e{};
    e.reflexive   = Relation::identity(r.src()).subset_of(r);
    e.symmetric   = opposite(r).subset_of(r);
    e.transitive  = compose(r, r).subset_of(r);
    e.equivalence = e.reflexive && e.symmetric && e.transitive;
    return e;
  }

  EpiMonoFactorization epi_mono_factor(FunctionArrow const& f) {
    std::vector<Element> label(f.dst().size(), 0);
    std::vector<bool>    seen(f.dst().size(), false);
    std::vector<Element> image;
    std::vector<Element> epi(f.src().size());
    for (Element x = 0; x < f.src().size(); ++x) {
      Element y = f(x);
      if (!seen[y]) {
        seen[y]  = true;
        label[y] = static_cast<Element>(image.size());
        image.push_back(y);
      }
      epi[x] = label[y];
    }
    Carrier middle(image.size());
    return {FunctionArrow(f.src(), middle, std::move(epi)),
            FunctionArrow(middle, f.dst(), std::move(image))};
  }

}  // namespace permutex
