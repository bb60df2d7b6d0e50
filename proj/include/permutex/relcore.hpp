#pragma once

// Finite carriers, binary relations between them, and total functions.
//
// Composition is written in diagrammatic order throughout: compose(r, s)
// applies r first and then s, i.e. it is the relation usually written SR.
// Relations are dense bit matrices with each row packed into 64-bit words, so
// composition is a boolean matrix product that ORs whole rows together.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "permutex/errors.hpp"

namespace permutex {

  using Element = std::uint32_t;

  // A finite set {0, ..., size - 1}. Empty carriers are rejected.
  class Carrier {
   public:
    explicit Carrier(std::size_t size);

    std::size_t size() const noexcept {
      return _size;
    }

    friend bool operator==(Carrier const&, Carrier const&) = default;

   private:
    std::size_t _size;
  };

  class Relation {
   public:
    // The empty relation from src to dst.
    Relation(Carrier src, Carrier dst);

    static Relation identity(Carrier a);
    static Relation full(Carrier src, Carrier dst);
    static Relation from_pairs(Carrier                                 src,
                               Carrier                                 dst,
                               std::span<std::pair<Element, Element> const> pairs);

    Carrier src() const noexcept {
      return _src;
    }
    Carrier dst() const noexcept {
      return _dst;
    }

    bool contains(Element a, Element b) const;
    void insert(Element a, Element b);

    std::size_t count() const noexcept;
    // All related pairs, row-major.
    std::vector<std::pair<Element, Element>> pairs() const;
    // Successors of a, ascending.
    std::vector<Element> row(Element a) const;

    bool subset_of(Relation const& other) const;
    Relation intersect(Relation const& other) const;
    Relation unite(Relation const& other) const;

    // First cell (row-major) where the two same-shaped relations differ.
    std::optional<std::pair<Element, Element>>
    first_difference(Relation const& other) const;

    friend bool operator==(Relation const& x, Relation const& y) {
      return x._src == y._src && x._dst == y._dst && x._bits == y._bits;
    }

    std::string to_string() const;

   private:
    friend Relation compose(Relation const&, Relation const&);
    friend Relation opposite(Relation const&);

    std::span<std::uint64_t const> row_words(Element a) const noexcept {
      return {_bits.data() + a * _words, _words};
    }
    std::span<std::uint64_t> row_words(Element a) noexcept {
      return {_bits.data() + a * _words, _words};
    }
    void check_cell(Element a, Element b) const;

    Carrier                    _src;
    Carrier                    _dst;
    std::size_t                _words;
    std::vector<std::uint64_t> _bits;
  };

  // A total function between finite carriers.
  class FunctionArrow {
   public:
    FunctionArrow(Carrier src, Carrier dst, std::vector<Element> table);

    static FunctionArrow identity(Carrier a);
    static FunctionArrow constant(Carrier src, Carrier dst, Element value);

    Carrier src() const noexcept {
      return _src;
    }
    Carrier dst() const noexcept {
      return _dst;
    }
    Element operator()(Element x) const {
      return _table.at(x);
    }
    std::vector<Element> const& table() const noexcept {
      return _table;
    }

    bool is_injective() const;
    bool is_surjective() const;

    friend bool operator==(FunctionArrow const&, FunctionArrow const&)
        = default;

    std::string to_string() const;

   private:
    Carrier              _src;
    Carrier              _dst;
    std::vector<Element> _table;
  };

  struct EqClassification {
    bool reflexive;
    bool symmetric;
    bool transitive;
    bool equivalence;

    friend bool operator==(EqClassification const&, EqClassification const&)
        = default;
  };

  // (a, c) iff some b has (a, b) in r and (b, c) in s.
  Relation compose(Relation const& r, Relation const& s);
  Relation opposite(Relation const& r);
  Relation graph(FunctionArrow const& f);
  Relation kernel_pair(FunctionArrow const& f);

  // g after f, as functions.
  FunctionArrow then(FunctionArrow const& f, FunctionArrow const& g);

  // Regular epimorphisms of finite sets are exactly the surjections.
  bool is_regular_epi(FunctionArrow const& f);

  // Pairs (f(x), f(x')) for (x, x') in r. Only defined along surjections.
  Relation image_along(Relation const& r, FunctionArrow const& f);

  EqClassification eq_props(Relation const& r);

  struct EpiMonoFactorization {
    FunctionArrow epi;
    FunctionArrow mono;
  };

  // Image elements are numbered by first occurrence in f's table.
  EpiMonoFactorization epi_mono_factor(FunctionArrow const& f);

}  // namespace permutex
