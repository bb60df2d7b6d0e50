#pragma once

// Finite algebras given by operation tables, their congruences, and the
// permutability / Mal'tsev-term analyses built on top of them.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "permutex/relcore.hpp"

namespace permutex {

  inline constexpr unsigned max_arity = 3;

  struct OpSignature {
    std::string name;
    unsigned    arity;

    friend bool operator==(OpSignature const&, OpSignature const&) = default;
  };

  using Signature = std::vector<OpSignature>;

  // An operation of arity k on an n-element carrier. The table has n^k
  // entries indexed row-major by the argument tuple, leftmost argument
  // varying slowest.
  struct OpTable {
    std::string          name;
    unsigned             arity = 0;
    std::vector<Element> table;

    friend bool operator==(OpTable const&, OpTable const&) = default;
  };

  class FiniteAlgebra {
   public:
    FiniteAlgebra(std::string name, Carrier carrier, std::vector<OpTable> ops);

    // A bare set: an algebra with the empty signature.
    explicit FiniteAlgebra(Carrier carrier);

    std::string const& name() const noexcept {
      return _name;
    }
    Carrier carrier() const noexcept {
      return _carrier;
    }
    std::size_t size() const noexcept {
      return _carrier.size();
    }
    std::vector<OpTable> const& ops() const noexcept {
      return _ops;
    }
    Signature signature() const;

    Element apply(std::size_t op, std::span<Element const> args) const;

    // Same carrier and identical tables; names are ignored.
    bool same_structure(FiniteAlgebra const& other) const {
      return _carrier == other._carrier && _ops == other._ops;
    }

    FiniteAlgebra renamed(std::string name) const;

   private:
    std::string          _name;
    Carrier              _carrier;
    std::vector<OpTable> _ops;
  };

  // Calls f once for every argument tuple of the given arity over an
  // n-element carrier, in table order.
  void for_each_tuple(std::size_t                                     n,
                      unsigned                                        arity,
                      std::function<void(std::span<Element const>)> const& f);

  class Congruence {
   public:
    // labels[x] is the block of x; relabelled so blocks are numbered by
    // least element.
    Congruence(Carrier carrier, std::vector<Element> labels);

    static Congruence from_relation(Relation const& r);

    Relation const& relation() const noexcept {
      return _relation;
    }
    std::vector<Element> const& labels() const noexcept {
      return _labels;
    }
    std::vector<std::vector<Element>> blocks() const;
    std::size_t block_count() const noexcept {
      return _block_count;
    }

    // Block notation, e.g. "{01|2}".
    std::string to_string() const;

    friend bool operator==(Congruence const& x, Congruence const& y) {
      return x._labels == y._labels;
    }

    // Finer partitions first; ties broken by the label vector.
    friend bool operator<(Congruence const& x, Congruence const& y) {
      if (x._block_count != y._block_count) {
        return x._block_count > y._block_count;
      }
      return x._labels < y._labels;
    }

   private:
    std::vector<Element> _labels;
    std::size_t          _block_count;
    Relation             _relation;
  };

  bool is_congruence(FiniteAlgebra const& a, Relation const& r);

  Congruence congruence_generated(FiniteAlgebra const&                         a,
                                  std::span<std::pair<Element, Element> const> pairs);

  enum class CongruenceStrategy {
    automatic,        // partitions up to 8 elements, principal joins above
    partitions,       // filter every set partition
    principal_joins,  // close principal congruences under join
  };

  inline constexpr std::size_t partition_threshold     = 8;
  inline constexpr std::size_t max_congruence_carrier  = 256;
  inline constexpr std::size_t max_congruence_count    = 100'000;

  std::vector<Congruence>
  all_congruences(FiniteAlgebra const& a,
                  CongruenceStrategy   strategy = CongruenceStrategy::automatic);

  enum class PermutabilityClass {
    two_permutable,
    three_permutable_not_two,
    not_three_permutable,
  };

  std::string to_string(PermutabilityClass c);

  // For three_permutable_not_two: cell is in alpha;beta but not beta;alpha.
  // For not_three_permutable: cell is in alpha;beta;alpha but not
  // beta;alpha;beta.
  struct PermutabilityWitness {
    Congruence                alpha;
    Congruence                beta;
    std::pair<Element, Element> cell;
  };

  struct PermutabilityResult {
    PermutabilityClass                  cls;
    std::optional<PermutabilityWitness> witness;
  };

  // A property of this algebra's congruence lattice only, not of the variety
  // the algebra generates.
  PermutabilityResult permutability_class(FiniteAlgebra const& a);

  inline constexpr std::size_t default_term_budget = 1'000'000;

  struct MaltsevTermResult {
    // Table of p over carrier^3, indexed like a ternary OpTable.
    std::optional<std::vector<Element>> witness;
    // Number of distinct ternary term operations generated.
    std::size_t closure_size = 0;
  };

  // Exact for the given algebra: searches the clone of ternary term
  // operations generated by the projections. Throws ResourceError once more
  // than `budget` term operations have been generated without an answer.
  MaltsevTermResult find_maltsev_term(FiniteAlgebra const& a,
                                      std::size_t budget = default_term_budget);

  bool is_maltsev_operation(std::size_t n, std::span<Element const> table);

  struct Quotient {
    FiniteAlgebra algebra;
    FunctionArrow surjection;
  };

  Quotient quotient(FiniteAlgebra const& a, Congruence const& theta);

  bool hom_check(FiniteAlgebra const& a, FiniteAlgebra const& b, FunctionArrow const& f);

  // Every homomorphism a -> b in lexicographic order of tables. The visitor
  // returns false to stop early.
  void enumerate_homs(FiniteAlgebra const&                              a,
                      FiniteAlgebra const&                              b,
                      std::function<bool(FunctionArrow const&)> const& visit);

  // The subalgebra of x * y on the listed pairs, operations componentwise.
  // Throws StructuralError if the pairs are not closed under the operations.
  FiniteAlgebra subalgebra_of_product(FiniteAlgebra const&                         x,
                                      FiniteAlgebra const&                         y,
                                      std::span<std::pair<Element, Element> const> pairs,
                                      std::string                                  name);

  FiniteAlgebra product(FiniteAlgebra const& x, FiniteAlgebra const& y);

}  // namespace permutex
