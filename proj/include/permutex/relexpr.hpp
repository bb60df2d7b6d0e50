#pragma once

// Expressions over named arrows under composition and opposite, and a
// replayer that checks equational chains by evaluating every line in a
// finite model.
//
// Script syntax, one expression per line:
//
//   expr := name | op(expr) | id(Carrier) | comp(expr, expr, ...)
//
// comp(a, b) applies a first, so "cg°" is written comp(op(g), c). Anything
// after a ';' on a line is kept as the step's justification; lines starting
// with '#' and blank lines are ignored.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permutex/relcore.hpp"

namespace permutex {

  class RelExpr {
   public:
    enum class Kind { arrow, identity, opposite, compose };

    static RelExpr arrow(std::string name);
    static RelExpr identity(std::string carrier);
    static RelExpr op(RelExpr child);
    static RelExpr comp(RelExpr first, RelExpr second);

    Kind kind() const noexcept;
    // Arrow or carrier name; empty for the other kinds.
    std::string const& name() const noexcept;
    // The child of op, or the first factor of comp.
    RelExpr const& first() const;
    // The second factor of comp.
    RelExpr const& second() const;

    std::string to_string() const;

   private:
    struct Node;
    explicit RelExpr(std::shared_ptr<Node const> node)
        : _node(std::move(node)) {}
    std::shared_ptr<Node const> _node;
  };

  class Environment {
   public:
    void bind(std::string const& name, Relation value);
    void bind(std::string const& name, FunctionArrow const& value);
    void bind_carrier(std::string const& name, Carrier value);

    bool has(std::string const& name) const;
    Relation const& relation(std::string const& name) const;
    Carrier carrier(std::string const& name) const;

   private:
    std::map<std::string, Relation> _arrows;
    std::map<std::string, Carrier>  _carriers;
  };

  struct DerivationStep {
    RelExpr     expr;
    std::string justification;
    std::size_t line = 0;
  };

  class Derivation {
   public:
    explicit Derivation(std::vector<DerivationStep> steps);

    std::vector<DerivationStep> const& steps() const noexcept {
      return _steps;
    }
    std::size_t size() const noexcept {
      return _steps.size();
    }

   private:
    std::vector<DerivationStep> _steps;
  };

  struct StepResult {
    // Compares expression `index` with expression `index + 1` (0-based).
    std::size_t                                index;
    bool                                       equal;
    std::optional<std::pair<Element, Element>> first_difference;
  };

  struct DerivationReport {
    std::vector<StepResult> steps;
    bool                    verdict = true;

    std::optional<std::size_t> first_failure() const;
  };

  Relation evaluate(RelExpr const& e, Environment const& env);
  bool check_identity(RelExpr const& lhs, RelExpr const& rhs, Environment const& env);
  DerivationReport check_derivation(Derivation const& d, Environment const& env);

  RelExpr    parse_expression(std::string_view text);
  Derivation parse_derivation(std::string_view text);
  Derivation load_derivation(std::string const& path);

}  // namespace permutex
