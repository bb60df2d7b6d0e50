#include "permutex/relexpr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace permutex {

  struct RelExpr::Node {
    Kind                 kind;
    std::string          name;
    std::vector<RelExpr> children;
  };

  RelExpr RelExpr::arrow(std::string name) {
    return RelExpr(std::make_shared<Node const>(
        Node{Kind::arrow, std::move(name), {}}));
  }

  RelExpr RelExpr::identity(std::string carrier) {
    return RelExpr(std::make_shared<Node const>(
        Node{Kind::identity, std::move(carrier), {}}));
  }

  RelExpr RelExpr::op(RelExpr child) {
    return RelExpr(std::make_shared<Node const>(
        Node{Kind::opposite, {}, {std::move(child)}}));
  }

  RelExpr RelExpr::comp(RelExpr first, RelExpr second) {
    return RelExpr(std::make_shared<Node const>(Node{
        Kind::compose, {}, {std::move(first), std::move(second)}}));
  }

  RelExpr::Kind RelExpr::kind() const noexcept {
    return _node->kind;
  }

  std::string const& RelExpr::name() const noexcept {
    return _node->name;
  }

  RelExpr const& RelExpr::first() const {
    if (_node->children.empty()) {
      throw PreconditionError("expression has no sub-expression");
    }
    return _node->children[0];
  }

  RelExpr const& RelExpr::second() const {
    if (_node->children.size() < 2) {
      throw PreconditionError("expression has no second factor");
    }
    return _node->children[1];
  }

  std::string RelExpr::to_string() const {
    switch (kind()) {
      case Kind::arrow:
        return name();
      case Kind::identity:
        return "id(" + name() + ")";
      case Kind::opposite:
        return "op(" + first().to_string() + ")";
      case Kind::compose: {
        // Left-nested chains print flat, the way the parser accepts them.
        std::vector<RelExpr const*> chain{&second()};
        RelExpr const*              head = &first();
        while (head->kind() == Kind::compose) {
          chain.push_back(&head->second());
          head = &head->first();
        }
        std::string out = "comp(" + head->to_string();
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
          out += ", " + (*it)->to_string();
        }
        return out + ")";
      }
    }
    return {};
  }

  ////////////////////////////////////////////////////////////////////////
  // Environment
  ////////////////////////////////////////////////////////////////////////

  void Environment::bind(std::string const& name, Relation value) {
    if (_arrows.contains(name)) {
      throw ResolutionError("duplicate arrow name '" + name + "'");
    }
    _arrows.emplace(name, std::move(value));
  }

  void Environment::bind(std::string const& name, FunctionArrow const& value) {
    bind(name, graph(value));
  }

  void Environment::bind_carrier(std::string const& name, Carrier value) {
    if (_carriers.contains(name)) {
      throw ResolutionError("duplicate carrier name '" + name + "'");
    }
    _carriers.emplace(name, value);
  }

  bool Environment::has(std::string const& name) const {
    return _arrows.contains(name);
  }

  Relation const& Environment::relation(std::string const& name) const {
    auto it = _arrows.find(name);
    if (it == _arrows.end()) {
      throw ResolutionError("unresolved arrow '" + name + "'");
    }
    return it->second;
  }

  Carrier Environment::carrier(std::string const& name) const {
    auto it = _carriers.find(name);
    if (it == _carriers.end()) {
      throw ResolutionError("unresolved carrier '" + name + "'");
    }
    return it->second;
  }

  ////////////////////////////////////////////////////////////////////////
  // Evaluation
  ////////////////////////////////////////////////////////////////////////

  Relation evaluate(RelExpr const& e, Environment const& env) {
    switch (e.kind()) {
      case RelExpr::Kind::arrow:
        return env.relation(e.name());
      case RelExpr::Kind::identity:
        return Relation::identity(env.carrier(e.name()));
      case RelExpr::Kind::opposite:
        return opposite(evaluate(e.first(), env));
      case RelExpr::Kind::compose: {
        Relation x = evaluate(e.first(), env);
        Relation y = evaluate(e.second(), env);
        if (x.dst() != y.src()) {
          throw DimensionError(
              "cannot compose in " + e.to_string() + ": "
              + e.first().to_string() + " lands in a carrier of size "
              + std::to_string(x.dst().size()) + " but "
              + e.second().to_string() + " starts from one of size "
              + std::to_string(y.src().size()));
        }
        return compose(x, y);
      }
    }
    throw PreconditionError("malformed expression");
  }

  bool check_identity(RelExpr const& lhs, RelExpr const& rhs, Environment const& env) {
    Relation x = evaluate(lhs, env);
    Relation y = evaluate(rhs, env);
    if (x.src() != y.src() || x.dst() != y.dst()) {
      throw DimensionError(lhs.to_string() + " and " + rhs.to_string()
                           + " denote relations of different shape");
    }
    return x == y;
  }

  Derivation::Derivation(std::vector<DerivationStep> steps)
      : _steps(std::move(steps)) {
    if (_steps.size() < 2) {
      throw PreconditionError("a derivation needs at least two expressions, got "
                              + std::to_string(_steps.size()));
    }
  }

  std::optional<std::size_t> DerivationReport::first_failure() const {
    for (auto const& s : steps) {
      if (!s.equal) {
        return s.index;
      }
    }
    return std::nullopt;
  }

  namespace {
    template <typename E>
    [[noreturn]] void rethrow_at(E const& e, std::size_t index) {
      throw E("expression " + std::to_string(index + 1) + ": " + e.what());
    }

    Relation evaluate_step(Derivation const& d, std::size_t i, Environment const& env) {
      try {
        return evaluate(d.steps()[i].expr, env);
      } catch (ResolutionError const& e) {
        rethrow_at(e, i);
      } catch (DimensionError const& e) {
        rethrow_at(e, i);
      }
    }
  }  // namespace

  DerivationReport check_derivation(Derivation const& d, Environment const& env) {
    std::vector<Relation> values;
    values.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      values.push_back(evaluate_step(d, i, env));
    }
    DerivationReport report;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      auto const& x = values[i];
      auto const& y = values[i + 1];
      if (x.src() != y.src() || x.dst() != y.dst()) {
        throw DimensionError("expressions " + std::to_string(i + 1) + " and "
                             + std::to_string(i + 2)
                             + " denote relations of different shape");
      }
      auto diff = x.first_difference(y);
      report.steps.push_back({i, !diff.has_value(), diff});
      report.verdict = report.verdict && !diff.has_value();
    }
    return report;
  }

  ////////////////////////////////////////////////////////////////////////
  // Parsing
  ////////////////////////////////////////////////////////////////////////

  namespace {
    class ExprParser {
     public:
      ExprParser(std::string_view text, std::size_t line)
          : _text(text), _line(line) {}

      RelExpr parse() {
        RelExpr e = expr();
        skip_space();
        if (_pos != _text.size()) {
          fail("unexpected trailing input");
        }
        return e;
      }

     private:
      [[noreturn]] void fail(std::string const& what) const {
        throw ParseError(what, _line, _pos + 1);
      }

      void skip_space() {
        while (_pos < _text.size()
               && std::isspace(static_cast<unsigned char>(_text[_pos]))) {
          ++_pos;
        }
      }

      void expect(char c) {
        skip_space();
        if (_pos >= _text.size() || _text[_pos] != c) {
          fail(std::string("expected '") + c + "'");
        }
        ++_pos;
      }

      bool peek(char c) {
        skip_space();
        return _pos < _text.size() && _text[_pos] == c;
      }

      std::string identifier() {
        skip_space();
        std::size_t start = _pos;
        auto        is_id = [](char ch, bool lead) {
          auto u = static_cast<unsigned char>(ch);
          return std::isalpha(u) || ch == '_' || (!lead && std::isdigit(u));
        };
        if (_pos >= _text.size() || !is_id(_text[_pos], true)) {
          fail("expected a name");
        }
        while (_pos < _text.size() && is_id(_text[_pos], false)) {
          ++_pos;
        }
        return std::string(_text.substr(start, _pos - start));
      }

      RelExpr expr() {
        std::string word = identifier();
        if (!peek('(')) {
          return RelExpr::arrow(word);
        }
        if (word == "op") {
          expect('(');
          RelExpr child = expr();
          expect(')');
          return RelExpr::op(std::move(child));
        }
        if (word == "id") {
          expect('(');
          std::string carrier = identifier();
          expect(')');
          return RelExpr::identity(std::move(carrier));
        }
        if (word == "comp") {
          expect('(');
          RelExpr acc = expr();
          expect(',');
          acc = RelExpr::comp(std::move(acc), expr());
          while (peek(',')) {
            expect(',');
            acc = RelExpr::comp(std::move(acc), expr());
          }
          expect(')');
          return acc;
        }
        fail("unknown operator '" + word + "'");
      }

      std::string_view _text;
      std::size_t      _line;
      std::size_t      _pos = 0;
    };

    std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
      }
      return s;
    }
  }  // namespace

  RelExpr parse_expression(std::string_view text) {
    return ExprParser(text, 1).parse();
  }

  Derivation parse_derivation(std::string_view text) {
    std::vector<DerivationStep> steps;
    std::size_t                 line_no = 0;
    while (!text.empty()) {
      ++line_no;
      auto             eol  = text.find('\n');
      std::string_view line = text.substr(0, eol);
      text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
      if (trim(line).empty() || trim(line).front() == '#') {
        continue;
      }
      std::string_view body = line;
      std::string_view note;
      if (auto semi = line.find(';'); semi != std::string_view::npos) {
        body = line.substr(0, semi);
        note = trim(line.substr(semi + 1));
      }
      steps.push_back({ExprParser(body, line_no).parse(), std::string(note), line_no});
    }
    return Derivation(std::move(steps));
  }

  Derivation load_derivation(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw ResolutionError("cannot open derivation file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_derivation(buffer.str());
  }

}  // namespace permutex
