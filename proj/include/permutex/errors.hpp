#pragma once

#include <stdexcept>
#include <string>

namespace permutex {

  // Base of every error raised by the library. Callers that only need to
  // distinguish "analysis failed" from "analysis ran" can catch this.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  // Carrier or shape mismatch between composed / compared values.
  class DimensionError : public Error {
   public:
    using Error::Error;
  };

  // An operation was called outside its documented domain.
  class PreconditionError : public Error {
   public:
    using Error::Error;
  };

  // A search or enumeration would exceed its stated bound.
  class ResourceError : public Error {
   public:
    using Error::Error;
  };

  // A diagram violates the commutation / pullback / exactness hypotheses of
  // its shape.
  class StructuralError : public Error {
   public:
    using Error::Error;
  };

  // A name in an expression or file did not resolve.
  class ResolutionError : public Error {
   public:
    using Error::Error;
  };

  class ParseError : public Error {
   public:
    ParseError(std::string const& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column "
                + std::to_string(column) + ")"),
          _line(line),
          _column(column) {}

    explicit ParseError(std::string const& what)
        : Error(what), _line(0), _column(0) {}

    std::size_t line() const noexcept {
      return _line;
    }
    std::size_t column() const noexcept {
      return _column;
    }

   private:
    std::size_t _line;
    std::size_t _column;
  };

}  // namespace permutex
