#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace engineir {

/// Base of every error the toolchain raises. `code()` is a stable short
/// identifier ("SyntaxError", "ShapeMismatch", ...) used by the CLI and the
/// Python bindings.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string &code() const noexcept { return code_; }

 private:
  std::string code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string &message)
      : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(col) +
                                 ": " + message),
        line_(line), col_(col) {}
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

struct UnknownOp : Error {
  explicit UnknownOp(const std::string &name)
      : Error("UnknownOp", "unknown operator '" + name + "'") {}
};

struct UnboundName : Error {
  explicit UnboundName(const std::string &name)
      : Error("UnboundName", "unbound name '" + name + "'") {}
};

struct DuplicateName : Error {
  explicit DuplicateName(const std::string &name)
      : Error("DuplicateName", "duplicate definition of '" + name + "'") {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string &message)
      : Error("ShapeMismatch", message) {}
};

struct RankError : Error {
  explicit RankError(const std::string &message) : Error("RankError", message) {}
};

class DivisibilityError : public Error {
 public:
  DivisibilityError(int axis, std::int64_t factor, std::int64_t extent)
      : Error("DivisibilityError",
              "factor " + std::to_string(factor) + " on axis " +
                  std::to_string(axis) + " does not evenly divide extent " +
                  std::to_string(extent)),
        axis_(axis), factor_(factor), extent_(extent) {}
  int axis() const noexcept { return axis_; }
  std::int64_t factor() const noexcept { return factor_; }
  std::int64_t extent() const noexcept { return extent_; }

 private:
  int axis_;
  std::int64_t factor_;
  std::int64_t extent_;
};

struct ParamShapeMismatch : Error {
  explicit ParamShapeMismatch(const std::string &message)
      : Error("ParamShapeMismatch", message) {}
};

struct UnboundInput : Error {
  explicit UnboundInput(const std::string &name)
      : Error("UnboundInput", "input '" + name + "' is not bound") {}
};

/// A term violates the structural rules of schedule terms (e.g. a loop
/// wrapped around a buffer, or an engine reading another engine directly).
struct MalformedTerm : Error {
  explicit MalformedTerm(const std::string &message)
      : Error("MalformedTerm", message) {}
};

/// Raised when two e-classes with different analysis data are merged. With
/// the builtin rules this signals an unsound rewrite.
struct AnalysisConflict : Error {
  explicit AnalysisConflict(const std::string &message)
      : Error("AnalysisConflict", message) {}
};

struct EmptyClass : Error {
  explicit EmptyClass(const std::string &message) : Error("EmptyClass", message) {}
};

}  // namespace engineir
