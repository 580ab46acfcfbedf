#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mcporo {

enum class ErrorKind {
  InvalidArgument,
  NonConforming,
  ContinuumStarvation,
  UnknownBoundaryTag,
  SingularSystem,
  SaddleSingular,
  MissingTensor,
  ZeroDenominator,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so that callers (and
/// the CLI exit path) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 protected:
  struct Preformatted {};
  Error(ErrorKind kind, const std::string& message, Preformatted) : std::runtime_error(message), kind_(kind) {}

 private:
  ErrorKind kind_;
};

/// Wraps an error raised inside a pipeline stage with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.kind(), "[" + stage + "] " + inner.what(), Preformatted{}), stage_(std::move(stage)) {}

  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace mcporo
