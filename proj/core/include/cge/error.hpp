#pragma once

#include <stdexcept>
#include <string>

namespace cge {

enum class ErrorKind {
  Argument,
  GenerationFailure,
  SingularLaplacian,
  NoCandidates,
  Factorization,
  Consistency,
  Refusal,
  SolverInternal,
  Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it
// to a stage-tagged diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cge
