#pragma once

#include <stdexcept>
#include <string>

namespace bowenlab {

enum class ErrorKind {
  Input,
  Io,
  Domain,
  ModelRejected,
  EmptySubshift,
  Budget,
  Precondition,
  Degenerate,
  TheoremCheck,
  Consistency,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

// Process exit code for an error kind: 1 input-level, 2 theorem check, 3 consistency.
int exit_code_for(ErrorKind kind) noexcept;

const char* error_kind_name(ErrorKind kind) noexcept;

}  // namespace bowenlab
