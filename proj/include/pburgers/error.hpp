#pragma once

#include <stdexcept>
#include <string>

namespace pburgers {

enum class ErrorKind {
  invalid_parameter,
  out_of_window,
  invalid_path,
  window_too_small,
  corridor_escape,
  oracle_capacity_exceeded,
  invalid_pairing,
  invalid_initial_condition,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure the library reports carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pburgers
