#pragma once

#include <stdexcept>
#include <string>

namespace embedlab {

enum class ErrorKind {
  SizeLimit,   // truncation level above the configured cap
  Membership,  // point does not belong to the space
  Domain,      // argument outside an operation's domain
  Validation,  // malformed input data (molecule, configuration, file)
  Infeasible,  // the computation has no valid answer for these inputs
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::Membership: return "membership";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Infeasible: return "infeasible";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace embedlab
