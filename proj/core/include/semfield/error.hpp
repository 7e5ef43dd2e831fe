#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semfield {

/// Broad failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  ingest,            // input file missing or unreadable
  validation,        // input parsed but violates a contract
  analysis,          // a computation could not be carried out
  invalid_argument,  // caller passed something outside the domain
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace semfield
