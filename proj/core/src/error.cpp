#include "semfield/error.hpp"

namespace semfield {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ingest: return "ingest";
    case ErrorKind::validation: return "validation";
    case ErrorKind::analysis: return "analysis";
    case ErrorKind::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace semfield
