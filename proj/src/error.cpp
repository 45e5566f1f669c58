#include "calibrax/error.hpp"

namespace calibrax {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return "E_IO";
    case ErrorCode::kParse:
      return "E_PARSE";
    case ErrorCode::kDomain:
      return "E_DOMAIN";
    case ErrorCode::kDegenerate:
      return "E_DEGENERATE";
    case ErrorCode::kUsage:
      return "E_USAGE";
  }
  return "E_UNKNOWN";
}

}  // namespace calibrax
