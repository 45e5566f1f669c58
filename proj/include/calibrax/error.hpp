#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace calibrax {

// Stable error categories. The CLI prints these names verbatim, so the
// spelling is part of the external interface.
enum class ErrorCode {
  kIo,          // E_IO
  kParse,       // E_PARSE
  kDomain,      // E_DOMAIN: argument outside a documented range
  kDegenerate,  // E_DEGENERATE: data carries no usable information
  kUsage,       // E_USAGE
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace calibrax
