#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace darkamp {

enum class ErrorCode {
  UnknownMagic,
  TruncatedHeader,
  MalformedIpHeader,
  MalformedDns,
  CompressionLoop,
  InvalidCidr,
  EmptyDatabase,
  EmptyInput,
  MalformedGeoRow,
  ScopeTooSmall,
  InvalidName,
  InvalidScenario,
  InvalidConfig,
  ResourceLimit,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace darkamp
