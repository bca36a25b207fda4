#include "darkamp/error.hpp"

namespace darkamp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownMagic: return "UnknownMagic";
    case ErrorCode::TruncatedHeader: return "TruncatedHeader";
    case ErrorCode::MalformedIpHeader: return "MalformedIpHeader";
    case ErrorCode::MalformedDns: return "MalformedDns";
    case ErrorCode::CompressionLoop: return "CompressionLoop";
    case ErrorCode::InvalidCidr: return "InvalidCidr";
    case ErrorCode::EmptyDatabase: return "EmptyDatabase";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedGeoRow: return "MalformedGeoRow";
    case ErrorCode::ScopeTooSmall: return "ScopeTooSmall";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace darkamp
