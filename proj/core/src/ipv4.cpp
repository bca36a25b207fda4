#include "darkamp/ipv4.hpp"

#include <charconv>

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

bool parse_decimal(std::string_view text, unsigned max, unsigned& out) {
  if (text.empty() || text.size() > 3) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && out <= max;
}

}  // namespace

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text) {
  std::uint32_t value = 0;
  for (int octet = 0; octet < 4; ++octet) {
    auto dot = text.find('.');
    if ((octet < 3) != (dot != std::string_view::npos)) return std::nullopt;
    unsigned part = 0;
    if (!parse_decimal(text.substr(0, dot), 255, part)) return std::nullopt;
    value = (value << 8) | part;
    text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  }
  return Ipv4Address(value);
}

std::string Ipv4Address::to_string() const {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((value_ >> shift) & 0xff);
    if (shift) out += '.';
  }
  return out;
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw Error(ErrorCode::InvalidCidr, "missing prefix length in '" + std::string(text) + "'");
  }
  auto address = Ipv4Address::parse(text.substr(0, slash));
  unsigned length = 0;
  if (!address || !parse_decimal(text.substr(slash + 1), 32, length)) {
    throw Error(ErrorCode::InvalidCidr, "cannot parse '" + std::string(text) + "'");
  }
  Ipv4Prefix prefix{*address, static_cast<int>(length)};
  if ((address->value() & ~prefix.mask()) != 0) {
    throw Error(ErrorCode::InvalidCidr, "host bits set in '" + std::string(text) + "'");
  }
  return prefix;
}

std::string Ipv4Prefix::to_string() const {
  return network.to_string() + "/" + std::to_string(length);
}

}  // namespace darkamp
