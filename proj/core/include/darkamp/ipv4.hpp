#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace darkamp {

/// IPv4 address held in host byte order so that ordering matches dotted-quad order.
class Ipv4Address {
 public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}
  constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  constexpr std::uint32_t value() const { return value_; }

  static std::optional<Ipv4Address> parse(std::string_view text);
  std::string to_string() const;

  friend constexpr auto operator<=>(Ipv4Address, Ipv4Address) = default;

 private:
  std::uint32_t value_ = 0;
};

/// Network prefix with all host bits zero.
struct Ipv4Prefix {
  Ipv4Address network;
  int length = 0;

  constexpr std::uint32_t mask() const {
    return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
  }
  constexpr std::uint32_t first() const { return network.value(); }
  constexpr std::uint32_t last() const { return network.value() | ~mask(); }
  constexpr std::uint64_t size() const { return std::uint64_t{1} << (32 - length); }
  constexpr bool contains(Ipv4Address ip) const { return (ip.value() & mask()) == network.value(); }

  /// Parses `a.b.c.d/len`; throws Error(InvalidCidr) on syntax errors or set host bits.
  static Ipv4Prefix parse(std::string_view text);
  std::string to_string() const;

  friend constexpr auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;
};

}  // namespace darkamp
