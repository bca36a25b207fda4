#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "darkamp/ipv4.hpp"
#include "darkamp/pcap.hpp"
#include "darkamp/timestamp.hpp"

namespace darkamp {

inline constexpr std::uint8_t kProtoUdp = 17;
inline constexpr std::uint16_t kDnsPort = 53;

/// One decoded IPv4/UDP frame. `udp_payload` views into the CapturedFrame it
/// was decoded from and is only valid while that frame is alive and unchanged.
struct PacketRecord {
  Timestamp timestamp;
  Ipv4Address src_ip;
  Ipv4Address dst_ip;
  std::uint8_t protocol = kProtoUdp;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint32_t frame_bytes = 0;
  std::span<const std::uint8_t> udp_payload;
};

/// Frames that decode_frame declined, by reason.
struct SkipCounters {
  std::uint64_t arp = 0;
  std::uint64_t ipv6 = 0;
  std::uint64_t other_link = 0;  // neither IPv4, IPv6 nor ARP
  std::uint64_t non_udp = 0;
  std::uint64_t fragments = 0;
  std::uint64_t truncated_transport = 0;
  std::uint64_t unsupported_link = 0;

  std::uint64_t total() const {
    return arp + ipv6 + other_link + non_udp + fragments + truncated_transport + unsupported_link;
  }
  SkipCounters& operator+=(const SkipCounters& o);
  friend bool operator==(const SkipCounters&, const SkipCounters&) = default;
};

/// Decodes Ethernet (with optional 802.1Q tags) or raw-IP frames down to UDP.
/// Non-IPv4, non-UDP and non-initial fragments yield nullopt and bump `skips`.
/// Throws Error(MalformedIpHeader) when the IPv4 header is inconsistent with
/// the captured bytes.
std::optional<PacketRecord> decode_frame(const CapturedFrame& frame, const PcapFileHeader& file,
                                         SkipCounters* skips = nullptr);

}  // namespace darkamp
