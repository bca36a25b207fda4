#include "darkamp/packet.hpp"

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherArp = 0x0806;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint16_t kEtherQinQ = 0x88a8;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
std::uint32_t be32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
}

void bump(SkipCounters* skips, std::uint64_t SkipCounters::*field) {
  if (skips) ++(skips->*field);
}

}  // namespace

SkipCounters& SkipCounters::operator+=(const SkipCounters& o) {
  arp += o.arp;
  ipv6 += o.ipv6;
  other_link += o.other_link;
  non_udp += o.non_udp;
  fragments += o.fragments;
  truncated_transport += o.truncated_transport;
  unsupported_link += o.unsupported_link;
  return *this;
}

std::optional<PacketRecord> decode_frame(const CapturedFrame& frame, const PcapFileHeader& file,
                                         SkipCounters* skips) {
  std::span<const std::uint8_t> bytes(frame.payload);
  std::size_t l3 = 0;

  switch (file.link_type()) {
    case LinkType::Ethernet: {
      if (bytes.size() < 14) {
        bump(skips, &SkipCounters::other_link);
        return std::nullopt;
      }
      std::uint16_t ether_type = be16(bytes.data() + 12);
      l3 = 14;
      while ((ether_type == kEtherVlan || ether_type == kEtherQinQ) && bytes.size() >= l3 + 4) {
        ether_type = be16(bytes.data() + l3 + 2);
        l3 += 4;
      }
      if (ether_type == kEtherArp) {
        bump(skips, &SkipCounters::arp);
        return std::nullopt;
      }
      if (ether_type == kEtherIpv6) {
        bump(skips, &SkipCounters::ipv6);
        return std::nullopt;
      }
      if (ether_type != kEtherIpv4) {
        bump(skips, &SkipCounters::other_link);
        return std::nullopt;
      }
      break;
    }
    case LinkType::RawIp:
      if (!bytes.empty() && (bytes[0] >> 4) == 6) {
        bump(skips, &SkipCounters::ipv6);
        return std::nullopt;
      }
      break;
    default:
      bump(skips, &SkipCounters::unsupported_link);
      return std::nullopt;
  }

  std::span<const std::uint8_t> ip = bytes.subspan(l3);
  if (ip.size() < 20) throw Error(ErrorCode::MalformedIpHeader, "IPv4 header shorter than 20 bytes");
  if ((ip[0] >> 4) != 4) throw Error(ErrorCode::MalformedIpHeader, "IP version is not 4");
  std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
  if (ihl < 20) throw Error(ErrorCode::MalformedIpHeader, "IHL below 5");
  if (ihl > ip.size()) throw Error(ErrorCode::MalformedIpHeader, "IPv4 header exceeds captured bytes");

  std::uint16_t frag = be16(ip.data() + 6);
  if ((frag & 0x1fff) != 0) {
    bump(skips, &SkipCounters::fragments);
    return std::nullopt;
  }
  if (ip[9] != kProtoUdp) {
    bump(skips, &SkipCounters::non_udp);
    return std::nullopt;
  }

  // Trust total_length only to shrink the view (Ethernet padding); never to grow it.
  std::size_t total_len = be16(ip.data() + 2);
  std::size_t ip_end = total_len >= ihl && total_len < ip.size() ? total_len : ip.size();
  std::span<const std::uint8_t> udp = ip.subspan(ihl, ip_end - ihl);
  if (udp.size() < 8) {
    bump(skips, &SkipCounters::truncated_transport);
    return std::nullopt;
  }
  std::size_t udp_len = be16(udp.data() + 4);
  std::size_t payload_len = udp.size() - 8;
  if (udp_len >= 8 && udp_len - 8 < payload_len) payload_len = udp_len - 8;

  PacketRecord rec;
  rec.timestamp = frame.timestamp(file.precision);
  rec.src_ip = Ipv4Address(be32(ip.data() + 12));
  rec.dst_ip = Ipv4Address(be32(ip.data() + 16));
  rec.protocol = ip[9];
  rec.src_port = be16(udp.data());
  rec.dst_port = be16(udp.data() + 2);
  rec.frame_bytes = frame.captured_len;
  rec.udp_payload = udp.subspan(8, payload_len);
  return rec;
}

}  // namespace darkamp
