#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace darkamp {

namespace qtype {
inline constexpr std::uint16_t A = 1;
inline constexpr std::uint16_t NS = 2;
inline constexpr std::uint16_t CNAME = 5;
inline constexpr std::uint16_t SOA = 6;
inline constexpr std::uint16_t PTR = 12;
inline constexpr std::uint16_t MX = 15;
inline constexpr std::uint16_t TXT = 16;
inline constexpr std::uint16_t AAAA = 28;
inline constexpr std::uint16_t SRV = 33;
inline constexpr std::uint16_t DS = 43;
inline constexpr std::uint16_t RRSIG = 46;
inline constexpr std::uint16_t DNSKEY = 48;
inline constexpr std::uint16_t ANY = 255;
}  // namespace qtype

inline constexpr std::size_t kDnsHeaderLen = 12;
inline constexpr std::size_t kMaxLabelLen = 63;
inline constexpr std::size_t kMaxWireNameLen = 255;
inline constexpr int kMaxCompressionJumps = 128;

/// Mnemonic for a query type ("ANY", "A", ...), or the RFC 3597 "TYPE<n>" form.
std::string qtype_name(std::uint16_t code);
/// Inverse of qtype_name; accepts mnemonics case-insensitively and "TYPE<n>".
std::optional<std::uint16_t> qtype_from_name(std::string_view name);

struct DnsQuerySummary {
  std::uint16_t transaction_id = 0;
  bool is_query = true;
  std::string qname = ".";  // normalized presentation form
  std::uint16_t qtype = 0;
  std::uint16_t qclass = 1;

  std::string qtype_name() const { return darkamp::qtype_name(qtype); }
  friend bool operator==(const DnsQuerySummary&, const DnsQuerySummary&) = default;
};

/// Why parse_dns_query returned no summary.
enum class DnsSkip { None, Response, NoQuestion };

/// Parses the first question of a DNS query message.
///
/// Responses (QR=1) and messages with QDCOUNT=0 yield nullopt, with the reason
/// in `skip` when given. Throws Error(MalformedDns) on truncation or bad label
/// bytes and Error(CompressionLoop) when compression pointers do not move
/// strictly backwards or exceed the jump budget.
std::optional<DnsQuerySummary> parse_dns_query(std::span<const std::uint8_t> payload, DnsSkip* skip = nullptr);

/// Splits a presentation-format name into raw label bytes, resolving `\.`,
/// `\\` and `\DDD` escapes. The root ("." or "") has no labels. Throws
/// Error(InvalidName) for empty labels, bad escapes or length violations.
std::vector<std::string> name_to_labels(std::string_view name);

/// Renders raw labels in lowercase presentation form; no labels renders ".".
std::string labels_to_name(const std::vector<std::string>& labels);

/// Canonical form: ASCII-lowercased, no trailing dot, root as ".".
/// Idempotent. Throws Error(InvalidName) for names that violate label rules.
std::string normalize_qname(std::string_view name);

/// Rightmost label of a normalized name, or "" for the root.
std::string top_level_label(std::string_view normalized);

}  // namespace darkamp
