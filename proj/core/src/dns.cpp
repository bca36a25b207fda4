#include "darkamp/dns.hpp"

#include <array>
#include <charconv>
#include <utility>

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

constexpr std::array<std::pair<std::uint16_t, std::string_view>, 32> kTypeNames{{
    {1, "A"},        {2, "NS"},      {5, "CNAME"},   {6, "SOA"},      {12, "PTR"},     {13, "HINFO"},
    {15, "MX"},      {16, "TXT"},    {17, "RP"},     {24, "SIG"},     {25, "KEY"},     {28, "AAAA"},
    {29, "LOC"},     {33, "SRV"},    {35, "NAPTR"},  {39, "DNAME"},   {41, "OPT"},     {43, "DS"},
    {44, "SSHFP"},   {46, "RRSIG"},  {47, "NSEC"},   {48, "DNSKEY"},  {50, "NSEC3"},   {51, "NSEC3PARAM"},
    {52, "TLSA"},    {64, "SVCB"},   {65, "HTTPS"},  {99, "SPF"},     {251, "IXFR"},   {252, "AXFR"},
    {255, "ANY"},    {257, "CAA"},
}};

char ascii_lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

void append_label(std::string& out, std::string_view label) {
  for (char raw : label) {
    auto c = static_cast<unsigned char>(ascii_lower(raw));
    if (c == '.' || c == '\\') {
      out += '\\';
      out += static_cast<char>(c);
    } else if (c > 0x20 && c < 0x7f) {
      out += static_cast<char>(c);
    } else {
      char buf[5];
      buf[0] = '\\';
      buf[1] = static_cast<char>('0' + c / 100);
      buf[2] = static_cast<char>('0' + c / 10 % 10);
      buf[3] = static_cast<char>('0' + c % 10);
      out.append(buf, 4);
    }
  }
}

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }

}  // namespace

std::string qtype_name(std::uint16_t code) {
  for (const auto& [value, name] : kTypeNames) {
    if (value == code) return std::string(name);
  }
  return "TYPE" + std::to_string(code);
}

std::optional<std::uint16_t> qtype_from_name(std::string_view name) {
  std::string upper;
  for (char c : name) upper += (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
  for (const auto& [value, mnemonic] : kTypeNames) {
    if (mnemonic == upper) return value;
  }
  if (upper.size() > 4 && upper.starts_with("TYPE")) {
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(upper.data() + 4, upper.data() + upper.size(), v);
    if (ec == std::errc{} && ptr == upper.data() + upper.size() && v <= 0xffff) return static_cast<std::uint16_t>(v);
  }
  return std::nullopt;
}

std::optional<DnsQuerySummary> parse_dns_query(std::span<const std::uint8_t> payload, DnsSkip* skip) {
  if (skip) *skip = DnsSkip::None;
  if (payload.size() < kDnsHeaderLen) {
    throw Error(ErrorCode::MalformedDns, "payload shorter than the 12-byte header");
  }
  std::uint16_t flags = be16(payload.data() + 2);
  if (flags & 0x8000) {
    if (skip) *skip = DnsSkip::Response;
    return std::nullopt;
  }
  if (be16(payload.data() + 4) == 0) {
    if (skip) *skip = DnsSkip::NoQuestion;
    return std::nullopt;
  }

  DnsQuerySummary out;
  out.transaction_id = be16(payload.data());
  out.is_query = true;
  out.qname.clear();

  std::size_t pos = kDnsHeaderLen;
  std::size_t end_of_name = 0;  // where the question continues after the first pointer
  std::size_t jump_floor = pos;  // every pointer must land strictly below this
  std::size_t wire_len = 1;
  int jumps = 0;
  bool any_label = false;

  for (;;) {
    if (pos >= payload.size()) throw Error(ErrorCode::MalformedDns, "question name runs past end of payload");
    std::uint8_t len = payload[pos];
    if ((len & 0xc0) == 0xc0) {
      if (pos + 1 >= payload.size()) throw Error(ErrorCode::MalformedDns, "truncated compression pointer");
      std::size_t target = static_cast<std::size_t>(be16(payload.data() + pos) & 0x3fff);
      if (end_of_name == 0) end_of_name = pos + 2;
      if (target >= jump_floor || ++jumps > kMaxCompressionJumps) {
        throw Error(ErrorCode::CompressionLoop, "compression pointer at offset " + std::to_string(pos) +
                                                    " does not move backwards");
      }
      jump_floor = target;
      pos = target;
      continue;
    }
    if (len & 0xc0) throw Error(ErrorCode::MalformedDns, "unsupported label type");
    if (len == 0) {
      ++pos;
      break;
    }
    if (pos + 1 + len > payload.size()) throw Error(ErrorCode::MalformedDns, "label runs past end of payload");
    wire_len += 1u + len;
    if (wire_len > kMaxWireNameLen) throw Error(ErrorCode::MalformedDns, "name longer than 255 bytes");
    if (any_label) out.qname += '.';
    append_label(out.qname,
                 std::string_view(reinterpret_cast<const char*>(payload.data() + pos + 1), len));
    any_label = true;
    pos += 1u + len;
    // A pointer must point before the label data we have already consumed.
    if (jumps == 0) jump_floor = pos;
  }
  if (!any_label) out.qname = ".";
  if (end_of_name != 0) pos = end_of_name;
  if (pos + 4 > payload.size()) throw Error(ErrorCode::MalformedDns, "question truncated before QTYPE/QCLASS");
  out.qtype = be16(payload.data() + pos);
  out.qclass = be16(payload.data() + pos + 2);
  return out;
}

std::vector<std::string> name_to_labels(std::string_view name) {
  std::vector<std::string> labels;
  if (name.empty() || name == ".") return labels;
  std::string current;
  std::size_t wire_len = 1;
  auto finish = [&] {
    if (current.empty()) throw Error(ErrorCode::InvalidName, "empty label in '" + std::string(name) + "'");
    if (current.size() > kMaxLabelLen) {
      throw Error(ErrorCode::InvalidName, "label longer than 63 bytes in '" + std::string(name) + "'");
    }
    wire_len += 1 + current.size();
    if (wire_len > kMaxWireNameLen) throw Error(ErrorCode::InvalidName, "name longer than 255 bytes");
    labels.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '.') {
      finish();
      if (i + 1 == name.size()) return labels;  // trailing dot
    } else if (c == '\\') {
      if (i + 1 >= name.size()) throw Error(ErrorCode::InvalidName, "dangling escape");
      char n = name[i + 1];
      if (n >= '0' && n <= '9') {
        if (i + 3 >= name.size()) throw Error(ErrorCode::InvalidName, "short \\DDD escape");
        unsigned v = 0;
        for (std::size_t k = 1; k <= 3; ++k) {
          char d = name[i + k];
          if (d < '0' || d > '9') throw Error(ErrorCode::InvalidName, "bad \\DDD escape");
          v = v * 10 + static_cast<unsigned>(d - '0');
        }
        if (v > 255) throw Error(ErrorCode::InvalidName, "\\DDD escape above 255");
        current += static_cast<char>(v);
        i += 3;
      } else {
        current += n;
        ++i;
      }
    } else {
      current += c;
    }
  }
  finish();
  return labels;
}

std::string labels_to_name(const std::vector<std::string>& labels) {
  if (labels.empty()) return ".";
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += '.';
    append_label(out, labels[i]);
  }
  return out;
}

std::string normalize_qname(std::string_view name) { return labels_to_name(name_to_labels(name)); }

std::string top_level_label(std::string_view normalized) {
  if (normalized.empty() || normalized == ".") return {};
  if (normalized.find('\\') == std::string_view::npos) {
    auto dot = normalized.rfind('.');
    return std::string(dot == std::string_view::npos ? normalized : normalized.substr(dot + 1));
  }
  auto labels = name_to_labels(normalized);
  std::string out;
  append_label(out, labels.back());
  return out;
}

}  // namespace darkamp
