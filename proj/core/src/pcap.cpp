#include "darkamp/pcap.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

constexpr std::uint32_t kMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kMagicNano = 0xa1b23c4d;
constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;
// Upper bound on a single record regardless of the advertised snaplen (libpcap's MAXIMUM_SNAPLEN).
constexpr std::uint32_t kMaxRecordLen = 262144;

std::uint32_t load_le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

constexpr std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }
constexpr std::uint16_t bswap16(std::uint16_t v) { return __builtin_bswap16(v); }

std::uint16_t load_le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

void store_le32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void store_le16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

std::size_t read_fully(std::istream& in, std::uint8_t* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

Timestamp CapturedFrame::timestamp(TimePrecision precision) const {
  std::int64_t sub_ns = precision == TimePrecision::Nano ? ts_subsec : std::int64_t{ts_subsec} * 1000;
  return Timestamp{std::int64_t{ts_seconds} * 1'000'000'000 + sub_ns};
}

PcapReader::PcapReader(std::istream& in) : in_(in) {
  std::array<std::uint8_t, kGlobalHeaderLen> raw{};
  std::size_t got = read_fully(in_, raw.data(), raw.size());
  if (got >= 4) {
    std::uint32_t magic = load_le32(raw.data());
    if (magic == kMagicMicro || magic == kMagicNano) {
      header_.byte_swapped = false;
    } else if (bswap32(magic) == kMagicMicro || bswap32(magic) == kMagicNano) {
      header_.byte_swapped = true;
      magic = bswap32(magic);
    } else {
      throw Error(ErrorCode::UnknownMagic, "offset 0: not a classic pcap file");
    }
    header_.precision = magic == kMagicNano ? TimePrecision::Nano : TimePrecision::Micro;
  } else {
    throw Error(ErrorCode::UnknownMagic, "offset 0: file shorter than a pcap magic number");
  }
  if (got < kGlobalHeaderLen) {
    throw Error(ErrorCode::TruncatedHeader, "offset 0: pcap global header is " + std::to_string(got) + " bytes");
  }
  auto u16 = [&](std::size_t at) {
    std::uint16_t v = load_le16(raw.data() + at);
    return header_.byte_swapped ? bswap16(v) : v;
  };
  header_.version_major = u16(4);
  header_.version_minor = u16(6);
  header_.thiszone = static_cast<std::int32_t>(u32(raw.data() + 8));
  header_.sigfigs = u32(raw.data() + 12);
  header_.snaplen = u32(raw.data() + 16);
  header_.network = u32(raw.data() + 20);
  offset_ = kGlobalHeaderLen;
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const {
  std::uint32_t v = load_le32(p);
  return header_.byte_swapped ? bswap32(v) : v;
}

bool PcapReader::next(CapturedFrame& frame) {
  if (done_) return false;
  std::array<std::uint8_t, kRecordHeaderLen> raw{};
  std::size_t got = read_fully(in_, raw.data(), raw.size());
  if (got == 0) {
    done_ = true;
    return false;
  }
  auto fail = [&] {
    done_ = true;
    ++truncated_records_;
    truncation_offset_ = offset_;
    return false;
  };
  if (got < kRecordHeaderLen) return fail();

  std::uint32_t incl = u32(raw.data() + 8);
  std::uint32_t orig = u32(raw.data() + 12);
  std::uint32_t limit = header_.snaplen > kMaxRecordLen ? header_.snaplen : kMaxRecordLen;
  if (incl > limit || incl > orig) return fail();

  frame.ts_seconds = u32(raw.data());
  frame.ts_subsec = u32(raw.data() + 4);
  frame.captured_len = incl;
  frame.original_len = orig;
  frame.payload.resize(incl);
  if (read_fully(in_, frame.payload.data(), incl) < incl) return fail();

  offset_ += kRecordHeaderLen + incl;
  ++frames_read_;
  return true;
}

PcapCapture parse_pcap_stream(std::span<const std::uint8_t> raw) {
  std::istringstream in(std::string(reinterpret_cast<const char*>(raw.data()), raw.size()));
  PcapReader reader(in);
  PcapCapture capture;
  capture.header = reader.header();
  CapturedFrame frame;
  while (reader.next(frame)) capture.frames.push_back(frame);
  capture.truncated_records = reader.truncated_records();
  capture.truncation_offset = reader.truncation_offset();
  return capture;
}

PcapWriter::PcapWriter(std::ostream& out, LinkType link, TimePrecision precision, std::uint32_t snaplen)
    : out_(out) {
  std::array<std::uint8_t, kGlobalHeaderLen> raw{};
  store_le32(raw.data(), precision == TimePrecision::Nano ? kMagicNano : kMagicMicro);
  store_le16(raw.data() + 4, 2);
  store_le16(raw.data() + 6, 4);
  store_le32(raw.data() + 16, snaplen);
  store_le32(raw.data() + 20, static_cast<std::uint32_t>(link));
  out_.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

void PcapWriter::write(std::uint32_t ts_seconds, std::uint32_t ts_subsec, std::span<const std::uint8_t> frame) {
  std::array<std::uint8_t, kRecordHeaderLen> raw{};
  store_le32(raw.data(), ts_seconds);
  store_le32(raw.data() + 4, ts_subsec);
  store_le32(raw.data() + 8, static_cast<std::uint32_t>(frame.size()));
  store_le32(raw.data() + 12, static_cast<std::uint32_t>(frame.size()));
  out_.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
  if (!out_) throw Error(ErrorCode::Io, "pcap write failed");
}

}  // namespace darkamp
