#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darkamp/timestamp.hpp"

namespace darkamp {

/// Link-layer header type from the pcap global header.
enum class LinkType : std::uint32_t {
  Ethernet = 1,
  RawIp = 101,
};

enum class TimePrecision { Micro, Nano };

struct PcapFileHeader {
  std::uint16_t version_major = 2;
  std::uint16_t version_minor = 4;
  std::int32_t thiszone = 0;
  std::uint32_t sigfigs = 0;
  std::uint32_t snaplen = 65535;
  std::uint32_t network = static_cast<std::uint32_t>(LinkType::Ethernet);
  TimePrecision precision = TimePrecision::Micro;
  bool byte_swapped = false;

  LinkType link_type() const { return static_cast<LinkType>(network); }
};

struct CapturedFrame {
  std::uint32_t ts_seconds = 0;
  std::uint32_t ts_subsec = 0;  // µs or ns, per file precision
  std::uint32_t captured_len = 0;
  std::uint32_t original_len = 0;
  std::vector<std::uint8_t> payload;

  Timestamp timestamp(TimePrecision precision) const;
};

/// Sequential reader for classic (non-ng) pcap files in either byte order.
///
/// The global header is validated on construction. A record whose header or
/// body is shorter than declared, or whose declared length is implausible,
/// ends iteration; it is counted in truncated_records() and its byte offset is
/// kept so callers can report where the file went bad.
class PcapReader {
 public:
  explicit PcapReader(std::istream& in);

  const PcapFileHeader& header() const { return header_; }

  /// Reads the next frame into `frame`, reusing its payload buffer.
  bool next(CapturedFrame& frame);

  std::uint64_t offset() const { return offset_; }
  std::uint64_t frames_read() const { return frames_read_; }
  std::uint64_t truncated_records() const { return truncated_records_; }
  std::optional<std::uint64_t> truncation_offset() const { return truncation_offset_; }

 private:
  std::uint32_t u32(const std::uint8_t* p) const;

  std::istream& in_;
  PcapFileHeader header_;
  std::uint64_t offset_ = 0;
  std::uint64_t frames_read_ = 0;
  std::uint64_t truncated_records_ = 0;
  std::optional<std::uint64_t> truncation_offset_;
  bool done_ = false;
};

struct PcapCapture {
  PcapFileHeader header;
  std::vector<CapturedFrame> frames;
  std::uint64_t truncated_records = 0;
  std::optional<std::uint64_t> truncation_offset;
};

/// Whole-buffer convenience over PcapReader.
PcapCapture parse_pcap_stream(std::span<const std::uint8_t> raw);

/// Little-endian classic pcap writer.
class PcapWriter {
 public:
  PcapWriter(std::ostream& out, LinkType link, TimePrecision precision = TimePrecision::Micro,
             std::uint32_t snaplen = 65535);

  void write(std::uint32_t ts_seconds, std::uint32_t ts_subsec, std::span<const std::uint8_t> frame);

 private:
  std::ostream& out_;
};

}  // namespace darkamp
