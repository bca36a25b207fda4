#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darkamp/detect.hpp"
#include "darkamp/flow.hpp"
#include "darkamp/geo.hpp"
#include "darkamp/packet.hpp"
#include "darkamp/report.hpp"
#include "darkamp/scope.hpp"

namespace darkamp {

struct AnalysisConfig {
  DetectionConfig detection;
  FlowLimits limits;
  std::int64_t bucket_width_s = 3600;
  std::size_t top_qtypes = 5;
  std::size_t domains_per_attack = 5;
  unsigned threads = 1;
};

/// Where every frame went.
struct IngestStats {
  std::uint64_t frames = 0;
  std::uint64_t truncated_records = 0;
  SkipCounters skipped;
  std::uint64_t malformed_ip = 0;
  std::uint64_t not_dns_port = 0;
  std::uint64_t outside_scope = 0;
  std::uint64_t dns_responses = 0;
  std::uint64_t dns_no_question = 0;
  std::uint64_t malformed_dns = 0;
  std::uint64_t compression_loops = 0;
  std::uint64_t dns_queries = 0;

  IngestStats& operator+=(const IngestStats& o);
  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct InputSummary {
  std::string name;
  std::uint64_t frames = 0;
  std::uint64_t truncated_records = 0;
  std::optional<std::uint64_t> truncation_offset;
};

struct AnalysisResult {
  std::vector<InputSummary> inputs;
  IngestStats stats;
  std::vector<FlowSummary> flows;
  std::vector<AttackRecord> attacks;
  std::map<std::uint16_t, std::uint64_t> qtype_counts;
  std::map<std::string, std::uint64_t> domain_counts;
  TimeSeries series;
};

/// Streams one or more pcap inputs as a single analysis window and produces
/// flows, attacks and the characterization tallies.
///
/// With threads > 1 frames are decoded in parallel and then routed to flow
/// shards by source address; the result is identical for every thread count.
class Analyzer {
 public:
  Analyzer(const DarknetScope& scope, const TldDatabase& db, AnalysisConfig config = {});
  ~Analyzer();
  Analyzer(const Analyzer&) = delete;
  Analyzer& operator=(const Analyzer&) = delete;

  /// Throws Error(UnknownMagic / TruncatedHeader) prefixed with `name` when
  /// the global header is unusable. Damaged records end the input and are
  /// reported in the InputSummary instead.
  void ingest(std::istream& in, const std::string& name);
  void ingest_file(const std::filesystem::path& path);
  void ingest_buffer(std::span<const std::uint8_t> bytes, const std::string& name = "<memory>");

  /// Flushes shards and runs detection. The analyzer is spent afterwards.
  AnalysisResult finish();

 private:
  struct Shard;
  struct Decoded;

  void process_batch(std::vector<CapturedFrame>& batch, const PcapFileHeader& header);
  void decode_one(const CapturedFrame& frame, const PcapFileHeader& header, IngestStats& stats,
                  std::optional<Decoded>& out) const;
  void account(Shard& shard, const Decoded& item);

  const DarknetScope& scope_;
  const TldDatabase& db_;
  AnalysisConfig config_;
  IngestStats decode_stats_;
  std::vector<Shard> shards_;
  std::vector<InputSummary> inputs_;
};

struct ReportFiles {
  std::filesystem::path attacks_csv, attacks_json, qtype_csv, timeseries_csv, domains_csv, summary_json;
};

/// Writes attacks.csv, attacks.json, qtype_dist.csv, timeseries.csv,
/// domains.csv and summary.json into `dir` (created if missing).
ReportFiles write_reports(const AnalysisResult& result, const std::filesystem::path& dir,
                          const AnalysisConfig& config, std::size_t top_domain_rows = 100);

std::string run_summary_json(const AnalysisResult& result);

}  // namespace darkamp
