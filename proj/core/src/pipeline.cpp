#include "darkamp/pipeline.hpp"

#include <exception>
#include <fstream>
#include <istream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

constexpr std::size_t kBatchFrames = 1 << 15;

std::size_t shard_of(Ipv4Address src, std::size_t shards) {
  std::uint64_t x = src.value() * 0x9e3779b97f4a7c15ULL;
  return static_cast<std::size_t>((x >> 32) % shards);
}

template <typename Fn>
void run_parallel(std::size_t workers, Fn&& fn) {
  if (workers == 1) {
    fn(std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

IngestStats& IngestStats::operator+=(const IngestStats& o) {
  frames += o.frames;
  truncated_records += o.truncated_records;
  skipped += o.skipped;
  malformed_ip += o.malformed_ip;
  not_dns_port += o.not_dns_port;
  outside_scope += o.outside_scope;
  dns_responses += o.dns_responses;
  dns_no_question += o.dns_no_question;
  malformed_dns += o.malformed_dns;
  compression_loops += o.compression_loops;
  dns_queries += o.dns_queries;
  return *this;
}

struct Analyzer::Decoded {
  Timestamp timestamp;
  Ipv4Address src_ip;
  Ipv4Address dst_ip;
  std::uint32_t frame_bytes = 0;
  DnsQuerySummary query;
};

struct Analyzer::Shard {
  explicit Shard(const FlowLimits& limits) : flows(limits) {}
  FlowTable flows;
  std::map<std::uint16_t, std::uint64_t> qtype_counts;
  std::map<std::string, std::uint64_t> domain_counts;
  std::vector<Timestamp> timestamps;
};

Analyzer::Analyzer(const DarknetScope& scope, const TldDatabase& db, AnalysisConfig config)
    : scope_(scope), db_(db), config_(std::move(config)) {
  config_.detection.validate();
  if (config_.bucket_width_s <= 0) throw Error(ErrorCode::InvalidConfig, "bucket width must be positive");
  if (config_.threads == 0) config_.threads = 1;
  for (unsigned i = 0; i < config_.threads; ++i) shards_.emplace_back(config_.limits);
}

Analyzer::~Analyzer() = default;

void Analyzer::decode_one(const CapturedFrame& frame, const PcapFileHeader& header, IngestStats& stats,
                          std::optional<Decoded>& out) const {
  out.reset();
  ++stats.frames;
  std::optional<PacketRecord> pkt;
  try {
    pkt = decode_frame(frame, header, &stats.skipped);
  } catch (const Error&) {
    ++stats.malformed_ip;
    return;
  }
  if (!pkt) return;
  if (pkt->dst_port != kDnsPort) {
    ++stats.not_dns_port;
    return;
  }
  if (!scope_.contains(pkt->dst_ip)) {
    ++stats.outside_scope;
    return;
  }
  DnsSkip why = DnsSkip::None;
  std::optional<DnsQuerySummary> query;
  try {
    query = parse_dns_query(pkt->udp_payload, &why);
  } catch (const Error& e) {
    ++(e.code() == ErrorCode::CompressionLoop ? stats.compression_loops : stats.malformed_dns);
    return;
  }
  if (!query) {
    ++(why == DnsSkip::Response ? stats.dns_responses : stats.dns_no_question);
    return;
  }
  ++stats.dns_queries;
  out.emplace(Decoded{pkt->timestamp, pkt->src_ip, pkt->dst_ip, pkt->frame_bytes, std::move(*query)});
}

void Analyzer::account(Shard& shard, const Decoded& item) {
  PacketRecord pkt;
  pkt.timestamp = item.timestamp;
  pkt.src_ip = item.src_ip;
  pkt.dst_ip = item.dst_ip;
  pkt.dst_port = kDnsPort;
  pkt.frame_bytes = item.frame_bytes;
  shard.flows.update(pkt, item.query, db_);
  ++shard.qtype_counts[item.query.qtype];
  ++shard.domain_counts[item.query.qname];
  shard.timestamps.push_back(item.timestamp);
}

void Analyzer::process_batch(std::vector<CapturedFrame>& batch, const PcapFileHeader& header) {
  std::size_t workers = shards_.size();
  std::vector<std::optional<Decoded>> decoded(batch.size());
  std::vector<IngestStats> stats(workers);

  run_parallel(workers, [&](std::size_t w) {
    std::size_t begin = batch.size() * w / workers;
    std::size_t end = batch.size() * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) decode_one(batch[i], header, stats[w], decoded[i]);
  });
  for (const auto& s : stats) decode_stats_ += s;

  run_parallel(workers, [&](std::size_t w) {
    for (const auto& item : decoded) {
      if (item && shard_of(item->src_ip, workers) == w) account(shards_[w], *item);
    }
  });
}

void Analyzer::ingest(std::istream& in, const std::string& name) {
  std::optional<PcapReader> reader;
  try {
    reader.emplace(in);
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.what());
  }
  const PcapFileHeader header = reader->header();

  if (shards_.size() == 1) {
    CapturedFrame frame;
    std::optional<Decoded> item;
    while (reader->next(frame)) {
      decode_one(frame, header, decode_stats_, item);
      if (item) account(shards_.front(), *item);
    }
  } else {
    std::vector<CapturedFrame> batch;
    batch.reserve(kBatchFrames);
    CapturedFrame frame;
    while (reader->next(frame)) {
      batch.push_back(std::move(frame));
      if (batch.size() == kBatchFrames) {
        process_batch(batch, header);
        batch.clear();
      }
    }
    if (!batch.empty()) process_batch(batch, header);
  }

  decode_stats_.truncated_records += reader->truncated_records();
  inputs_.push_back({name, reader->frames_read(), reader->truncated_records(), reader->truncation_offset()});
}

void Analyzer::ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path.string() + ": cannot open input");
  ingest(in, path.string());
}

void Analyzer::ingest_buffer(std::span<const std::uint8_t> bytes, const std::string& name) {
  std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  ingest(in, name);
}

AnalysisResult Analyzer::finish() {
  AnalysisResult result;
  result.inputs = std::move(inputs_);
  result.stats = decode_stats_;

  std::vector<FlowTable> tables;
  std::vector<Timestamp> timestamps;
  for (auto& shard : shards_) {
    tables.push_back(std::move(shard.flows));
    for (const auto& [type, n] : shard.qtype_counts) result.qtype_counts[type] += n;
    for (const auto& [name, n] : shard.domain_counts) result.domain_counts[name] += n;
    timestamps.insert(timestamps.end(), shard.timestamps.begin(), shard.timestamps.end());
  }
  shards_.clear();
  result.flows = merge(std::move(tables)).finalize();
  result.attacks = detect_all(result.flows, config_.detection, config_.domains_per_attack);
  result.series = time_series(timestamps, config_.bucket_width_s);
  return result;
}

std::string run_summary_json(const AnalysisResult& r) {
  using nlohmann::ordered_json;
  ordered_json inputs = ordered_json::array();
  for (const auto& in : r.inputs) {
    inputs.push_back({{"name", in.name},
                      {"frames", in.frames},
                      {"truncated_records", in.truncated_records},
                      {"truncation_offset", in.truncation_offset ? ordered_json(*in.truncation_offset) : nullptr}});
  }
  const IngestStats& s = r.stats;
  std::uint64_t by_category[3] = {0, 0, 0};
  for (const auto& a : r.attacks) ++by_category[static_cast<int>(a.category)];
  ordered_json doc = {
      {"inputs", inputs},
      {"packets",
       {{"frames", s.frames},
        {"dns_queries", s.dns_queries},
        {"truncated_records", s.truncated_records},
        {"not_dns_port", s.not_dns_port},
        {"outside_scope", s.outside_scope},
        {"dns_responses", s.dns_responses},
        {"dns_no_question", s.dns_no_question},
        {"malformed_dns", s.malformed_dns},
        {"compression_loops", s.compression_loops},
        {"malformed_ip", s.malformed_ip}}},
      {"skipped",
       {{"arp", s.skipped.arp},
        {"ipv6", s.skipped.ipv6},
        {"other_link", s.skipped.other_link},
        {"non_udp", s.skipped.non_udp},
        {"fragments", s.skipped.fragments},
        {"truncated_transport", s.skipped.truncated_transport},
        {"unsupported_link", s.skipped.unsupported_link},
        {"total", s.skipped.total()}}},
      {"flows", r.flows.size()},
      {"attacks", r.attacks.size()},
      {"attacks_by_category", {{"Low", by_category[0]}, {"Medium", by_category[1]}, {"High", by_category[2]}}},
  };
  return doc.dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

ReportFiles write_reports(const AnalysisResult& result, const std::filesystem::path& dir,
                          const AnalysisConfig& config, std::size_t top_domain_rows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());

  ReportFiles files{dir / "attacks.csv",    dir / "attacks.json", dir / "qtype_dist.csv",
                    dir / "timeseries.csv", dir / "domains.csv",  dir / "summary.json"};
  write_text(files.attacks_csv, attack_table_csv(result.attacks));
  write_text(files.attacks_json, attack_table_json(result.attacks));
  if (result.qtype_counts.empty()) {
    write_text(files.qtype_csv, type_distribution_csv(TypeDistribution{}));
  } else {
    write_text(files.qtype_csv, type_distribution_csv(type_distribution(result.qtype_counts, config.top_qtypes)));
  }
  write_text(files.timeseries_csv, time_series_csv(result.series));
  write_text(files.domains_csv, domains_csv(top_domains(result.domain_counts, top_domain_rows)));
  write_text(files.summary_json, run_summary_json(result));
  return files;
}

}  // namespace darkamp
