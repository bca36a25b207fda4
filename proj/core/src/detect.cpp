#include "darkamp/detect.hpp"

#include <limits>

#include "darkamp/error.hpp"
#include "darkamp/report.hpp"

namespace darkamp {

void DetectionConfig::validate() const {
  if (min_any_queries < 1) throw Error(ErrorCode::InvalidConfig, "min_any_queries must be >= 1");
  if (min_distinct_hosts < 1) throw Error(ErrorCode::InvalidConfig, "min_distinct_hosts must be >= 1");
  if (!(low_rate_max_pps > 0) || !(low_rate_max_pps < high_rate_min_pps)) {
    throw Error(ErrorCode::InvalidConfig, "rate bands need 0 < low_rate_max_pps < high_rate_min_pps");
  }
}

std::string_view to_string(RateCategory category) noexcept {
  switch (category) {
    case RateCategory::Low: return "Low";
    case RateCategory::Medium: return "Medium";
    case RateCategory::High: return "High";
  }
  return "Unknown";
}

double compute_rate(std::uint64_t intensity, double duration_s) {
  if (intensity == 0) return 0.0;
  if (duration_s <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(intensity) / duration_s;
}

RateCategory classify_rate(double rate_pps, const DetectionConfig& cfg) {
  if (rate_pps <= cfg.low_rate_max_pps) return RateCategory::Low;
  if (rate_pps < cfg.high_rate_min_pps) return RateCategory::Medium;
  return RateCategory::High;
}

std::optional<AttackRecord> detect(const FlowSummary& flow, const DetectionConfig& cfg, std::size_t top_n) {
  if (flow.any_queries < cfg.min_any_queries) return std::nullopt;
  if (flow.distinct_any_dark_dsts < cfg.min_distinct_hosts) return std::nullopt;
  if (cfg.require_domain_db_hit && !flow.domain_db_hit) return std::nullopt;

  AttackRecord rec;
  rec.key = flow.key;
  rec.requested_domains = top_domains(flow.domain_counts, top_n);
  rec.first_ts = flow.first_ts;
  rec.last_ts = flow.last_ts;
  rec.duration_s = seconds_between(flow.first_ts, flow.last_ts);
  rec.intensity = flow.total_queries;
  rec.any_queries = flow.any_queries;
  rec.unique_dark_ips = flow.distinct_dark_dsts;
  rec.avg_packet_size_bytes =
      flow.total_queries ? static_cast<double>(flow.total_frame_bytes) / static_cast<double>(flow.total_queries) : 0.0;
  rec.avg_rate_pps = compute_rate(rec.intensity, rec.duration_s);
  rec.category = classify_rate(rec.avg_rate_pps, cfg);
  return rec;
}

std::vector<AttackRecord> detect_all(std::span<const FlowSummary> flows, const DetectionConfig& cfg,
                                     std::size_t top_n) {
  std::vector<AttackRecord> out;
  for (const auto& flow : flows) {
    if (auto rec = detect(flow, cfg, top_n)) out.push_back(std::move(*rec));
  }
  return out;
}

}  // namespace darkamp
