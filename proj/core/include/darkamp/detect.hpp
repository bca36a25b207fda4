#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darkamp/flow.hpp"

namespace darkamp {

struct DetectionConfig {
  std::uint64_t min_any_queries = 25;
  std::uint64_t min_distinct_hosts = 25;
  bool require_domain_db_hit = true;
  double low_rate_max_pps = 0.5;
  double high_rate_min_pps = 4700.0;

  /// Throws Error(InvalidConfig) unless both minimums are >= 1 and
  /// 0 < low_rate_max_pps < high_rate_min_pps.
  void validate() const;
};

enum class RateCategory { Low, Medium, High };

std::string_view to_string(RateCategory category) noexcept;

struct DomainCount {
  std::string name;
  std::uint64_t count = 0;
  friend bool operator==(const DomainCount&, const DomainCount&) = default;
};

struct AttackRecord {
  FlowKey key;
  std::vector<DomainCount> requested_domains;
  Timestamp first_ts;
  Timestamp last_ts;
  double duration_s = 0;
  std::uint64_t intensity = 0;
  std::uint64_t any_queries = 0;
  std::uint64_t unique_dark_ips = 0;
  double avg_packet_size_bytes = 0;
  double avg_rate_pps = 0;
  RateCategory category = RateCategory::Low;
  std::string location;  // empty until geo enrichment runs

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

/// Packets per second; +infinity for a non-empty flow with zero duration.
double compute_rate(std::uint64_t intensity, double duration_s);

RateCategory classify_rate(double rate_pps, const DetectionConfig& cfg = {});

/// Applies the ANY-count, distinct-ANY-destination and domain-DB criteria.
std::optional<AttackRecord> detect(const FlowSummary& flow, const DetectionConfig& cfg = {},
                                   std::size_t top_domains = 5);

/// detect() over every flow, preserving input order.
std::vector<AttackRecord> detect_all(std::span<const FlowSummary> flows, const DetectionConfig& cfg = {},
                                     std::size_t top_domains = 5);

}  // namespace darkamp
