#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "darkamp/dns.hpp"
#include "darkamp/ipv4.hpp"
#include "darkamp/packet.hpp"
#include "darkamp/scope.hpp"
#include "darkamp/timestamp.hpp"

namespace darkamp {

/// A flow is every DNS query from one source in the analysis window. With an
/// idle timeout configured a source may own several flows, numbered by segment.
struct FlowKey {
  Ipv4Address src_ip;
  std::uint32_t segment = 0;

  friend constexpr auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct FlowSummary {
  FlowKey key;
  Timestamp first_ts;
  Timestamp last_ts;
  std::uint64_t total_queries = 0;
  std::uint64_t any_queries = 0;
  std::uint64_t distinct_dark_dsts = 0;
  std::uint64_t distinct_any_dark_dsts = 0;
  std::uint64_t total_frame_bytes = 0;
  std::map<std::uint16_t, std::uint64_t> qtype_counts;
  std::map<std::string, std::uint64_t> domain_counts;
  std::uint64_t other_domain_count = 0;  // queries whose name fell outside the tracked set
  bool domain_db_hit = false;

  friend bool operator==(const FlowSummary&, const FlowSummary&) = default;
};

struct FlowLimits {
  std::size_t max_distinct_dsts = std::size_t{1} << 20;
  std::size_t max_domains = 10'000;
  std::optional<std::int64_t> idle_timeout_ns;
};

/// Per-source aggregation with an exact, order-independent merge.
///
/// Tables built from any partition of a packet stream merge into the table
/// built from the whole stream: counters add, destination sets union, time
/// bounds take min/max and the domain-DB flag ORs. Each flow tracks at most
/// `max_domains` names, keeping the earliest-seen ones (ties by name); the
/// remainder is counted in `other_domain_count`. Merge stays exact while no
/// shard overflows that cap for a given flow, and always when shards are
/// split by source address.
class FlowTable {
 public:
  explicit FlowTable(FlowLimits limits = {});

  /// Caller guarantees dst_port 53 and an in-scope destination. Throws
  /// Error(ResourceLimit) when a flow's destination set exceeds the limit.
  void update(const PacketRecord& pkt, const DnsQuerySummary& query, const TldDatabase& db);

  void merge(FlowTable&& other);

  std::size_t flow_count() const { return active_.size() + closed_.size(); }
  bool empty() const { return flow_count() == 0; }
  const FlowLimits& limits() const { return limits_; }

  /// Summaries in ascending (src_ip, segment) order.
  std::vector<FlowSummary> finalize() const;

 private:
  struct DomainTally {
    std::uint64_t count = 0;
    Timestamp first_seen;
  };

  struct FlowState {
    std::uint32_t segment = 0;
    Timestamp first_ts;
    Timestamp last_ts;
    std::uint64_t total_queries = 0;
    std::uint64_t any_queries = 0;
    std::uint64_t total_frame_bytes = 0;
    std::unordered_set<std::uint32_t> dsts;
    std::unordered_set<std::uint32_t> any_dsts;
    std::map<std::uint16_t, std::uint64_t> qtype_counts;
    std::unordered_map<std::string, DomainTally> domains;
    std::set<std::pair<Timestamp, std::string>> domain_order;  // built once the cap is reached
    std::uint64_t other_domain_count = 0;
    bool domain_db_hit = false;
  };

  void count_domain(FlowState& flow, const std::string& name, Timestamp ts, std::uint64_t count) const;
  void enforce_domain_cap(FlowState& flow) const;
  void check_dst_limit(const FlowState& flow, Ipv4Address src) const;
  void absorb(FlowState& into, FlowState&& from) const;
  FlowSummary summarize(Ipv4Address src, const FlowState& flow) const;

  FlowLimits limits_;
  std::unordered_map<std::uint32_t, FlowState> active_;
  std::vector<std::pair<std::uint32_t, FlowState>> closed_;
};

/// Folds shards into one table; equal to the single-pass table over the
/// concatenated stream.
FlowTable merge(std::vector<FlowTable> shards);

}  // namespace darkamp
