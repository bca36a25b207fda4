#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darkamp/detect.hpp"
#include "darkamp/flow.hpp"
#include "darkamp/ipv4.hpp"
#include "darkamp/scope.hpp"
#include "darkamp/timestamp.hpp"

namespace darkamp {

/// Source behaviors seen in darknet DNS traffic. The first three are the
/// attack-related sources; the last two are benign noise.
enum class BehaviorKind {
  SpoofedVictimFlood,  // high-rate ANY queries carrying a victim's address
  CompromisedHost,     // medium-rate ANY queries from an infected machine
  Scanner,             // slow resolver discovery, <= 0.5 pps
  Misconfiguration,    // many packets to a single dark address
  NonAnyNoise,         // queries of other types
};

std::string_view to_string(BehaviorKind kind) noexcept;
std::optional<BehaviorKind> behavior_from_string(std::string_view text);

struct WeightedQtype {
  std::uint16_t qtype = 0;
  double weight = 1.0;
};

struct WeightedDomain {
  std::string name;
  double weight = 1.0;
};

/// One synthetic source. Packet count comes from `packets` when set, else
/// from round(rate_pps * duration_s). A duration of exactly zero makes a
/// flash: every packet carries the start timestamp.
struct SourceBehavior {
  std::string label;
  BehaviorKind kind = BehaviorKind::CompromisedHost;
  Ipv4Address src_ip;
  std::uint64_t target_count = 1;
  double rate_pps = 1.0;
  std::vector<WeightedQtype> qtypes;    // empty = kind default
  std::vector<WeightedDomain> domains;  // empty = root only
  Timestamp start;
  std::optional<double> duration_s;
  std::optional<std::uint64_t> packets;
};

struct Scenario {
  std::vector<std::string> darknet;  // CIDR blocks; may be overridden by the caller
  std::int64_t bucket_width_s = 3600;
  std::vector<SourceBehavior> sources;
};

/// Reads the scenario JSON schema documented in docs/scenario.md.
/// Throws Error(InvalidScenario) on schema violations.
Scenario parse_scenario_json(std::string_view text);

/// One emitted frame, in file order.
struct GeneratedPacket {
  Timestamp timestamp;
  std::uint32_t source_index = 0;
  Ipv4Address src_ip;
  Ipv4Address dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t transaction_id = 0;
  std::string qname;
  std::uint16_t qtype = 0;
  std::uint32_t frame_len = 0;
};

struct ExpectedSource {
  std::string label;
  BehaviorKind kind = BehaviorKind::CompromisedHost;
  FlowSummary flow;  // aggregates the analyzer must reproduce
  double duration_s = 0;
  double rate_pps = 0;  // +inf for flashes
  RateCategory category = RateCategory::Low;
  bool detected = false;
};

/// Ground truth computed from the realized packet list before any byte is written.
struct ScenarioManifest {
  std::uint64_t seed = 0;
  std::vector<std::string> darknet;
  DetectionConfig detection;
  std::vector<ExpectedSource> sources;
  std::uint64_t total_packets = 0;
  std::map<std::uint16_t, std::uint64_t> qtype_totals;
  std::int64_t bucket_width_s = 3600;
  Timestamp origin;
  std::vector<std::uint64_t> time_series;
  std::vector<GeneratedPacket> packets;
};

struct GeneratedTrace {
  std::vector<std::uint8_t> pcap;
  ScenarioManifest manifest;
};

/// Emits a classic little-endian Ethernet pcap with µs timestamps.
///
/// Each source draws from its own mt19937_64 stream seeded with
/// splitmix64(seed + source index), so editing one source leaves the others'
/// packets unchanged. Throws Error(ScopeTooSmall) when a source wants more
/// targets than the scope holds and Error(InvalidScenario) when a behavior
/// breaks its kind's rate band or target rules.
GeneratedTrace generate(const Scenario& scenario, const DarknetScope& scope, std::uint64_t seed,
                        const TldDatabase& db = default_tld_db(), const DetectionConfig& detection = {});

/// Standard query with RD set and one question. Throws Error(InvalidName).
std::vector<std::uint8_t> encode_dns_query(std::string_view qname, std::uint16_t qtype, std::uint16_t txid);

/// Manifest JSON; packets are included only when `with_packets` is set.
std::string manifest_to_json(const ScenarioManifest& manifest, bool with_packets = false);
ScenarioManifest manifest_from_json(std::string_view text);

}  // namespace darkamp
