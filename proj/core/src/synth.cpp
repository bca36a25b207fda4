#include "darkamp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "darkamp/dns.hpp"
#include "darkamp/error.hpp"
#include "darkamp/pcap.hpp"

namespace darkamp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::pair<BehaviorKind, std::string_view>, 5> kKindNames{{
    {BehaviorKind::SpoofedVictimFlood, "spoofed_victim_flood"},
    {BehaviorKind::CompromisedHost, "compromised_host"},
    {BehaviorKind::Scanner, "scanner"},
    {BehaviorKind::Misconfiguration, "misconfiguration"},
    {BehaviorKind::NonAnyNoise, "non_any_noise"},
}};

// Table of rate bands the behaviors must respect.
constexpr double kLowMax = 0.5;
constexpr double kHighMin = 4700.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Portable draws on top of mt19937_64 (whose output sequence is fixed by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-unit()) / rate; }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
std::size_t pick_weighted(Rng& rng, const std::vector<T>& items) {
  if (items.size() == 1) return 0;
  double total = 0;
  for (const auto& item : items) total += item.weight;
  double x = rng.unit() * total;
  for (std::size_t i = 0; i < items.size(); ++i) {
    x -= items[i].weight;
    if (x < 0) return i;
  }
  return items.size() - 1;
}

[[noreturn]] void bad_scenario(const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); }

std::uint16_t ip_checksum(const std::uint8_t* data, std::size_t len, std::uint32_t sum = 0) {
  for (std::size_t i = 0; i + 1 < len; i += 2) sum += static_cast<std::uint32_t>(data[i] << 8 | data[i + 1]);
  if (len & 1) sum += static_cast<std::uint32_t>(data[len - 1] << 8);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

void put16(std::vector<std::uint8_t>& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v >> 8);
  out[at + 1] = static_cast<std::uint8_t>(v);
}

void put32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  put16(out, at, static_cast<std::uint16_t>(v >> 16));
  put16(out, at + 2, static_cast<std::uint16_t>(v));
}

std::vector<std::uint8_t> build_frame(const GeneratedPacket& p, std::span<const std::uint8_t> dns, std::uint16_t ip_id) {
  constexpr std::size_t kEth = 14, kIp = 20, kUdp = 8;
  std::vector<std::uint8_t> f(kEth + kIp + kUdp + dns.size(), 0);
  static constexpr std::uint8_t kDstMac[6] = {0x00, 0x00, 0x5e, 0x00, 0x53, 0x01};
  static constexpr std::uint8_t kSrcMac[6] = {0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  std::copy(std::begin(kDstMac), std::end(kDstMac), f.begin());
  std::copy(std::begin(kSrcMac), std::end(kSrcMac), f.begin() + 6);
  put16(f, 12, 0x0800);

  std::size_t ip = kEth;
  f[ip] = 0x45;
  put16(f, ip + 2, static_cast<std::uint16_t>(kIp + kUdp + dns.size()));
  put16(f, ip + 4, ip_id);
  f[ip + 8] = 64;
  f[ip + 9] = 17;
  put32(f, ip + 12, p.src_ip.value());
  put32(f, ip + 16, p.dst_ip.value());
  put16(f, ip + 10, ip_checksum(f.data() + ip, kIp));

  std::size_t udp = ip + kIp;
  auto udp_len = static_cast<std::uint16_t>(kUdp + dns.size());
  put16(f, udp, p.src_port);
  put16(f, udp + 2, 53);
  put16(f, udp + 4, udp_len);
  std::copy(dns.begin(), dns.end(), f.begin() + static_cast<std::ptrdiff_t>(udp + kUdp));
  // Pseudo-header: src, dst, zero+proto, udp length.
  std::uint32_t pseudo = (p.src_ip.value() >> 16) + (p.src_ip.value() & 0xffff) + (p.dst_ip.value() >> 16) +
                         (p.dst_ip.value() & 0xffff) + 17 + udp_len;
  std::uint16_t csum = ip_checksum(f.data() + udp, udp_len, pseudo);
  put16(f, udp + 6, csum == 0 ? 0xffff : csum);
  return f;
}

void validate_source(const SourceBehavior& s, std::size_t index) {
  std::string who = "source " + std::to_string(index) + (s.label.empty() ? "" : " (" + s.label + ")");
  bool flash = s.duration_s && *s.duration_s == 0.0;
  if (s.target_count == 0) bad_scenario(who + ": targets must be >= 1");
  if (s.duration_s && *s.duration_s < 0) bad_scenario(who + ": negative duration");
  if (!flash && !(s.rate_pps > 0)) bad_scenario(who + ": rate_pps must be positive");
  if (!s.packets && !(s.duration_s && !flash)) bad_scenario(who + ": needs packets or a positive duration_s");
  if (s.packets && *s.packets == 0) bad_scenario(who + ": packets must be >= 1");
  for (const auto& q : s.qtypes) {
    if (!(q.weight > 0)) bad_scenario(who + ": qtype weights must be positive");
  }
  for (const auto& d : s.domains) {
    if (!(d.weight > 0)) bad_scenario(who + ": domain weights must be positive");
  }
  if (s.domains.size() > 10'000) bad_scenario(who + ": at most 10000 domains per source");

  switch (s.kind) {
    case BehaviorKind::SpoofedVictimFlood:
      if (!flash && s.rate_pps < kHighMin) bad_scenario(who + ": spoofed floods run at >= 4700 pps");
      break;
    case BehaviorKind::CompromisedHost:
      if (flash || !(s.rate_pps > kLowMax && s.rate_pps < kHighMin)) {
        bad_scenario(who + ": compromised hosts run between 0.5 and 4700 pps");
      }
      break;
    case BehaviorKind::Scanner:
      if (flash || s.rate_pps > kLowMax) bad_scenario(who + ": scanners run at <= 0.5 pps");
      break;
    case BehaviorKind::Misconfiguration:
      if (s.target_count != 1) bad_scenario(who + ": misconfiguration targets exactly one address");
      break;
    case BehaviorKind::NonAnyNoise:
      for (const auto& q : s.qtypes) {
        if (q.qtype == qtype::ANY) bad_scenario(who + ": non-ANY noise cannot query ANY");
      }
      break;
  }
}

std::vector<WeightedQtype> effective_qtypes(const SourceBehavior& s) {
  if (!s.qtypes.empty()) return s.qtypes;
  return {{s.kind == BehaviorKind::NonAnyNoise ? qtype::A : qtype::ANY, 1.0}};
}

std::vector<WeightedDomain> effective_domains(const SourceBehavior& s) {
  std::vector<WeightedDomain> out = s.domains.empty() ? std::vector<WeightedDomain>{{".", 1.0}} : s.domains;
  for (auto& d : out) d.name = normalize_qname(d.name);
  return out;
}

std::uint64_t packet_count(const SourceBehavior& s) {
  if (s.packets) return *s.packets;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(s.rate_pps * *s.duration_s)));
}

/// Distinct target indices in draw order (Floyd's sampling, then a shuffle).
std::vector<std::uint64_t> draw_targets(Rng& rng, std::uint64_t count, std::uint64_t population) {
  std::vector<std::uint64_t> chosen;
  chosen.reserve(count);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  for (std::uint64_t j = population - count; j < population; ++j) {
    std::uint64_t t = rng.below(j + 1);
    if (!seen.insert(t).second) {
      seen.insert(j);
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i = chosen.size(); i > 1; --i) std::swap(chosen[i - 1], chosen[rng.below(i)]);
  return chosen;
}

/// Aggregates recomputed directly from the packet list.
ExpectedSource expected_for(const SourceBehavior& s, const std::vector<const GeneratedPacket*>& pkts,
                            const TldDatabase& db, const DetectionConfig& cfg) {
  ExpectedSource e;
  e.label = s.label;
  e.kind = s.kind;
  FlowSummary& f = e.flow;
  f.key = {s.src_ip, 0};
  f.first_ts = Timestamp{std::numeric_limits<std::int64_t>::max()};
  f.last_ts = Timestamp{std::numeric_limits<std::int64_t>::min()};
  std::set<std::uint32_t> dsts, any_dsts;
  for (const GeneratedPacket* p : pkts) {
    f.first_ts = std::min(f.first_ts, p->timestamp);
    f.last_ts = std::max(f.last_ts, p->timestamp);
    ++f.total_queries;
    f.total_frame_bytes += p->frame_len;
    dsts.insert(p->dst_ip.value());
    ++f.qtype_counts[p->qtype];
    ++f.domain_counts[p->qname];
    if (p->qtype == qtype::ANY) {
      ++f.any_queries;
      any_dsts.insert(p->dst_ip.value());
      if (domain_in_db(db, p->qname)) f.domain_db_hit = true;
    }
  }
  f.distinct_dark_dsts = dsts.size();
  f.distinct_any_dark_dsts = any_dsts.size();

  e.duration_s = static_cast<double>(f.last_ts.ns - f.first_ts.ns) / 1e9;
  e.rate_pps = e.duration_s > 0 ? static_cast<double>(f.total_queries) / e.duration_s
                                : std::numeric_limits<double>::infinity();
  e.category = e.rate_pps <= cfg.low_rate_max_pps   ? RateCategory::Low
               : e.rate_pps < cfg.high_rate_min_pps ? RateCategory::Medium
                                                    : RateCategory::High;
  e.detected = f.any_queries >= cfg.min_any_queries && f.distinct_any_dark_dsts >= cfg.min_distinct_hosts &&
               (!cfg.require_domain_db_hit || f.domain_db_hit);
  return e;
}

}  // namespace

std::string_view to_string(BehaviorKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<BehaviorKind> behavior_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::vector<std::uint8_t> encode_dns_query(std::string_view qname, std::uint16_t type, std::uint16_t txid) {
  std::vector<std::string> labels = name_to_labels(qname);
  std::vector<std::uint8_t> out(kDnsHeaderLen, 0);
  put16(out, 0, txid);
  put16(out, 2, 0x0100);  // RD
  put16(out, 4, 1);
  for (const auto& label : labels) {
    out.push_back(static_cast<std::uint8_t>(label.size()));
    out.insert(out.end(), label.begin(), label.end());
  }
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(type >> 8));
  out.push_back(static_cast<std::uint8_t>(type));
  out.push_back(0);
  out.push_back(1);
  return out;
}

GeneratedTrace generate(const Scenario& scenario, const DarknetScope& scope, std::uint64_t seed,
                        const TldDatabase& db, const DetectionConfig& detection) {
  detection.validate();
  if (scenario.bucket_width_s <= 0) bad_scenario("bucket_width_s must be positive");
  std::set<std::uint32_t> seen_sources;
  for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
    const auto& s = scenario.sources[i];
    validate_source(s, i);
    if (s.target_count > scope.address_count()) {
      throw Error(ErrorCode::ScopeTooSmall, "source " + std::to_string(i) + " wants " +
                                                std::to_string(s.target_count) + " targets but the scope holds " +
                                                std::to_string(scope.address_count()));
    }
    if (!seen_sources.insert(s.src_ip.value()).second) {
      bad_scenario("duplicate src_ip " + s.src_ip.to_string());
    }
  }

  GeneratedTrace trace;
  ScenarioManifest& m = trace.manifest;
  m.seed = seed;
  for (const auto& p : scope.prefixes()) m.darknet.push_back(p.to_string());
  m.detection = detection;
  m.bucket_width_s = scenario.bucket_width_s;

  std::vector<std::uint16_t> ip_ids;
  for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
    const SourceBehavior& s = scenario.sources[i];
    Rng rng(splitmix64(seed + i));
    auto qtypes = effective_qtypes(s);
    auto domains = effective_domains(s);
    std::uint64_t n = packet_count(s);
    auto targets = draw_targets(rng, s.target_count, scope.address_count());
    bool flash = s.duration_s && *s.duration_s == 0.0;

    double offset_s = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      if (k > 0 && !flash) offset_s += rng.exponential(s.rate_pps);
      GeneratedPacket p;
      p.timestamp = Timestamp::from_micros(s.start.micros() + std::llround(offset_s * 1e6));
      p.source_index = static_cast<std::uint32_t>(i);
      p.src_ip = s.src_ip;
      p.dst_ip = scope.address_at(targets[k % targets.size()]);
      p.src_port = static_cast<std::uint16_t>(1024 + rng.below(65536 - 1024));
      p.transaction_id = static_cast<std::uint16_t>(rng.below(65536));
      p.qtype = qtypes[pick_weighted(rng, qtypes)].qtype;
      p.qname = domains[pick_weighted(rng, domains)].name;
      ip_ids.push_back(static_cast<std::uint16_t>(rng.below(65536)));
      m.packets.push_back(std::move(p));
    }
  }

  std::vector<std::size_t> order(m.packets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.packets[a].timestamp < m.packets[b].timestamp;
  });

  std::ostringstream out;
  PcapWriter writer(out, LinkType::Ethernet, TimePrecision::Micro);
  std::vector<GeneratedPacket> ordered;
  ordered.reserve(order.size());
  for (std::size_t idx : order) {
    GeneratedPacket p = std::move(m.packets[idx]);
    auto dns = encode_dns_query(p.qname, p.qtype, p.transaction_id);
    auto frame = build_frame(p, dns, ip_ids[idx]);
    p.frame_len = static_cast<std::uint32_t>(frame.size());
    std::int64_t us = p.timestamp.micros();
    writer.write(static_cast<std::uint32_t>(us / 1'000'000), static_cast<std::uint32_t>(us % 1'000'000), frame);
    ordered.push_back(std::move(p));
  }
  m.packets = std::move(ordered);

  std::vector<std::vector<const GeneratedPacket*>> per_source(scenario.sources.size());
  for (const auto& p : m.packets) {
    per_source[p.source_index].push_back(&p);
    ++m.qtype_totals[p.qtype];
  }
  for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
    m.sources.push_back(expected_for(scenario.sources[i], per_source[i], db, detection));
  }
  m.total_packets = m.packets.size();
  if (!m.packets.empty()) {
    m.origin = m.packets.front().timestamp;
    std::int64_t width_ns = m.bucket_width_s * 1'000'000'000;
    for (const auto& p : m.packets) {
      auto bucket = static_cast<std::size_t>((p.timestamp.ns - m.origin.ns) / width_ns);
      if (bucket >= m.time_series.size()) m.time_series.resize(bucket + 1, 0);
      ++m.time_series[bucket];
    }
  }

  std::string bytes = std::move(out).str();
  trace.pcap.assign(bytes.begin(), bytes.end());
  return trace;
}

Scenario parse_scenario_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad_scenario(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_scenario("scenario must be a JSON object");

  Scenario sc;
  try {
    if (doc.contains("darknet")) sc.darknet = doc.at("darknet").get<std::vector<std::string>>();
    sc.bucket_width_s = doc.value("bucket_width_s", std::int64_t{3600});
    if (!doc.contains("sources") || !doc.at("sources").is_array()) bad_scenario("'sources' must be an array");

    for (const auto& js : doc.at("sources")) {
      SourceBehavior s;
      s.label = js.value("label", std::string{});
      auto kind = behavior_from_string(js.at("kind").get<std::string>());
      if (!kind) bad_scenario("unknown kind '" + js.at("kind").get<std::string>() + "'");
      s.kind = *kind;
      auto ip = Ipv4Address::parse(js.at("src_ip").get<std::string>());
      if (!ip) bad_scenario("bad src_ip '" + js.at("src_ip").get<std::string>() + "'");
      s.src_ip = *ip;
      s.target_count = js.value("targets", std::uint64_t{1});
      s.rate_pps = js.value("rate_pps", 1.0);
      if (js.contains("packets")) s.packets = js.at("packets").get<std::uint64_t>();
      if (js.contains("duration_s")) s.duration_s = js.at("duration_s").get<double>();
      s.start = Timestamp::from_micros(std::llround(js.value("start_ts", 0.0) * 1e6));
      if (js.contains("qtypes")) {
        for (const auto& [name, weight] : js.at("qtypes").items()) {
          auto code = qtype_from_name(name);
          if (!code) bad_scenario("unknown qtype '" + name + "'");
          s.qtypes.push_back({*code, weight.get<double>()});
        }
      }
      if (js.contains("domains")) {
        for (const auto& [name, weight] : js.at("domains").items()) s.domains.push_back({name, weight.get<double>()});
      }
      sc.sources.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    bad_scenario(std::string("scenario schema: ") + e.what());
  }
  return sc;
}

namespace {

ordered_json flow_to_json(const FlowSummary& f) {
  ordered_json qt = ordered_json::object();
  for (const auto& [type, n] : f.qtype_counts) qt[qtype_name(type)] = n;
  ordered_json dom = ordered_json::object();
  for (const auto& [name, n] : f.domain_counts) dom[name] = n;
  return {
      {"first_ts_us", f.first_ts.micros()},
      {"last_ts_us", f.last_ts.micros()},
      {"first_seen", to_iso8601(f.first_ts)},
      {"last_seen", to_iso8601(f.last_ts)},
      {"total_queries", f.total_queries},
      {"any_queries", f.any_queries},
      {"distinct_dark_dsts", f.distinct_dark_dsts},
      {"distinct_any_dark_dsts", f.distinct_any_dark_dsts},
      {"total_frame_bytes", f.total_frame_bytes},
      {"qtype_counts", qt},
      {"domain_counts", dom},
      {"domain_db_hit", f.domain_db_hit},
  };
}

std::uint16_t qtype_or_throw(const std::string& name) {
  auto code = qtype_from_name(name);
  if (!code) bad_scenario("unknown qtype '" + name + "' in manifest");
  return *code;
}

}  // namespace

std::string manifest_to_json(const ScenarioManifest& m, bool with_packets) {
  ordered_json sources = ordered_json::array();
  for (const auto& s : m.sources) {
    sources.push_back({
        {"label", s.label},
        {"kind", std::string(to_string(s.kind))},
        {"src_ip", s.flow.key.src_ip.to_string()},
        {"expected", flow_to_json(s.flow)},
        {"duration_s", s.duration_s},
        {"rate_pps", std::isinf(s.rate_pps) ? ordered_json(nullptr) : ordered_json(s.rate_pps)},
        {"rate_category", std::string(to_string(s.category))},
        {"detected", s.detected},
    });
  }
  ordered_json totals = ordered_json::object();
  for (const auto& [type, n] : m.qtype_totals) totals[qtype_name(type)] = n;

  ordered_json doc = {
      {"generator", {{"rng", "mt19937_64 per source, seeded splitmix64(seed + index)"}, {"seed", m.seed}}},
      {"darknet", m.darknet},
      {"detection",
       {{"min_any_queries", m.detection.min_any_queries},
        {"min_distinct_hosts", m.detection.min_distinct_hosts},
        {"require_domain_db_hit", m.detection.require_domain_db_hit},
        {"low_rate_max_pps", m.detection.low_rate_max_pps},
        {"high_rate_min_pps", m.detection.high_rate_min_pps}}},
      {"total_packets", m.total_packets},
      {"qtype_totals", totals},
      {"bucket_width_s", m.bucket_width_s},
      {"origin_us", m.origin.micros()},
      {"origin", to_iso8601(m.origin)},
      {"time_series", m.time_series},
      {"sources", sources},
  };
  if (with_packets) {
    ordered_json pkts = ordered_json::array();
    for (const auto& p : m.packets) {
      pkts.push_back({{"ts_us", p.timestamp.micros()},
                      {"source", p.source_index},
                      {"src_ip", p.src_ip.to_string()},
                      {"dst_ip", p.dst_ip.to_string()},
                      {"src_port", p.src_port},
                      {"txid", p.transaction_id},
                      {"qname", p.qname},
                      {"qtype", qtype_name(p.qtype)},
                      {"frame_len", p.frame_len}});
    }
    doc["packets"] = std::move(pkts);
  }
  return doc.dump(2) + "\n";
}

ScenarioManifest manifest_from_json(std::string_view text) {
  ScenarioManifest m;
  try {
    json doc = json::parse(text);
    m.seed = doc.at("generator").at("seed").get<std::uint64_t>();
    m.darknet = doc.at("darknet").get<std::vector<std::string>>();
    const auto& d = doc.at("detection");
    m.detection.min_any_queries = d.at("min_any_queries").get<std::uint64_t>();
    m.detection.min_distinct_hosts = d.at("min_distinct_hosts").get<std::uint64_t>();
    m.detection.require_domain_db_hit = d.at("require_domain_db_hit").get<bool>();
    m.detection.low_rate_max_pps = d.at("low_rate_max_pps").get<double>();
    m.detection.high_rate_min_pps = d.at("high_rate_min_pps").get<double>();
    m.total_packets = doc.at("total_packets").get<std::uint64_t>();
    for (const auto& [name, n] : doc.at("qtype_totals").items()) m.qtype_totals[qtype_or_throw(name)] = n.get<std::uint64_t>();
    m.bucket_width_s = doc.at("bucket_width_s").get<std::int64_t>();
    m.origin = Timestamp::from_micros(doc.at("origin_us").get<std::int64_t>());
    m.time_series = doc.at("time_series").get<std::vector<std::uint64_t>>();

    for (const auto& js : doc.at("sources")) {
      ExpectedSource s;
      s.label = js.at("label").get<std::string>();
      auto kind = behavior_from_string(js.at("kind").get<std::string>());
      if (!kind) bad_scenario("unknown kind in manifest");
      s.kind = *kind;
      auto ip = Ipv4Address::parse(js.at("src_ip").get<std::string>());
      if (!ip) bad_scenario("bad src_ip in manifest");
      const auto& e = js.at("expected");
      FlowSummary& f = s.flow;
      f.key = {*ip, 0};
      f.first_ts = Timestamp::from_micros(e.at("first_ts_us").get<std::int64_t>());
      f.last_ts = Timestamp::from_micros(e.at("last_ts_us").get<std::int64_t>());
      f.total_queries = e.at("total_queries").get<std::uint64_t>();
      f.any_queries = e.at("any_queries").get<std::uint64_t>();
      f.distinct_dark_dsts = e.at("distinct_dark_dsts").get<std::uint64_t>();
      f.distinct_any_dark_dsts = e.at("distinct_any_dark_dsts").get<std::uint64_t>();
      f.total_frame_bytes = e.at("total_frame_bytes").get<std::uint64_t>();
      for (const auto& [name, n] : e.at("qtype_counts").items()) f.qtype_counts[qtype_or_throw(name)] = n.get<std::uint64_t>();
      for (const auto& [name, n] : e.at("domain_counts").items()) f.domain_counts[name] = n.get<std::uint64_t>();
      f.domain_db_hit = e.at("domain_db_hit").get<bool>();
      s.duration_s = js.at("duration_s").get<double>();
      s.rate_pps = js.at("rate_pps").is_null() ? std::numeric_limits<double>::infinity()
                                               : js.at("rate_pps").get<double>();
      std::string cat = js.at("rate_category").get<std::string>();
      s.category = cat == "High" ? RateCategory::High : cat == "Medium" ? RateCategory::Medium : RateCategory::Low;
      s.detected = js.at("detected").get<bool>();
      m.sources.push_back(std::move(s));
    }
    if (doc.contains("packets")) {
      for (const auto& jp : doc.at("packets")) {
        GeneratedPacket p;
        p.timestamp = Timestamp::from_micros(jp.at("ts_us").get<std::int64_t>());
        p.source_index = jp.at("source").get<std::uint32_t>();
        p.src_ip = Ipv4Address::parse(jp.at("src_ip").get<std::string>()).value_or(Ipv4Address{});
        p.dst_ip = Ipv4Address::parse(jp.at("dst_ip").get<std::string>()).value_or(Ipv4Address{});
        p.src_port = jp.at("src_port").get<std::uint16_t>();
        p.transaction_id = jp.at("txid").get<std::uint16_t>();
        p.qname = jp.at("qname").get<std::string>();
        p.qtype = qtype_or_throw(jp.at("qtype").get<std::string>());
        p.frame_len = jp.at("frame_len").get<std::uint32_t>();
        m.packets.push_back(std::move(p));
      }
    }
  } catch (const json::exception& e) {
    bad_scenario(std::string("manifest schema: ") + e.what());
  }
  return m;
}

}  // namespace darkamp
