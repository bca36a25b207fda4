// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "darkamp/detect.hpp"
#include "darkamp/dns.hpp"
#include "darkamp/error.hpp"
#include "darkamp/packet.hpp"
#include "darkamp/pipeline.hpp"
#include "darkamp/report.hpp"
#include "darkamp/synth.hpp"
#include "events.hpp"
#include "oracle.hpp"
#include "scenarios.hpp"

using namespace darkamp;
using namespace darkamp::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const DarknetScope& slash13() {
  static const DarknetScope s = load_scope(std::vector<std::string>{"10.0.0.0/13"});
  return s;
}

AnalysisResult analyze(const std::vector<std::uint8_t>& pcap, unsigned threads) {
  AnalysisConfig cfg;
  cfg.threads = threads;
  Analyzer a(slash13(), default_tld_db(), cfg);
  a.ingest_buffer(pcap, "trace");
  return a.finish();
}

// Decodes a capture frame by frame into query events, skipping anything that is not an in-scope query.
std::vector<QueryEvent> events_from_pcap(const std::vector<std::uint8_t>& pcap) {
  auto cap = parse_pcap_stream(pcap);
  std::vector<QueryEvent> out;
  for (const auto& frame : cap.frames) {
    auto rec = decode_frame(frame, cap.header);
    if (!rec || rec->dst_port != 53 || !slash13().contains(rec->dst_ip)) continue;
    auto q = parse_dns_query(rec->udp_payload);
    if (!q) continue;
    out.push_back({rec->timestamp, rec->src_ip, rec->dst_ip, rec->frame_bytes, q->qtype, q->qname});
  }
  return out;
}

Outcome rate_bands() {
  Outcome o;
  o.require(classify_rate(0.5) == RateCategory::Low, "0.5 pps is not Low");
  o.require(classify_rate(std::nextafter(0.5, 1.0)) == RateCategory::Medium, "0.5+eps is not Medium");
  o.require(classify_rate(4699.99) == RateCategory::Medium, "4699.99 is not Medium");
  o.require(classify_rate(4700.0) == RateCategory::High, "4700 is not High");
  if (o.pass) o.detail = "0.5 Low, 0.5+eps Medium, 4699.99 Medium, 4700 High";
  return o;
}

Outcome long_lived_rates() {
  Outcome o;
  double m1 = compute_rate(3'176'785, 34'605);
  double m2 = compute_rate(14'464'427, 93'508);
  o.require(std::abs(m1 - 91.80) <= 0.005, "first rate " + format_shortest(m1));
  o.require(std::abs(m2 - 154.69) <= 0.005, "second rate " + format_shortest(m2));
  o.require(classify_rate(m1) == RateCategory::Medium && classify_rate(m2) == RateCategory::Medium,
            "not both Medium");
  if (o.pass) o.detail = format_fixed2(m1) + " and " + format_fixed2(m2) + " pps, both Medium";
  return o;
}

Outcome end_to_end_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  Scenario sc = acceptance_scenario();
  auto trace = generate(sc, slash13(), 2013);
  const auto& m = trace.manifest;

  // The scenario itself must realize the intended 3/4/3 split.
  std::map<std::string, int> intended;
  std::size_t manifest_attacks = 0;
  for (const auto& s : m.sources) {
    if (!s.detected) continue;
    ++manifest_attacks;
    std::string want = s.label.starts_with("high") ? "High" : s.label.starts_with("med") ? "Medium"
                       : s.label.starts_with("low") ? "Low" : "none";
    o.require(want == to_string(s.category), "manifest puts " + s.label + " in " + std::string(to_string(s.category)));
    ++intended[want];
  }
  o.require(manifest_attacks == 10 && intended["High"] == 3 && intended["Medium"] == 4 && intended["Low"] == 3,
            "manifest does not hold 3 High, 4 Medium, 3 Low attacks");
  o.require(m.sources.size() == 60, "scenario does not have 60 sources");

  auto r = analyze(trace.pcap, 1);
  std::map<std::uint32_t, const ExpectedSource*> truth;
  for (const auto& s : m.sources) truth[s.flow.key.src_ip.value()] = &s;
  std::size_t tp = 0, fp = 0;
  for (const auto& a : r.attacks) {
    const ExpectedSource* s = truth.at(a.key.src_ip.value());
    if (!s->detected) {
      ++fp;
      continue;
    }
    ++tp;
    o.require(a.intensity == s->flow.total_queries, s->label + " intensity");
    o.require(a.duration_s == s->duration_s, s->label + " duration");
    o.require(a.unique_dark_ips == s->flow.distinct_dark_dsts, s->label + " unique dark IPs");
    o.require(a.category == s->category, s->label + " category");
  }
  double precision = r.attacks.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  double recall = manifest_attacks ? static_cast<double>(tp) / static_cast<double>(manifest_attacks) : 0.0;
  o.require(precision == 1.0 && recall == 1.0, "precision " + format_shortest(precision) + ", recall " +
                                                   format_shortest(recall));
  double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "took " + format_fixed2(elapsed) + " s");
  if (o.pass) {
    o.detail = "precision 1, recall 1 over " + std::to_string(m.total_packets) + " packets, 10 attacks, " +
               format_fixed2(elapsed) + " s";
  }
  return o;
}

Outcome brute_force_equivalence() {
  Outcome o;
  auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 20 && o.pass; ++seed) {
    auto trace = generate(random_scenario(seed * 7919, 100'000), slash13(), seed);
    auto events = events_from_pcap(trace.pcap);
    o.require(events.size() == 100'000, "trace " + std::to_string(seed) + " has " + std::to_string(events.size()) +
                                            " queries");
    auto naive = naive_flows(events, default_tld_db());
    auto naive_sources = naive_attack_sources(events, default_tld_db());

    for (unsigned shards : {1u, 2u, 8u}) {
      auto r = analyze(trace.pcap, shards);
      o.require(r.flows == naive, "trace " + std::to_string(seed) + ": flows differ at " + std::to_string(shards) +
                                      " shards");
      std::set<std::uint32_t> got;
      for (const auto& a : r.attacks) got.insert(a.key.src_ip.value());
      o.require(got == naive_sources, "trace " + std::to_string(seed) + ": attack sources differ at " +
                                          std::to_string(shards) + " shards");

      // Arbitrary (not per-source) partitions merged back together.
      std::mt19937_64 rng(seed * 31 + shards);
      std::vector<FlowTable> parts(shards);
      for (const auto& e : events) feed(parts[rng() % shards], e, default_tld_db());
      o.require(merge(std::move(parts)).finalize() == naive,
                "trace " + std::to_string(seed) + ": arbitrary " + std::to_string(shards) + "-way merge differs");
    }
  }
  double elapsed = seconds_since(t0);
  o.require(elapsed < 120.0, "took " + format_fixed2(elapsed) + " s");
  if (o.pass) o.detail = "20 traces x 100000 packets, shards 1/2/8, " + format_fixed2(elapsed) + " s";
  return o;
}

bool manifest_matches_pcap(const GeneratedTrace& trace, std::string& why) {
  auto cap = parse_pcap_stream(trace.pcap);
  const auto& pkts = trace.manifest.packets;
  if (cap.frames.size() != pkts.size() || cap.truncated_records != 0) {
    why = "frame count " + std::to_string(cap.frames.size()) + " vs " + std::to_string(pkts.size());
    return false;
  }
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    auto rec = decode_frame(cap.frames[i], cap.header);
    if (!rec) {
      why = "frame " + std::to_string(i) + " did not decode";
      return false;
    }
    auto q = parse_dns_query(rec->udp_payload);
    const auto& p = pkts[i];
    if (!q || q->qname != p.qname || q->qtype != p.qtype || q->transaction_id != p.transaction_id ||
        rec->src_ip != p.src_ip || rec->dst_ip != p.dst_ip || rec->src_port != p.src_port ||
        rec->timestamp != p.timestamp || rec->frame_bytes != p.frame_len) {
      why = "frame " + std::to_string(i) + " differs from the manifest";
      return false;
    }
  }
  return true;
}

Outcome parser_round_trip(const std::string& mixed_path) {
  Outcome o;
  std::vector<std::pair<std::string, GeneratedTrace>> traces;
  traces.emplace_back("acceptance", generate(acceptance_scenario(), slash13(), 2013));
  {
    std::ifstream in(mixed_path);
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario mixed = parse_scenario_json(buf.str());
    traces.emplace_back("mixed", generate(mixed, load_scope(mixed.darknet), 7));
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    traces.emplace_back("random-" + std::to_string(seed), generate(random_scenario(seed, 20'000), slash13(), seed));
  }
  std::uint64_t frames = 0;
  for (const auto& [name, trace] : traces) {
    std::string why;
    o.require(manifest_matches_pcap(trace, why), name + ": " + why);
    frames += trace.manifest.packets.size();
  }

  // Fuzz: random bytes with a bias toward compression pointers and plausible headers.
  std::mt19937_64 rng(0xf0225eed);
  std::vector<std::uint8_t> buf;
  std::uint64_t parsed = 0, typed_errors = 0, skipped = 0;
  auto t0 = Clock::now();
  for (int i = 0; i < 1'000'000 && o.pass; ++i) {
    buf.resize(rng() % 300);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
    if (buf.size() > 12) {
      if (rng() % 2) buf[2] &= 0x7f;  // query
      if (rng() % 2) {
        buf[4] = 0;
        buf[5] = 1;
      }
      for (std::size_t k = 12; k + 1 < buf.size(); k += 2 + rng() % 6) {
        if (rng() % 3 == 0) buf[k] = static_cast<std::uint8_t>(0xc0 | (rng() % 2));
      }
    }
    try {
      auto q = parse_dns_query(buf);
      q ? ++parsed : ++skipped;
    } catch (const Error& e) {
      bool typed = e.code() == ErrorCode::MalformedDns || e.code() == ErrorCode::CompressionLoop;
      o.require(typed, std::string("untyped error: ") + e.what());
      ++typed_errors;
    } catch (const std::exception& e) {
      o.require(false, std::string("unexpected exception: ") + e.what());
    }
  }
  if (o.pass) {
    o.detail = std::to_string(traces.size()) + " scenarios, " + std::to_string(frames) +
               " frames exact; 1000000 fuzz payloads (" + std::to_string(parsed) + " parsed, " +
               std::to_string(skipped) + " skipped, " + std::to_string(typed_errors) + " typed errors) in " +
               format_fixed2(seconds_since(t0)) + " s";
  }
  return o;
}

Outcome query_type_table() {
  Outcome o;
  struct Row {
    std::uint16_t type;
    std::uint64_t count;
    double pct;
  };
  const Row rows[] = {{qtype::ANY, 27'649'274, 64.23},
                      {qtype::A, 11'310'058, 26.28},
                      {qtype::TXT, 2'459'257, 5.71},
                      {qtype::MX, 500'143, 1.16},
                      {qtype::RRSIG, 63'340, 0.15}};
  // Back-compute the month total: every count/total must round to its printed percentage.
  std::uint64_t lo = 0, hi = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : rows) {
    lo = std::max(lo, static_cast<std::uint64_t>(std::ceil(static_cast<double>(r.count) * 100.0 / (r.pct + 0.005))));
    hi = std::min(hi, static_cast<std::uint64_t>(std::floor(static_cast<double>(r.count) * 100.0 / (r.pct - 0.005))));
  }
  o.require(lo <= hi, "no consistent monthly total");
  std::uint64_t total = lo + (hi - lo) / 2;
  std::map<std::uint16_t, std::uint64_t> counts;
  std::uint64_t rest = total;
  for (const auto& r : rows) {
    counts[r.type] = r.count;
    rest -= r.count;
  }
  for (std::uint16_t code = 1000; rest > 0; ++code) {
    std::uint64_t take = std::min<std::uint64_t>(rest, 50'000);
    counts[code] = take;
    rest -= take;
  }
  auto dist = type_distribution(counts);
  for (std::size_t i = 0; i < 5 && o.pass; ++i) {
    const auto& got = dist.rows.at(i);
    o.require(got.qtype == qtype_name(rows[i].type) && std::abs(got.hundredths / 100.0 - rows[i].pct) <= 0.01 + 1e-9,
              got.qtype + " " + got.percentage_text() + " vs " + format_fixed2(rows[i].pct));
  }
  auto column_sum = [](const TypeDistribution& d) {
    double s = 0;
    for (const auto& r : d.rows) s += std::stod(r.percentage_text());
    return s;
  };
  o.require(std::abs(column_sum(dist) - 100.0) <= 0.01, "Table column sums to " + format_fixed2(column_sum(dist)));

  std::mt19937_64 rng(44);
  for (int i = 0; i < 20'000 && o.pass; ++i) {
    std::map<std::uint16_t, std::uint64_t> m;
    int n = 1 + static_cast<int>(rng() % 15);
    for (int k = 0; k < n; ++k) m[static_cast<std::uint16_t>(rng() % 400)] += 1 + rng() % (i % 3 ? 1'000'000'000 : 9);
    auto d = type_distribution(m, rng() % 8);
    o.require(std::abs(column_sum(d) - 100.0) <= 0.01, "random column sums to " + format_fixed2(column_sum(d)));
  }
  if (o.pass) {
    o.detail = "total " + std::to_string(total) + " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]: ";
    for (std::size_t i = 0; i < 5; ++i) o.detail += dist.rows[i].qtype + " " + dist.rows[i].percentage_text() + "% ";
    o.detail += "; 20000 random columns sum to 100";
  }
  return o;
}

Outcome throughput() {
  Outcome o;
  Scenario sc;
  sc.sources.push_back(source("f1", BehaviorKind::SpoofedVictimFlood, Ipv4Address(198, 51, 100, 1), 200'000, 20000,
                              400'000, kMarch15));
  auto b = source("b1", BehaviorKind::CompromisedHost, Ipv4Address(198, 51, 100, 2), 50'000, 1000, 300'000,
                  kMarch15 + 100);
  b.domains = {{"ripe.net", 1}, {".", 1}, {"isc.org", 1}};
  sc.sources.push_back(b);
  auto n = source("n1", BehaviorKind::NonAnyNoise, Ipv4Address(198, 51, 100, 3), 10'000, 500, 300'000, kMarch15);
  n.qtypes = {{qtype::A, 1}, {qtype::TXT, 1}};
  sc.sources.push_back(n);
  auto trace = generate(sc, slash13(), 1);

  double best = 0;
  for (int run = 0; run < 3; ++run) {
    auto t0 = Clock::now();
    auto r = analyze(trace.pcap, 1);
    double s = seconds_since(t0);
    o.require(r.stats.dns_queries == trace.manifest.total_packets, "analyzer lost packets");
    best = std::max(best, static_cast<double>(r.stats.frames) / s);
  }
  o.require(best >= 100'000, "only " + format_fixed2(best) + " packets/s");
  if (o.pass) o.detail = format_fixed2(best) + " packets/s single-threaded over 1000000 frames";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string mixed = argc > 1 ? argv[1] : DARKAMP_SCENARIO_DIR "/mixed.json";
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "rate-band boundaries", rate_bands},
      {2, "long-lived attack rates", long_lived_rates},
      {3, "end-to-end oracle", end_to_end_oracle},
      {4, "brute-force equivalence", brute_force_equivalence},
      {5, "parser round trip and fuzz", [&] { return parser_round_trip(mixed); }},
      {6, "query-type percentages", query_type_table},
      {7, "single-thread throughput", throughput},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("[N/A ] 8 corpus-scale figures: 134 detected attacks, the 720 GB corpus, 58,050 packets/hour and the "
              "hourly peaks need the original darknet data; covered only by format-level checks above\n");
  return failures == 0 ? 0 : 1;
}
