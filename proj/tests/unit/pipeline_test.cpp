#include <filesystem>
#include <fstream>
#include <sstream>

#include "darkamp/error.hpp"
#include "darkamp/pipeline.hpp"
#include "darkamp/synth.hpp"
#include "doctest.h"
#include "frames.hpp"
#include "json.hpp"
#include "scenarios.hpp"

using namespace darkamp;
using namespace darkamp::testing;

namespace {

const DarknetScope& slash13() {
  static const DarknetScope s = load_scope(std::vector<std::string>{"10.0.0.0/13"});
  return s;
}

std::vector<std::uint8_t> pcap_of(const std::vector<std::vector<std::uint8_t>>& frames) {
  std::ostringstream out;
  PcapWriter w(out, LinkType::Ethernet);
  std::uint32_t t = 1363305600;
  for (const auto& f : frames) w.write(t++, 0, f);
  std::string s = out.str();
  return {s.begin(), s.end()};
}

AnalysisResult analyze(std::span<const std::uint8_t> pcap, AnalysisConfig cfg = {}) {
  Analyzer a(slash13(), default_tld_db(), cfg);
  a.ingest_buffer(pcap, "trace");
  return a.finish();
}

// Splits a generated file into two valid pcaps at frame `k`.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> split_pcap(const std::vector<std::uint8_t>& pcap,
                                                                          std::size_t k) {
  auto cap = parse_pcap_stream(pcap);
  auto write = [&](std::size_t from, std::size_t to) {
    std::ostringstream out;
    PcapWriter w(out, LinkType::Ethernet);
    for (std::size_t i = from; i < to; ++i) w.write(cap.frames[i].ts_seconds, cap.frames[i].ts_subsec, cap.frames[i].payload);
    std::string s = out.str();
    return std::vector<std::uint8_t>(s.begin(), s.end());
  };
  return {write(0, k), write(k, cap.frames.size())};
}

}  // namespace

TEST_CASE("every frame is accounted for by reason") {
  const Ipv4Address src(198, 51, 100, 1), dark(10, 0, 0, 9), lit(192, 0, 2, 1);
  auto good = ripe_net_any_query();
  auto response = good;
  response[2] |= 0x80;
  std::vector<std::uint8_t> loop = {0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0xc0, 0x0c, 0, 1, 0, 1};
  std::vector<std::uint8_t> empty_q = {0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  auto bad_ip = ipv4_udp(src, dark, 1, 53, good);
  bad_ip[0] = 0x4f;
  bad_ip.resize(20);

  auto pcap = pcap_of({
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, good)),
      ethernet(0x0806, std::vector<std::uint8_t>(28, 0)),
      ethernet(0x86dd, std::vector<std::uint8_t>(40, 0x60)),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, good, 6)),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 80, good)),
      ethernet(0x0800, ipv4_udp(src, lit, 1, 53, good)),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, response)),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, empty_q)),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, {1, 2, 3})),
      ethernet(0x0800, ipv4_udp(src, dark, 1, 53, loop)),
      ethernet(0x0800, bad_ip),
  });
  for (unsigned threads : {1u, 3u}) {
    AnalysisConfig cfg;
    cfg.threads = threads;
    auto r = analyze(pcap, cfg);
    const auto& s = r.stats;
    CHECK(s.frames == 11);
    CHECK(s.dns_queries == 1);
    CHECK(s.skipped.arp == 1);
    CHECK(s.skipped.ipv6 == 1);
    CHECK(s.skipped.non_udp == 1);
    CHECK(s.not_dns_port == 1);
    CHECK(s.outside_scope == 1);
    CHECK(s.dns_responses == 1);
    CHECK(s.dns_no_question == 1);
    CHECK(s.malformed_dns == 1);
    CHECK(s.compression_loops == 1);
    CHECK(s.malformed_ip == 1);
    REQUIRE(r.flows.size() == 1);
    CHECK(r.flows[0].total_frame_bytes == 68);
  }
}

TEST_CASE("empty capture produces an empty result") {
  auto r = analyze(pcap_of({}));
  CHECK(r.flows.empty());
  CHECK(r.attacks.empty());
  CHECK(r.series.buckets.empty());
  CHECK(r.stats.frames == 0);
}

TEST_CASE("bad global header names the input") {
  std::vector<std::uint8_t> junk(24, 0xee);
  Analyzer a(slash13(), default_tld_db());
  try {
    a.ingest_buffer(junk, "capture-7.pcap");
    FAIL("expected UnknownMagic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownMagic);
    CHECK(std::string(e.what()).find("capture-7.pcap") != std::string::npos);
  }
}

TEST_CASE("truncated input keeps the good prefix and reports the offset") {
  auto trace = generate(acceptance_scenario(), slash13(), 5);
  auto bytes = trace.pcap;
  bytes.resize(bytes.size() - 30);
  Analyzer a(slash13(), default_tld_db());
  a.ingest_buffer(bytes, "cut");
  auto r = a.finish();
  REQUIRE(r.inputs.size() == 1);
  CHECK(r.inputs[0].truncated_records == 1);
  CHECK(r.inputs[0].truncation_offset.has_value());
  CHECK(r.stats.frames == trace.manifest.total_packets - 1);
}

TEST_CASE("pipeline reproduces the manifest") {
  auto trace = generate(acceptance_scenario(), slash13(), 12);
  const auto& m = trace.manifest;
  auto r = analyze(trace.pcap);
  CHECK(r.stats.dns_queries == m.total_packets);
  CHECK(r.qtype_counts == m.qtype_totals);
  CHECK(r.series.buckets == m.time_series);
  CHECK(r.series.origin == m.origin);
  REQUIRE(r.flows.size() == m.sources.size());
  std::map<std::uint32_t, const ExpectedSource*> by_ip;
  for (const auto& s : m.sources) by_ip[s.flow.key.src_ip.value()] = &s;
  for (const auto& f : r.flows) CHECK(f == by_ip.at(f.key.src_ip.value())->flow);

  std::size_t detected = 0;
  for (const auto& s : m.sources) detected += s.detected;
  CHECK(r.attacks.size() == detected);
  for (const auto& a : r.attacks) {
    const auto* s = by_ip.at(a.key.src_ip.value());
    CHECK(s->detected);
    CHECK(a.category == s->category);
    CHECK(a.duration_s == s->duration_s);
  }
}

TEST_CASE("thread count does not change the result") {
  auto trace = generate(random_scenario(6, 40'000), slash13(), 6);
  auto one = analyze(trace.pcap);
  for (unsigned threads : {2u, 4u, 8u}) {
    AnalysisConfig cfg;
    cfg.threads = threads;
    auto r = analyze(trace.pcap, cfg);
    CHECK(r.flows == one.flows);
    CHECK(r.attacks == one.attacks);
    CHECK(r.stats == one.stats);
    CHECK(r.series.buckets == one.series.buckets);
    CHECK(r.domain_counts == one.domain_counts);
  }
}

TEST_CASE("multiple inputs form one window") {
  auto trace = generate(acceptance_scenario(), slash13(), 19);
  auto whole = analyze(trace.pcap);
  auto [first, second] = split_pcap(trace.pcap, trace.manifest.packets.size() / 3);
  Analyzer a(slash13(), default_tld_db());
  a.ingest_buffer(first, "part1");
  a.ingest_buffer(second, "part2");
  auto r = a.finish();
  CHECK(r.inputs.size() == 2);
  CHECK(r.flows == whole.flows);
  CHECK(r.attacks == whole.attacks);
}

TEST_CASE("idle timeout splits flows into segments") {
  Scenario sc;
  auto early = source("early", BehaviorKind::CompromisedHost, Ipv4Address(1, 2, 3, 4), 50, 10, 100, kMarch15);
  sc.sources.push_back(early);
  auto trace = generate(sc, slash13(), 1);
  auto [first, second] = split_pcap(trace.pcap, 50);
  // Shift the second half a day later by rewriting record timestamps.
  auto cap = parse_pcap_stream(second);
  std::ostringstream out;
  PcapWriter w(out, LinkType::Ethernet);
  for (const auto& f : cap.frames) w.write(f.ts_seconds + 86400, f.ts_subsec, f.payload);
  std::string s = out.str();
  std::vector<std::uint8_t> later(s.begin(), s.end());

  AnalysisConfig cfg;
  cfg.limits.idle_timeout_ns = 3600LL * 1'000'000'000;
  for (unsigned threads : {1u, 2u}) {
    cfg.threads = threads;
    Analyzer a(slash13(), default_tld_db(), cfg);
    a.ingest_buffer(first, "a");
    a.ingest_buffer(later, "b");
    auto r = a.finish();
    REQUIRE(r.flows.size() == 2);
    CHECK(r.flows[0].key.segment == 0);
    CHECK(r.flows[1].key.segment == 1);
    CHECK(r.flows[0].total_queries == 50);
    CHECK(r.flows[1].total_queries == 50);
  }
}

TEST_CASE("reports are written and byte-identical across runs") {
  auto trace = generate(acceptance_scenario(), slash13(), 33);
  auto dir = std::filesystem::temp_directory_path() / "darkamp-pipeline-test";
  std::filesystem::remove_all(dir);
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  AnalysisConfig cfg;
  auto r1 = analyze(trace.pcap, cfg);
  auto files = write_reports(r1, dir / "a", cfg);
  cfg.threads = 4;
  auto r2 = analyze(trace.pcap, cfg);
  write_reports(r2, dir / "b", cfg);
  for (const char* name : {"attacks.csv", "attacks.json", "qtype_dist.csv", "timeseries.csv", "domains.csv",
                           "summary.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir / "a" / name));
    CHECK(read(dir / "a" / name) == read(dir / "b" / name));
  }
  auto summary = nlohmann::json::parse(read(files.summary_json));
  CHECK(summary["attacks"] == 10);
  CHECK(summary["packets"]["dns_queries"] == trace.manifest.total_packets);
  std::filesystem::remove_all(dir);
}
