#include <benchmark/benchmark.h>

#include <random>

#include "darkamp/dns.hpp"
#include "darkamp/packet.hpp"
#include "darkamp/pipeline.hpp"
#include "darkamp/synth.hpp"
#include "events.hpp"
#include "scenarios.hpp"

using namespace darkamp;

namespace {

const DarknetScope& slash13() {
  static const DarknetScope s = load_scope(std::vector<std::string>{"10.0.0.0/13"});
  return s;
}

const GeneratedTrace& trace() {
  static const GeneratedTrace t = generate(testing::random_scenario(99, 200'000), slash13(), 99);
  return t;
}

void BM_ParseDnsQuery(benchmark::State& state) {
  auto wire = encode_dns_query("www.ripe.net", qtype::ANY, 7);
  for (auto _ : state) benchmark::DoNotOptimize(parse_dns_query(wire));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ParseDnsQuery);

void BM_DecodeFrame(benchmark::State& state) {
  auto cap = parse_pcap_stream(trace().pcap);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_frame(cap.frames[i], cap.header));
    if (++i == cap.frames.size()) i = 0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecodeFrame);

void BM_ScopeContains(benchmark::State& state) {
  std::vector<std::string> blocks;
  std::mt19937_64 rng(1);
  for (int i = 0; i < state.range(0); ++i) {
    blocks.push_back(Ipv4Prefix{Ipv4Address(static_cast<std::uint32_t>(rng()) & 0xffffff00u), 24}.to_string());
  }
  auto scope = load_scope(blocks);
  std::vector<Ipv4Address> probes(4096);
  for (auto& p : probes) p = Ipv4Address(static_cast<std::uint32_t>(rng()));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scope.contains(probes[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScopeContains)->Arg(1)->Arg(64)->Arg(4096);

void BM_FlowUpdate(benchmark::State& state) {
  auto events = testing::random_events(5, 100'000, static_cast<int>(state.range(0)), 1 << 16);
  for (auto _ : state) {
    FlowTable t = testing::table_of(events, default_tld_db());
    benchmark::DoNotOptimize(t.flow_count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_FlowUpdate)->Arg(16)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
  const auto& t = trace();
  AnalysisConfig cfg;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    Analyzer a(slash13(), default_tld_db(), cfg);
    a.ingest_buffer(t.pcap);
    benchmark::DoNotOptimize(a.finish());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.manifest.total_packets));
}
BENCHMARK(BM_Analyze)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
