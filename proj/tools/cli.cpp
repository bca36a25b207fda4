#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "darkamp/error.hpp"
#include "darkamp/geo.hpp"
#include "darkamp/pipeline.hpp"
#include "darkamp/scope.hpp"
#include "darkamp/synth.hpp"

namespace darkamp::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ResourceLimit:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_cidr_file(const std::filesystem::path& path) {
  std::vector<std::string> out;
  std::istringstream lines(read_file(path));
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

TldDatabase resolve_tld_db(const std::optional<std::filesystem::path>& path) {
  if (path) return load_tld_db_file(path->string());
  if (const char* env = std::getenv("DARKAMP_TLD_DB"); env && *env) return load_tld_db_file(env);
  return default_tld_db();
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "darkamp: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "darkamp: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<std::string> cidrs = cfg.darknet;
    if (cfg.darknet_file) {
      auto more = read_cidr_file(*cfg.darknet_file);
      cidrs.insert(cidrs.end(), more.begin(), more.end());
    }
    if (cidrs.empty()) throw Error(ErrorCode::InvalidConfig, "no darknet blocks given (--darknet or --darknet-file)");
    if (cfg.inputs.empty()) throw Error(ErrorCode::InvalidConfig, "no input pcap files");
    for (const auto& path : cfg.inputs) {
      if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::Io, path.string() + ": no such file");
    }

    DarknetScope scope = load_scope(cidrs);
    TldDatabase db = resolve_tld_db(cfg.tld_db);
    std::optional<GeoTable> geo;
    if (cfg.geo) geo = load_geo_table_file(cfg.geo->string());

    AnalysisConfig ac;
    ac.detection = cfg.detection;
    ac.bucket_width_s = cfg.bucket_width_s;
    ac.threads = cfg.threads;
    ac.top_qtypes = cfg.top_qtypes;
    if (cfg.flow_timeout_s) {
      if (!(*cfg.flow_timeout_s > 0)) throw Error(ErrorCode::InvalidConfig, "--flow-timeout must be positive");
      ac.limits.idle_timeout_ns = static_cast<std::int64_t>(*cfg.flow_timeout_s * 1e9);
    }

    Analyzer analyzer(scope, db, ac);
    for (const auto& path : cfg.inputs) analyzer.ingest_file(path);
    AnalysisResult result = analyzer.finish();
    if (geo) result.attacks = geo_enrich(std::move(result.attacks), *geo);
    write_reports(result, cfg.out_dir, ac, cfg.top_domains);

    for (const auto& in : result.inputs) {
      if (in.truncated_records) {
        err << "darkamp: warning: " << in.name << ": damaged record at offset " << in.truncation_offset.value_or(0)
            << "; remainder skipped\n";
      }
    }
    std::uint64_t cats[3] = {0, 0, 0};
    for (const auto& a : result.attacks) ++cats[static_cast<int>(a.category)];
    out << "frames " << result.stats.frames << ", dns queries " << result.stats.dns_queries << ", skipped "
        << result.stats.skipped.total() << ", flows " << result.flows.size() << ", attacks "
        << result.attacks.size() << " (Low " << cats[0] << ", Medium " << cats[1] << ", High " << cats[2] << ")\n";
    out << "reports written to " << cfg.out_dir.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Scenario scenario = parse_scenario_json(read_file(args.scenario));
    std::vector<std::string> cidrs = args.darknet.empty() ? scenario.darknet : args.darknet;
    if (cidrs.empty()) throw Error(ErrorCode::InvalidConfig, "scenario has no darknet and none given");
    DarknetScope scope = load_scope(cidrs);
    TldDatabase db = resolve_tld_db(args.tld_db);

    GeneratedTrace trace = generate(scenario, scope, args.seed, db);
    {
      std::ofstream pcap(args.out, std::ios::binary | std::ios::trunc);
      pcap.write(reinterpret_cast<const char*>(trace.pcap.data()), static_cast<std::streamsize>(trace.pcap.size()));
      if (!pcap) throw Error(ErrorCode::Io, "cannot write " + args.out.string());
    }
    {
      std::ofstream manifest(args.manifest, std::ios::binary | std::ios::trunc);
      manifest << manifest_to_json(trace.manifest, args.with_packets);
      if (!manifest) throw Error(ErrorCode::Io, "cannot write " + args.manifest.string());
    }
    std::size_t detected = 0;
    for (const auto& s : trace.manifest.sources) detected += s.detected;
    out << "wrote " << trace.manifest.total_packets << " packets from " << trace.manifest.sources.size()
        << " sources (" << detected << " expected attacks) to " << args.out.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"darkamp: DNS amplification DDoS inference from darknet captures"};
  app.require_subcommand(1);

  RunConfig rc;
  std::vector<std::string> inputs;
  std::optional<std::string> darknet_file, tld_db, geo;
  std::string out_dir = rc.out_dir.string();
  bool no_domain_check = false;

  auto* analyze = app.add_subcommand("analyze", "Detect and characterize DNS amplification flows in pcap files");
  analyze->add_option("inputs,-i,--input", inputs, "Classic pcap files, analyzed as one window")->required();
  analyze->add_option("--darknet", rc.darknet, "Monitored dark block a.b.c.d/len (repeatable)");
  analyze->add_option("--darknet-file", darknet_file, "File with one CIDR block per line");
  analyze->add_option("--tld-db", tld_db, "Root/TLD list (default: $DARKAMP_TLD_DB, then the bundled snapshot)");
  analyze->add_option("--min-any", rc.detection.min_any_queries, "Minimum ANY queries per flow")->capture_default_str();
  analyze->add_option("--min-hosts", rc.detection.min_distinct_hosts, "Minimum distinct dark hosts hit by ANY queries")
      ->capture_default_str();
  analyze->add_option("--low-max-pps", rc.detection.low_rate_max_pps, "Upper bound of the Low rate band")
      ->capture_default_str();
  analyze->add_option("--high-min-pps", rc.detection.high_rate_min_pps, "Lower bound of the High rate band")
      ->capture_default_str();
  analyze->add_flag("--no-domain-check", no_domain_check, "Do not require a requested name in the TLD db");
  analyze->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  analyze->add_option("--bucket-width", rc.bucket_width_s, "Time-series bucket width in seconds")
      ->capture_default_str();
  analyze->add_option("--geo", geo, "Offline prefix,label CSV for geo enrichment");
  analyze->add_option("--flow-timeout", rc.flow_timeout_s, "Split a source's flow after this many idle seconds");
  analyze->add_option("--threads", rc.threads, "Ingestion shards")->capture_default_str()->check(CLI::Range(1u, 256u));
  analyze->add_option("--top-types", rc.top_qtypes, "Query types listed before OTHER")->capture_default_str();
  analyze->add_option("--top-domains", rc.top_domains, "Rows in domains.csv")->capture_default_str();

  GenerateArgs ga;
  std::string scenario, pcap_out, manifest_out;
  std::optional<std::string> gen_tld;
  auto* gen = app.add_subcommand("generate", "Write a labeled synthetic darknet trace and its manifest");
  gen->add_option("--scenario", scenario, "Scenario JSON")->required();
  gen->add_option("--seed", ga.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", pcap_out, "Output pcap")->required();
  gen->add_option("--manifest", manifest_out, "Output manifest JSON")->required();
  gen->add_option("--darknet", ga.darknet, "Override the scenario's darknet blocks (repeatable)");
  gen->add_option("--tld-db", gen_tld, "Root/TLD list used for expected verdicts");
  gen->add_flag("--with-packets", ga.with_packets, "Include the per-packet list in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitUsage);
  }

  if (analyze->parsed()) {
    for (const auto& p : inputs) rc.inputs.emplace_back(p);
    if (darknet_file) rc.darknet_file = *darknet_file;
    if (tld_db) rc.tld_db = *tld_db;
    if (geo) rc.geo = *geo;
    rc.out_dir = out_dir;
    rc.detection.require_domain_db_hit = !no_domain_check;
    try {
      rc.detection.validate();
    } catch (const Error& e) {
      err << "darkamp: " << e.what() << "\n";
      return kExitUsage;
    }
    return cmd_analyze(rc, out, err);
  }
  ga.scenario = scenario;
  ga.out = pcap_out;
  ga.manifest = manifest_out;
  if (gen_tld) ga.tld_db = *gen_tld;
  return cmd_generate(ga, out, err);
}

}  // namespace darkamp::cli
