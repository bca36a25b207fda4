#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darkamp/detect.hpp"

namespace darkamp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
};

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> darknet;
  std::optional<std::filesystem::path> darknet_file;
  std::optional<std::filesystem::path> tld_db;
  DetectionConfig detection;
  std::filesystem::path out_dir = "darkamp-out";
  std::int64_t bucket_width_s = 3600;
  std::optional<std::filesystem::path> geo;
  std::optional<double> flow_timeout_s;
  unsigned threads = 1;
  std::size_t top_qtypes = 5;
  std::size_t top_domains = 100;
};

struct GenerateArgs {
  std::filesystem::path scenario;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  std::filesystem::path manifest;
  std::vector<std::string> darknet;
  std::optional<std::filesystem::path> tld_db;
  bool with_packets = false;
};

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace darkamp::cli
