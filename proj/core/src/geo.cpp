#include "darkamp/geo.hpp"

#include <fstream>
#include <sstream>

#include "darkamp/error.hpp"

namespace darkamp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void GeoTable::add(const Ipv4Prefix& prefix, std::string label) {
  auto [it, inserted] = by_length_[static_cast<std::size_t>(prefix.length)].try_emplace(prefix.network.value(),
                                                                                         std::move(label));
  if (!inserted) throw Error(ErrorCode::MalformedGeoRow, "duplicate prefix " + prefix.to_string());
  ++size_;
}

std::optional<std::string_view> GeoTable::lookup(Ipv4Address ip) const {
  for (int len = 32; len >= 0; --len) {
    const auto& table = by_length_[static_cast<std::size_t>(len)];
    if (table.empty()) continue;
    std::uint32_t mask = len == 0 ? 0u : ~std::uint32_t{0} << (32 - len);
    if (auto it = table.find(ip.value() & mask); it != table.end()) return it->second;
  }
  return std::nullopt;
}

GeoTable load_geo_table(std::string_view csv) {
  GeoTable table;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    auto nl = csv.find('\n');
    std::string_view line = trim(csv.substr(0, nl));
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line_no == 1 && line == "prefix,label") continue;

    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedGeoRow, "line " + std::to_string(line_no) + ": " + why);
    };
    auto comma = line.find(',');
    if (comma == std::string_view::npos) throw bad("expected 'prefix,label'");
    std::string_view label = trim(line.substr(comma + 1));
    if (label.empty()) throw bad("empty label");
    Ipv4Prefix prefix;
    try {
      prefix = Ipv4Prefix::parse(trim(line.substr(0, comma)));
    } catch (const Error& e) {
      throw bad(e.what());
    }
    try {
      table.add(prefix, std::string(label));
    } catch (const Error& e) {
      throw bad(e.what());
    }
  }
  return table;
}

GeoTable load_geo_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open geo table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_geo_table(buf.str());
}

std::vector<AttackRecord> geo_enrich(std::vector<AttackRecord> records, const GeoTable& geo) {
  for (auto& r : records) {
    auto label = geo.lookup(r.key.src_ip);
    r.location = std::string(label.value_or(kUnknownLocation));
  }
  return records;
}

}  // namespace darkamp
