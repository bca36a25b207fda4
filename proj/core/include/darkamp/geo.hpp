#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "darkamp/detect.hpp"
#include "darkamp/ipv4.hpp"

namespace darkamp {

inline constexpr std::string_view kUnknownLocation = "unknown";

/// Offline prefix -> label table with longest-prefix-match lookup.
class GeoTable {
 public:
  /// Throws Error(MalformedGeoRow) if the prefix is already present.
  void add(const Ipv4Prefix& prefix, std::string label);
  std::optional<std::string_view> lookup(Ipv4Address ip) const;
  std::size_t size() const { return size_; }

 private:
  std::array<std::unordered_map<std::uint32_t, std::string>, 33> by_length_;
  std::size_t size_ = 0;
};

/// CSV rows `a.b.c.d/len,label`; blank lines, `#` comments and a leading
/// `prefix,label` header are ignored. Throws Error(MalformedGeoRow) with the
/// line number for anything else that does not parse.
GeoTable load_geo_table(std::string_view csv);
GeoTable load_geo_table_file(const std::string& path);

/// Sets each record's location to its longest-prefix label or "unknown".
std::vector<AttackRecord> geo_enrich(std::vector<AttackRecord> records, const GeoTable& geo);

}  // namespace darkamp
