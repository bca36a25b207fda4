#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "darkamp/ipv4.hpp"

namespace darkamp {

/// The monitored dark address space: a canonical set of disjoint, non-adjacent
/// address ranges built from CIDR blocks.
class DarknetScope {
 public:
  struct Range {
    std::uint32_t first;
    std::uint32_t last;
    friend bool operator==(const Range&, const Range&) = default;
  };

  /// Throws Error(InvalidConfig) when `prefixes` is empty.
  explicit DarknetScope(std::span<const Ipv4Prefix> prefixes);

  bool contains(Ipv4Address ip) const;
  std::uint64_t address_count() const { return address_count_; }
  const std::vector<Range>& ranges() const { return ranges_; }

  /// The `index`-th address in ascending order; index < address_count().
  Ipv4Address address_at(std::uint64_t index) const;

  /// Minimal CIDR cover of the merged ranges.
  std::vector<Ipv4Prefix> prefixes() const;

 private:
  std::vector<Range> ranges_;
  std::vector<std::uint64_t> cumulative_;  // addresses before each range
  std::uint64_t address_count_ = 0;
};

/// Parses `a.b.c.d/len` strings; overlapping and adjacent blocks are merged.
/// Throws Error(InvalidCidr) for malformed blocks.
DarknetScope load_scope(std::span<const std::string> cidrs);

/// Root / top-level-domain list used for the requested-domain criterion.
class TldDatabase {
 public:
  TldDatabase() = default;
  TldDatabase(std::unordered_set<std::string> entries, bool includes_root)
      : entries_(std::move(entries)), includes_root_(includes_root) {}

  const std::unordered_set<std::string>& entries() const { return entries_; }
  bool includes_root() const { return includes_root_; }
  bool contains_label(std::string_view label) const { return entries_.contains(std::string(label)); }

 private:
  std::unordered_set<std::string> entries_;
  bool includes_root_ = false;
};

/// Line-oriented: `#` starts a comment, one suffix per line, a line holding
/// only "." enables root matching. Throws Error(EmptyDatabase) if nothing remains.
TldDatabase load_tld_db(std::string_view text);

/// Loads the database from a file path. Throws Error(Io) if unreadable.
TldDatabase load_tld_db_file(const std::string& path);

/// The snapshot bundled with the library.
std::string_view default_tld_snapshot();
const TldDatabase& default_tld_db();

/// True iff `qname` is the root and the db includes it, or the rightmost
/// label of `qname` is an entry. Case-insensitive.
bool domain_in_db(const TldDatabase& db, std::string_view qname);

}  // namespace darkamp
