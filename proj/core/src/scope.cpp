#include "darkamp/scope.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>

#include "darkamp/dns.hpp"
#include "darkamp/error.hpp"

namespace darkamp {

DarknetScope::DarknetScope(std::span<const Ipv4Prefix> prefixes) {
  if (prefixes.empty()) throw Error(ErrorCode::InvalidConfig, "darknet scope needs at least one block");
  std::vector<Range> sorted;
  sorted.reserve(prefixes.size());
  for (const auto& p : prefixes) sorted.push_back({p.first(), p.last()});
  std::sort(sorted.begin(), sorted.end(), [](const Range& a, const Range& b) { return a.first < b.first; });

  for (const Range& r : sorted) {
    if (!ranges_.empty() && std::uint64_t{r.first} <= std::uint64_t{ranges_.back().last} + 1) {
      ranges_.back().last = std::max(ranges_.back().last, r.last);
    } else {
      ranges_.push_back(r);
    }
  }
  cumulative_.reserve(ranges_.size());
  for (const Range& r : ranges_) {
    cumulative_.push_back(address_count_);
    address_count_ += std::uint64_t{r.last} - r.first + 1;
  }
}

bool DarknetScope::contains(Ipv4Address ip) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), ip.value(),
                             [](std::uint32_t v, const Range& r) { return v < r.first; });
  if (it == ranges_.begin()) return false;
  --it;
  return ip.value() <= it->last;
}

Ipv4Address DarknetScope::address_at(std::uint64_t index) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), index);
  auto slot = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return Ipv4Address(static_cast<std::uint32_t>(ranges_[slot].first + (index - cumulative_[slot])));
}

std::vector<Ipv4Prefix> DarknetScope::prefixes() const {
  std::vector<Ipv4Prefix> out;
  for (const Range& r : ranges_) {
    std::uint64_t cur = r.first;
    while (cur <= r.last) {
      int align = cur == 0 ? 32 : std::countr_zero(static_cast<std::uint32_t>(cur));
      std::uint64_t remaining = std::uint64_t{r.last} - cur + 1;
      int fit = 63 - std::countl_zero(remaining);
      int host_bits = std::min(align, fit);
      out.push_back({Ipv4Address(static_cast<std::uint32_t>(cur)), 32 - host_bits});
      cur += std::uint64_t{1} << host_bits;
    }
  }
  return out;
}

DarknetScope load_scope(std::span<const std::string> cidrs) {
  std::vector<Ipv4Prefix> prefixes;
  prefixes.reserve(cidrs.size());
  for (const auto& text : cidrs) prefixes.push_back(Ipv4Prefix::parse(text));
  return DarknetScope(prefixes);
}

TldDatabase load_tld_db(std::string_view text) {
  std::unordered_set<std::string> entries;
  bool root = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line == ".") {
      root = true;
      continue;
    }
    while (line.starts_with('.')) line.remove_prefix(1);
    try {
      entries.insert(normalize_qname(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidName, "TLD db line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (entries.empty() && !root) throw Error(ErrorCode::EmptyDatabase, "TLD database has no entries");
  return TldDatabase(std::move(entries), root);
}

TldDatabase load_tld_db_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open TLD db '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_tld_db(buf.str());
}

const TldDatabase& default_tld_db() {
  static const TldDatabase db = load_tld_db(default_tld_snapshot());
  return db;
}

bool domain_in_db(const TldDatabase& db, std::string_view qname) {
  if (qname.empty() || qname == ".") return db.includes_root();
  bool lower = std::none_of(qname.begin(), qname.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
  if (lower && qname.back() != '.') return db.contains_label(top_level_label(qname));
  try {
    return db.contains_label(top_level_label(normalize_qname(qname)));
  } catch (const Error&) {
    return false;
  }
}

}  // namespace darkamp
