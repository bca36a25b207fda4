#include "darkamp/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "darkamp/dns.hpp"
#include "darkamp/error.hpp"

namespace darkamp {

namespace {

__extension__ typedef unsigned __int128 u128;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string joined_names(const std::vector<DomainCount>& domains) {
  std::string out;
  for (const auto& d : domains) {
    if (!out.empty()) out += ' ';
    out += d.name;
  }
  return out;
}

}  // namespace

std::string TypeRow::percentage_text() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%u.%02u", hundredths / 100, hundredths % 100);
  return buf;
}

TypeDistribution type_distribution(const std::map<std::uint16_t, std::uint64_t>& qtype_counts, std::size_t top_n) {
  TypeDistribution dist;
  std::vector<std::pair<std::uint16_t, std::uint64_t>> ranked;
  for (const auto& [type, count] : qtype_counts) {
    if (count == 0) continue;
    ranked.emplace_back(type, count);
    dist.total += count;
  }
  if (dist.total == 0) throw Error(ErrorCode::EmptyInput, "no query types to distribute");
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::uint64_t remainder = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < top_n) {
      dist.rows.push_back({qtype_name(ranked[i].first), ranked[i].second, 0, 0});
    } else {
      remainder += ranked[i].second;
    }
  }
  if (remainder) dist.rows.push_back({"OTHER", remainder, 0, 0});

  // Exact integer half-even rounding to hundredths of a percent.
  std::vector<std::int64_t> error;  // rounded - exact, in units of 1/total hundredths
  std::int64_t sum = 0;
  for (auto& row : dist.rows) {
    u128 scaled = u128{row.count} * 10000;
    auto q = static_cast<std::uint64_t>(scaled / dist.total);
    auto r = static_cast<std::uint64_t>(scaled % dist.total);
    u128 twice = u128{r} * 2;
    if (twice > dist.total || (twice == dist.total && (q & 1))) ++q;
    row.hundredths = static_cast<std::uint32_t>(q);
    row.percentage = static_cast<double>(row.count) / static_cast<double>(dist.total) * 100.0;
    error.push_back(static_cast<std::int64_t>(u128{q} * dist.total - scaled));
    sum += static_cast<std::int64_t>(q);
  }
  while (sum != 10000) {
    // Nudge the row whose rounding moved it furthest in the offending direction.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < dist.rows.size(); ++i) {
      bool better = sum > 10000 ? error[i] > error[pick] : error[i] < error[pick];
      if (better) pick = i;
    }
    std::int64_t step = sum > 10000 ? -1 : 1;
    dist.rows[pick].hundredths = static_cast<std::uint32_t>(dist.rows[pick].hundredths + step);
    error[pick] += step * static_cast<std::int64_t>(dist.total);
    sum += step;
  }
  return dist;
}

TimeSeries time_series(std::span<const Timestamp> timestamps, std::int64_t bucket_width_s) {
  if (bucket_width_s <= 0) throw Error(ErrorCode::InvalidConfig, "bucket width must be positive");
  TimeSeries series;
  series.bucket_width_s = bucket_width_s;
  if (timestamps.empty()) return series;
  series.origin = *std::min_element(timestamps.begin(), timestamps.end());
  std::int64_t width_ns = bucket_width_s * 1'000'000'000;
  for (Timestamp ts : timestamps) {
    auto index = static_cast<std::size_t>((ts.ns - series.origin.ns) / width_ns);
    if (index >= series.buckets.size()) series.buckets.resize(index + 1, 0);
    ++series.buckets[index];
  }
  return series;
}

std::vector<DomainCount> top_domains(const std::map<std::string, std::uint64_t>& domain_counts, std::size_t top_n) {
  std::vector<DomainCount> ranked;
  ranked.reserve(domain_counts.size());
  for (const auto& [name, count] : domain_counts) ranked.push_back({name, count});
  // std::map iteration is already name-ordered, so a stable sort keeps the tie-break.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  if (ranked.size() > top_n) ranked.resize(top_n);
  return ranked;
}

std::string format_fixed2(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string format_shortest(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string attack_table_csv(std::span<const AttackRecord> records) {
  std::string out =
      "src_ip,segment,requested_domains,detection_period,first_seen,last_seen,duration_s,intensity,any_queries,"
      "unique_dark_ips,avg_packet_size_bytes,avg_rate_pps,rate_category,location\n";
  for (const auto& r : records) {
    out += r.key.src_ip.to_string() + ',' + std::to_string(r.key.segment) + ',' +
           csv_field(joined_names(r.requested_domains)) + ',' + csv_field(calendar_range(r.first_ts, r.last_ts)) +
           ',' + to_iso8601(r.first_ts) + ',' + to_iso8601(r.last_ts) + ',' + format_shortest(r.duration_s) + ',' +
           std::to_string(r.intensity) + ',' + std::to_string(r.any_queries) + ',' +
           std::to_string(r.unique_dark_ips) + ',' + format_fixed2(r.avg_packet_size_bytes) + ',' +
           format_fixed2(r.avg_rate_pps) + ',' + std::string(to_string(r.category)) + ',' + csv_field(r.location) +
           '\n';
  }
  return out;
}

std::string attack_table_json(std::span<const AttackRecord> records) {
  using nlohmann::ordered_json;
  auto two_decimals = [](double v) -> ordered_json {
    if (std::isinf(v)) return nullptr;
    return std::stod(format_fixed2(v));
  };
  ordered_json rows = ordered_json::array();
  for (const auto& r : records) {
    ordered_json domains = ordered_json::array();
    for (const auto& d : r.requested_domains) domains.push_back({{"name", d.name}, {"count", d.count}});
    rows.push_back({
        {"src_ip", r.key.src_ip.to_string()},
        {"segment", r.key.segment},
        {"requested_domains", domains},
        {"detection_period", calendar_range(r.first_ts, r.last_ts)},
        {"first_seen", to_iso8601(r.first_ts)},
        {"last_seen", to_iso8601(r.last_ts)},
        {"duration_s", r.duration_s},
        {"intensity", r.intensity},
        {"any_queries", r.any_queries},
        {"unique_dark_ips", r.unique_dark_ips},
        {"avg_packet_size_bytes", two_decimals(r.avg_packet_size_bytes)},
        {"avg_rate_pps", two_decimals(r.avg_rate_pps)},
        {"rate_category", std::string(to_string(r.category))},
        {"location", r.location},
    });
  }
  ordered_json doc = {{"attacks", rows}};
  return doc.dump(2) + "\n";
}

std::string type_distribution_csv(const TypeDistribution& dist) {
  std::string out = "qtype,count,percentage\n";
  for (const auto& row : dist.rows) {
    out += row.qtype + ',' + std::to_string(row.count) + ',' + row.percentage_text() + '\n';
  }
  return out;
}

std::string time_series_csv(const TimeSeries& series) {
  std::string out = "bucket,start,count\n";
  for (std::size_t i = 0; i < series.buckets.size(); ++i) {
    Timestamp start{series.origin.ns + static_cast<std::int64_t>(i) * series.bucket_width_s * 1'000'000'000};
    out += std::to_string(i) + ',' + to_iso8601(start) + ',' + std::to_string(series.buckets[i]) + '\n';
  }
  return out;
}

std::string domains_csv(std::span<const DomainCount> domains) {
  std::string out = "rank,domain,count\n";
  std::size_t rank = 1;
  for (const auto& d : domains) {
    out += std::to_string(rank++) + ',' + csv_field(d.name) + ',' + std::to_string(d.count) + '\n';
  }
  return out;
}

}  // namespace darkamp
