#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "darkamp/detect.hpp"
#include "darkamp/timestamp.hpp"

namespace darkamp {

struct TypeRow {
  std::string qtype;  // mnemonic, or "OTHER" for the remainder row
  std::uint64_t count = 0;
  std::uint32_t hundredths = 0;  // rendered percentage x 100
  double percentage = 0;         // unrounded

  std::string percentage_text() const;
};

struct TypeDistribution {
  std::vector<TypeRow> rows;
  std::uint64_t total = 0;
};

/// Top `top_n` query types by count plus an OTHER row for the rest.
///
/// Rendered percentages are count/total to two decimals, rounded half-to-even;
/// if that leaves the column off 100.00, the hundredths are nudged on the rows
/// with the largest rounding error so the column sums to exactly 100.00.
/// Throws Error(EmptyInput) when every count is zero.
TypeDistribution type_distribution(const std::map<std::uint16_t, std::uint64_t>& qtype_counts, std::size_t top_n = 5);

struct TimeSeries {
  std::int64_t bucket_width_s = 3600;
  Timestamp origin;
  std::vector<std::uint64_t> buckets;
};

/// Counts per `bucket_width_s` starting at the earliest timestamp, zero-filled.
TimeSeries time_series(std::span<const Timestamp> timestamps, std::int64_t bucket_width_s);

/// Descending by count, ties by name. `top_n` caps the length.
std::vector<DomainCount> top_domains(const std::map<std::string, std::uint64_t>& domain_counts,
                                     std::size_t top_n = std::numeric_limits<std::size_t>::max());

/// Two decimals, as used for sizes and rates. Infinity renders as "inf".
std::string format_fixed2(double value);
/// Shortest round-trip decimal form.
std::string format_shortest(double value);

std::string attack_table_csv(std::span<const AttackRecord> records);
std::string attack_table_json(std::span<const AttackRecord> records);
std::string type_distribution_csv(const TypeDistribution& dist);
std::string time_series_csv(const TimeSeries& series);
std::string domains_csv(std::span<const DomainCount> domains);

}  // namespace darkamp
