#include "darkamp/flow.hpp"

#include <algorithm>
#include <tuple>

#include "darkamp/error.hpp"

namespace darkamp {

FlowTable::FlowTable(FlowLimits limits) : limits_(limits) {
  if (limits_.max_domains == 0) throw Error(ErrorCode::InvalidConfig, "max_domains must be positive");
}

void FlowTable::check_dst_limit(const FlowState& flow, Ipv4Address src) const {
  if (flow.dsts.size() > limits_.max_distinct_dsts) {
    throw Error(ErrorCode::ResourceLimit, "flow from " + src.to_string() + " contacted more than " +
                                              std::to_string(limits_.max_distinct_dsts) + " distinct destinations");
  }
}

void FlowTable::count_domain(FlowState& flow, const std::string& name, Timestamp ts, std::uint64_t count) const {
  if (auto it = flow.domains.find(name); it != flow.domains.end()) {
    it->second.count += count;
    if (ts < it->second.first_seen) {
      if (!flow.domain_order.empty()) {
        flow.domain_order.erase({it->second.first_seen, name});
        flow.domain_order.emplace(ts, name);
      }
      it->second.first_seen = ts;
    }
    return;
  }
  if (flow.domains.size() < limits_.max_domains) {
    flow.domains.emplace(name, DomainTally{count, ts});
    if (!flow.domain_order.empty()) flow.domain_order.emplace(ts, name);
    return;
  }
  if (flow.domain_order.empty()) {
    for (const auto& [n, tally] : flow.domains) flow.domain_order.emplace(tally.first_seen, n);
  }
  auto last = std::prev(flow.domain_order.end());
  if (std::tie(ts, name) < std::tie(last->first, last->second)) {
    auto evicted = flow.domains.find(last->second);
    flow.other_domain_count += evicted->second.count;
    flow.domains.erase(evicted);
    flow.domain_order.erase(last);
    flow.domains.emplace(name, DomainTally{count, ts});
    flow.domain_order.emplace(ts, name);
  } else {
    flow.other_domain_count += count;
  }
}

void FlowTable::enforce_domain_cap(FlowState& flow) const {
  if (flow.domains.size() <= limits_.max_domains) return;
  flow.domain_order.clear();
  for (const auto& [n, tally] : flow.domains) flow.domain_order.emplace(tally.first_seen, n);
  while (flow.domains.size() > limits_.max_domains) {
    auto last = std::prev(flow.domain_order.end());
    auto evicted = flow.domains.find(last->second);
    flow.other_domain_count += evicted->second.count;
    flow.domains.erase(evicted);
    flow.domain_order.erase(last);
  }
}

void FlowTable::update(const PacketRecord& pkt, const DnsQuerySummary& query, const TldDatabase& db) {
  std::uint32_t src = pkt.src_ip.value();
  auto [it, inserted] = active_.try_emplace(src);
  FlowState* flow = &it->second;
  if (!inserted && limits_.idle_timeout_ns && pkt.timestamp.ns - flow->last_ts.ns > *limits_.idle_timeout_ns) {
    std::uint32_t next_segment = flow->segment + 1;
    closed_.emplace_back(src, std::move(*flow));
    *flow = FlowState{};
    flow->segment = next_segment;
    inserted = true;
  }
  if (inserted) {
    flow->first_ts = pkt.timestamp;
    flow->last_ts = pkt.timestamp;
  } else {
    flow->first_ts = std::min(flow->first_ts, pkt.timestamp);
    flow->last_ts = std::max(flow->last_ts, pkt.timestamp);
  }

  ++flow->total_queries;
  flow->total_frame_bytes += pkt.frame_bytes;
  flow->dsts.insert(pkt.dst_ip.value());
  check_dst_limit(*flow, pkt.src_ip);
  ++flow->qtype_counts[query.qtype];
  if (query.qtype == qtype::ANY) {
    ++flow->any_queries;
    flow->any_dsts.insert(pkt.dst_ip.value());
    if (!flow->domain_db_hit && domain_in_db(db, query.qname)) flow->domain_db_hit = true;
  }
  count_domain(*flow, query.qname, pkt.timestamp, 1);
}

void FlowTable::absorb(FlowState& into, FlowState&& from) const {
  bool into_empty = into.total_queries == 0;
  into.first_ts = into_empty ? from.first_ts : std::min(into.first_ts, from.first_ts);
  into.last_ts = into_empty ? from.last_ts : std::max(into.last_ts, from.last_ts);
  into.total_queries += from.total_queries;
  into.any_queries += from.any_queries;
  into.total_frame_bytes += from.total_frame_bytes;
  if (into.dsts.size() < from.dsts.size()) std::swap(into.dsts, from.dsts);
  into.dsts.insert(from.dsts.begin(), from.dsts.end());
  if (into.any_dsts.size() < from.any_dsts.size()) std::swap(into.any_dsts, from.any_dsts);
  into.any_dsts.insert(from.any_dsts.begin(), from.any_dsts.end());
  for (const auto& [type, n] : from.qtype_counts) into.qtype_counts[type] += n;

  into.domain_order.clear();
  for (auto& [name, tally] : from.domains) {
    auto [slot, fresh] = into.domains.try_emplace(name, tally);
    if (!fresh) {
      slot->second.count += tally.count;
      slot->second.first_seen = std::min(slot->second.first_seen, tally.first_seen);
    }
  }
  into.other_domain_count += from.other_domain_count;
  enforce_domain_cap(into);
  into.domain_db_hit = into.domain_db_hit || from.domain_db_hit;
}

void FlowTable::merge(FlowTable&& other) {
  for (auto& [src, state] : other.active_) {
    auto [it, inserted] = active_.try_emplace(src);
    if (inserted) {
      it->second = std::move(state);
    } else {
      absorb(it->second, std::move(state));
    }
    check_dst_limit(it->second, Ipv4Address(src));
  }
  for (auto& entry : other.closed_) closed_.push_back(std::move(entry));
  other.active_.clear();
  other.closed_.clear();
}

FlowSummary FlowTable::summarize(Ipv4Address src, const FlowState& flow) const {
  FlowSummary s;
  s.key = {src, flow.segment};
  s.first_ts = flow.first_ts;
  s.last_ts = flow.last_ts;
  s.total_queries = flow.total_queries;
  s.any_queries = flow.any_queries;
  s.distinct_dark_dsts = flow.dsts.size();
  s.distinct_any_dark_dsts = flow.any_dsts.size();
  s.total_frame_bytes = flow.total_frame_bytes;
  s.qtype_counts = flow.qtype_counts;
  for (const auto& [name, tally] : flow.domains) s.domain_counts.emplace(name, tally.count);
  s.other_domain_count = flow.other_domain_count;
  s.domain_db_hit = flow.domain_db_hit;
  return s;
}

std::vector<FlowSummary> FlowTable::finalize() const {
  std::vector<FlowSummary> out;
  out.reserve(flow_count());
  for (const auto& [src, state] : active_) out.push_back(summarize(Ipv4Address(src), state));
  for (const auto& [src, state] : closed_) out.push_back(summarize(Ipv4Address(src), state));
  std::sort(out.begin(), out.end(), [](const FlowSummary& a, const FlowSummary& b) { return a.key < b.key; });

  // Closed segments of one source seen by two shards cannot be reconciled.
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i - 1].key == out[i].key) {
      throw Error(ErrorCode::InvalidConfig, "duplicate flow segment for " + out[i].key.src_ip.to_string() +
                                                "; idle-timeout tables must be sharded by source");
    }
  }
  return out;
}

FlowTable merge(std::vector<FlowTable> shards) {
  if (shards.empty()) return FlowTable{};
  FlowTable out = std::move(shards.front());
  for (std::size_t i = 1; i < shards.size(); ++i) out.merge(std::move(shards[i]));
  return out;
}

}  // namespace darkamp
