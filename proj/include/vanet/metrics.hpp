#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vanet/packet.hpp"
#include "vanet/traffic.hpp"

namespace vanet::metrics {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CounterSet {
  std::uint64_t ps = 0;  // application sends at flow sources
  std::uint64_t pr = 0;  // application receives at flow destinations
  std::uint64_t rd = 0;  // data drops at nodes that are neither source nor destination
  std::uint64_t pl = 0;  // ps - pr
  std::map<DropReason, std::uint64_t> drops_by_reason;

  std::uint64_t total_drops() const;
  bool operator==(const CounterSet&) const = default;
};

struct FlowCounters {
  std::uint32_t flow = 0;
  std::uint64_t ps = 0;
  std::uint64_t pr = 0;
  std::map<DropReason, std::uint64_t> drops;

  std::uint64_t dropped() const;
  bool conserved() const { return ps == pr + dropped(); }
};

struct Tally {
  CounterSet totals;
  std::vector<FlowCounters> flows;
  /// Packets with other than exactly one terminal event (receive or drop).
  std::uint64_t unterminated = 0;
  std::uint64_t multiply_terminated = 0;

  bool conserved() const;
};

/// Counts data packets in an event trace. Packets are tied to flows through
/// the AGT send line at the flow source.
Tally tally(std::string_view trace, std::span<const traffic::FlowSpec> flows);

struct AdrResult {
  double apr = 0.0;
  double aps = 0.0;
  double adr_pct = 0.0;
};

/// mean(pr) / mean(ps) * 100.
AdrResult adr(std::span<const CounterSet> runs);
/// 100 * mean(rd / ps).
double rd_pct(std::span<const CounterSet> runs);
/// 100 * mean((ps - pr) / ps).
double pl_pct(std::span<const CounterSet> runs);

struct RunResult {
  std::size_t n_vehicles = 0;
  std::uint64_t seed = 0;
  CounterSet counters;
};

struct SummaryRow {
  std::size_t n_vehicles = 0;
  std::vector<std::uint64_t> seeds;
  double apr = 0.0;
  double aps = 0.0;
  double adr_pct = 0.0;
  double rd_pct = 0.0;
  double pl_pct = 0.0;
  bool complete = true;
  bool valid = true;  // false when no run had any sends
};

/// One row per vehicle count, ascending. Rows missing any of `expected_seeds`
/// are flagged incomplete.
std::vector<SummaryRow> summarize_sweep(const std::map<std::size_t, std::vector<RunResult>>& results,
                                        std::span<const std::uint64_t> expected_seeds);

/// Two decimals, as printed in the tables.
std::string format_pct(double v);

/// `n_vehicles,adr_pct,rd_pct,pl_pct,seeds`
std::string summary_csv(std::span<const SummaryRow> rows);
/// `n_vehicles,seed,ps,pr,rd,pl`
std::string runs_csv(std::span<const RunResult> runs);

struct SummaryPoint {
  std::size_t n_vehicles = 0;
  double adr_pct = 0.0;
  double rd_pct = 0.0;
  double pl_pct = 0.0;
  std::string seeds;
};

std::vector<SummaryPoint> parse_summary_csv(std::string_view text);
std::vector<RunResult> parse_runs_csv(std::string_view text);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace vanet::metrics
