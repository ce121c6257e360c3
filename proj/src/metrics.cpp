#include "vanet/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "vanet/trace.hpp"

namespace vanet::metrics {

std::uint64_t CounterSet::total_drops() const {
  std::uint64_t s = 0;
  for (const auto& [r, c] : drops_by_reason) s += c;
  return s;
}

std::uint64_t FlowCounters::dropped() const {
  std::uint64_t s = 0;
  for (const auto& [r, c] : drops) s += c;
  return s;
}

bool Tally::conserved() const {
  if (unterminated || multiply_terminated) return false;
  if (totals.pl != totals.ps - totals.pr) return false;
  return std::all_of(flows.begin(), flows.end(), [](const FlowCounters& f) { return f.conserved(); });
}

Tally tally(std::string_view text, std::span<const traffic::FlowSpec> flows) {
  Tally t;
  std::unordered_map<NodeId, std::size_t> by_src;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    by_src.emplace(flows[i].src, i);
    t.flows.push_back(FlowCounters{flows[i].id, 0, 0, {}});
  }
  struct Pending {
    std::size_t flow;
    int terminals;
  };
  std::unordered_map<PacketId, Pending> packets;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const trace::Record r = trace::parse_line(line, line_no);
    if (r.type != "cbr") continue;

    if (r.event == trace::Event::send && r.layer == trace::Layer::AGT) {
      auto f = by_src.find(r.node);
      if (f == by_src.end()) continue;
      if (!packets.emplace(r.packet, Pending{f->second, 0}).second) {
        throw MetricError("trace line " + std::to_string(line_no) + ": packet " + std::to_string(r.packet) +
                          " sent twice");
      }
      ++t.flows[f->second].ps;
      ++t.totals.ps;
      continue;
    }
    auto p = packets.find(r.packet);
    if (p == packets.end()) continue;
    const traffic::FlowSpec& flow = flows[p->second.flow];
    if (r.event == trace::Event::recv && r.layer == trace::Layer::AGT) {
      if (r.node != flow.dst) continue;
      ++p->second.terminals;
      ++t.flows[p->second.flow].pr;
      ++t.totals.pr;
    } else if (r.event == trace::Event::drop) {
      ++p->second.terminals;
      ++t.flows[p->second.flow].drops[*r.reason];
      ++t.totals.drops_by_reason[*r.reason];
      if (r.node != flow.src && r.node != flow.dst && *r.reason != DropReason::END) ++t.totals.rd;
    }
  }
  for (const auto& [id, p] : packets) {
    if (p.terminals == 0) ++t.unterminated;
    if (p.terminals > 1) ++t.multiply_terminated;
  }
  t.totals.pl = t.totals.ps - std::min(t.totals.pr, t.totals.ps);
  return t;
}

namespace {

void require_runs(std::span<const CounterSet> runs, const char* what) {
  if (runs.empty()) throw MetricError(std::string(what) + ": no runs");
}

void require_sends(std::span<const CounterSet> runs, const char* what) {
  require_runs(runs, what);
  for (const auto& r : runs) {
    if (r.ps == 0) throw MetricError(std::string(what) + ": a run has ps = 0");
  }
}

}  // namespace

AdrResult adr(std::span<const CounterSet> runs) {
  require_runs(runs, "adr");
  double pr = 0.0;
  double ps = 0.0;
  for (const auto& r : runs) {
    pr += static_cast<double>(r.pr);
    ps += static_cast<double>(r.ps);
  }
  AdrResult a;
  a.apr = pr / static_cast<double>(runs.size());
  a.aps = ps / static_cast<double>(runs.size());
  if (a.aps == 0.0) throw MetricError("adr: average packets sent is zero");
  a.adr_pct = 100.0 * a.apr / a.aps;
  return a;
}

double rd_pct(std::span<const CounterSet> runs) {
  require_sends(runs, "rd_pct");
  double s = 0.0;
  for (const auto& r : runs) s += static_cast<double>(r.rd) / static_cast<double>(r.ps);
  return 100.0 * s / static_cast<double>(runs.size());
}

double pl_pct(std::span<const CounterSet> runs) {
  require_sends(runs, "pl_pct");
  double s = 0.0;
  for (const auto& r : runs) s += static_cast<double>(r.ps - r.pr) / static_cast<double>(r.ps);
  return 100.0 * s / static_cast<double>(runs.size());
}

std::vector<SummaryRow> summarize_sweep(const std::map<std::size_t, std::vector<RunResult>>& results,
                                        std::span<const std::uint64_t> expected_seeds) {
  std::vector<SummaryRow> rows;
  for (const auto& [n, runs] : results) {
    SummaryRow row;
    row.n_vehicles = n;
    std::vector<CounterSet> sets;
    std::vector<RunResult> sorted = runs;
    std::sort(sorted.begin(), sorted.end(), [](const RunResult& a, const RunResult& b) { return a.seed < b.seed; });
    for (const auto& r : sorted) {
      row.seeds.push_back(r.seed);
      if (r.counters.ps > 0) sets.push_back(r.counters);
    }
    for (auto s : expected_seeds) {
      if (std::find(row.seeds.begin(), row.seeds.end(), s) == row.seeds.end()) row.complete = false;
    }
    if (sets.size() != sorted.size()) row.complete = false;
    if (sets.empty()) {
      row.valid = false;
    } else {
      const AdrResult a = adr(sets);
      row.apr = a.apr;
      row.aps = a.aps;
      row.adr_pct = a.adr_pct;
      row.rd_pct = rd_pct(sets);
      row.pl_pct = pl_pct(sets);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "n_vehicles,adr_pct,rd_pct,pl_pct,seeds\n";
  for (const auto& r : rows) {
    std::string seeds;
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      if (i) seeds += ';';
      seeds += std::to_string(r.seeds[i]);
    }
    if (!r.complete) {
      seeds += " (incomplete)";
    } else if (r.seeds.size() == 1) {
      seeds += " (single-seed)";
    }
    out += std::to_string(r.n_vehicles) + ',';
    if (r.valid) {
      out += format_pct(r.adr_pct) + ',' + format_pct(r.rd_pct) + ',' + format_pct(r.pl_pct);
    } else {
      out += "nan,nan,nan";
    }
    out += ',' + seeds + '\n';
  }
  return out;
}

std::string runs_csv(std::span<const RunResult> runs) {
  std::string out = "n_vehicles,seed,ps,pr,rd,pl\n";
  for (const auto& r : runs) {
    out += std::to_string(r.n_vehicles) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.counters.ps) + ',' +
           std::to_string(r.counters.pr) + ',' + std::to_string(r.counters.rd) + ',' +
           std::to_string(r.counters.pl) + '\n';
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> csv_rows(std::string_view text, std::string_view header) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) throw MetricError("csv line 1: expected header '" + std::string(header) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1)) {
      throw MetricError("csv line " + std::to_string(line_no) + ": wrong number of fields");
    }
    rows.push_back(std::move(cells));
  }
  if (line_no == 0) throw MetricError("csv: empty input");
  return rows;
}

template <class T>
T to_number(const std::string& s, const char* field) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw MetricError(std::string("csv: bad ") + field + " '" + s + "'");
  return v;
}

}  // namespace

std::vector<SummaryPoint> parse_summary_csv(std::string_view text) {
  std::vector<SummaryPoint> out;
  for (auto& c : csv_rows(text, "n_vehicles,adr_pct,rd_pct,pl_pct,seeds")) {
    SummaryPoint p;
    p.n_vehicles = to_number<std::size_t>(c[0], "n_vehicles");
    p.adr_pct = c[1] == "nan" ? std::nan("") : to_number<double>(c[1], "adr_pct");
    p.rd_pct = c[2] == "nan" ? std::nan("") : to_number<double>(c[2], "rd_pct");
    p.pl_pct = c[3] == "nan" ? std::nan("") : to_number<double>(c[3], "pl_pct");
    p.seeds = c[4];
    out.push_back(p);
  }
  return out;
}

std::vector<RunResult> parse_runs_csv(std::string_view text) {
  std::vector<RunResult> out;
  for (auto& c : csv_rows(text, "n_vehicles,seed,ps,pr,rd,pl")) {
    RunResult r;
    r.n_vehicles = to_number<std::size_t>(c[0], "n_vehicles");
    r.seed = to_number<std::uint64_t>(c[1], "seed");
    r.counters.ps = to_number<std::uint64_t>(c[2], "ps");
    r.counters.pr = to_number<std::uint64_t>(c[3], "pr");
    r.counters.rd = to_number<std::uint64_t>(c[4], "rd");
    r.counters.pl = to_number<std::uint64_t>(c[5], "pl");
    out.push_back(r);
  }
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw MetricError("spearman: need two equal-length samples of size >= 2");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw MetricError("spearman: constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace vanet::metrics
