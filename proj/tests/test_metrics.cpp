#include <doctest.h>

#include <cmath>

#include "vanet/metrics.hpp"
#include "vanet/trace.hpp"

using namespace vanet;
using namespace vanet::metrics;

namespace {

CounterSet counts(std::uint64_t ps, std::uint64_t pr, std::uint64_t rd = 0) {
  CounterSet c;
  c.ps = ps;
  c.pr = pr;
  c.rd = rd;
  c.pl = ps - pr;
  return c;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

traffic::FlowSpec flow(std::uint32_t id, NodeId s, NodeId d) {
  traffic::FlowSpec f;
  f.id = id;
  f.src = s;
  f.dst = d;
  return f;
}

}  // namespace

TEST_CASE("delivery ratio is a ratio of means") {
  std::vector<CounterSet> runs{counts(100, 80), counts(100, 60)};
  auto a = adr(runs);
  CHECK(close(a.apr, 70.0));
  CHECK(close(a.aps, 100.0));
  CHECK(close(a.adr_pct, 70.0));
  runs = {counts(100, 50), counts(300, 270)};
  CHECK(close(adr(runs).adr_pct, 80.0));  // mean of ratios would be 70
  runs = {counts(10, 10), counts(20, 20)};
  CHECK(close(adr(runs).adr_pct, 100.0));
  runs = {counts(0, 0)};
  CHECK_THROWS_AS(adr(runs), MetricError);
  CHECK_THROWS_AS(adr(std::vector<CounterSet>{}), MetricError);
}

TEST_CASE("router drop and loss are means of per-run ratios") {
  std::vector<CounterSet> runs{counts(10, 10, 0), counts(10, 8, 2)};
  CHECK(close(rd_pct(runs), 10.0));
  runs = {counts(10, 8), counts(10, 6)};
  CHECK(close(pl_pct(runs), 30.0));
  runs = {counts(7, 7), counts(9, 9)};
  CHECK(pl_pct(runs) == 0.0);
  runs = {counts(7, 0), counts(9, 0)};
  CHECK(close(pl_pct(runs), 100.0));
  runs = {counts(7, 0), counts(0, 0)};
  CHECK_THROWS_AS(pl_pct(runs), MetricError);
  CHECK_THROWS_AS(rd_pct(runs), MetricError);
}

TEST_CASE("five-seed averaging against hand-computed values") {
  std::vector<CounterSet> runs{counts(2240, 1900, 12), counts(2240, 2000, 7), counts(1960, 1500, 30),
                               counts(2520, 2100, 3), counts(2240, 1680, 0)};
  const double apr = (1900.0 + 2000 + 1500 + 2100 + 1680) / 5;
  const double aps = (2240.0 + 2240 + 1960 + 2520 + 2240) / 5;
  const auto a = adr(runs);
  CHECK(close(a.apr, apr));
  CHECK(close(a.aps, aps));
  CHECK(close(a.adr_pct, 100.0 * apr / aps));
  const double rd = 100.0 * (12.0 / 2240 + 7.0 / 2240 + 30.0 / 1960 + 3.0 / 2520 + 0.0 / 2240) / 5;
  const double pl = 100.0 * (340.0 / 2240 + 240.0 / 2240 + 460.0 / 1960 + 420.0 / 2520 + 560.0 / 2240) / 5;
  CHECK(close(rd_pct(runs), rd));
  CHECK(close(pl_pct(runs), pl));
}

TEST_CASE("with a constant denominator delivery and loss add to 100") {
  std::vector<CounterSet> runs{counts(400, 311), counts(400, 17), counts(400, 400), counts(400, 250)};
  CHECK(std::abs(adr(runs).adr_pct + pl_pct(runs) - 100.0) < 1e-12);
}

TEST_CASE("summary rows: fixture rendering, incomplete and invalid cells") {
  const std::vector<std::uint64_t> seeds{2, 4, 6, 8, 10};
  std::map<std::size_t, std::vector<RunResult>> results;
  const std::uint64_t pr[] = {2190, 2195, 2192, 2189, 2194};  // mean 2192 of 2500
  for (int i = 0; i < 5; ++i) results[10].push_back({10, seeds[i], counts(2500, pr[i])});
  results[20] = {{20, 4, counts(100, 50)}, {20, 2, counts(100, 40)}};
  results[30] = {{30, 2, counts(0, 0)}};
  const auto rows = summarize_sweep(results, seeds);
  REQUIRE(rows.size() == 3);
  CHECK(format_pct(rows[0].adr_pct) == "87.68");
  CHECK(rows[0].complete);
  CHECK_FALSE(rows[1].complete);
  CHECK(rows[1].seeds == std::vector<std::uint64_t>{2, 4});
  CHECK_FALSE(rows[2].valid);
  const auto csv = summary_csv(rows);
  CHECK(csv ==
        "n_vehicles,adr_pct,rd_pct,pl_pct,seeds\n"
        "10,87.68,0.00,12.32,2;4;6;8;10\n"
        "20,45.00,0.00,55.00,2;4 (incomplete)\n"
        "30,nan,nan,nan,2 (incomplete)\n");

  std::map<std::size_t, std::vector<RunResult>> single{{40, {{40, 2, counts(10, 9)}}}};
  const std::vector<std::uint64_t> one{2};
  CHECK(summary_csv(summarize_sweep(single, one)) == "n_vehicles,adr_pct,rd_pct,pl_pct,seeds\n40,90.00,0.00,10.00,2 (single-seed)\n");

  std::map<std::size_t, std::vector<RunResult>> lossless;
  for (std::size_t n : {10u, 20u}) {
    for (auto s : seeds) lossless[n].push_back({n, s, counts(50 + s, 50 + s)});
  }
  for (const auto& r : summarize_sweep(lossless, seeds)) CHECK(format_pct(r.adr_pct) == "100.00");
}

TEST_CASE("CSV round trips") {
  const auto parsed = parse_summary_csv("n_vehicles,adr_pct,rd_pct,pl_pct,seeds\n10,87.68,1.50,12.32,2;4\n30,nan,nan,nan,2 (incomplete)\n");
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].adr_pct == 87.68);
  CHECK(parsed[0].seeds == "2;4");
  CHECK(std::isnan(parsed[1].rd_pct));
  CHECK_THROWS_AS(parse_summary_csv("n,adr\n"), MetricError);
  CHECK_THROWS_WITH_AS(parse_summary_csv("n_vehicles,adr_pct,rd_pct,pl_pct,seeds\n10,x,1,2,3\n"),
                       doctest::Contains("adr_pct"), MetricError);

  const std::vector<RunResult> runs{{10, 2, counts(5, 4, 1)}, {20, 4, counts(9, 0)}};
  const auto text = runs_csv(runs);
  CHECK(text == "n_vehicles,seed,ps,pr,rd,pl\n10,2,5,4,1,1\n20,4,9,0,0,9\n");
  const auto back = parse_runs_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].counters.pl == 9);
  CHECK_THROWS_AS(parse_runs_csv("n_vehicles,seed,ps,pr,rd,pl\n1,2,3\n"), MetricError);
}

TEST_CASE("spearman rank correlation") {
  const std::vector<double> n{10, 20, 30, 40, 50, 60, 70};
  CHECK(spearman(n, std::vector<double>{90, 80, 70, 60, 50, 40, 30}) == doctest::Approx(-1.0));
  CHECK(spearman(n, std::vector<double>{1, 2, 3, 4, 5, 6, 100}) == doctest::Approx(1.0));
  // d = (1,-1,0,...) -> 1 - 6*2/(7*48)
  CHECK(spearman(n, std::vector<double>{2, 1, 3, 4, 5, 6, 7}) == doctest::Approx(1.0 - 12.0 / 336.0));
  // ties take average ranks
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 2, 2}) ==
        doctest::Approx(0.8944271909999159));
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), MetricError);
  CHECK_THROWS_AS(spearman(n, std::vector<double>(7, 5.0)), MetricError);
}

TEST_CASE("trace lines") {
  CHECK(trace::format_time(SimTime::from_seconds(1.5)) == "1.500000000");
  CHECK(trace::format_time(SimTime::from_ns(7)) == "0.000000007");
  Packet p;
  p.id = 42;
  p.size_bytes = 1028;
  p.payload = DataPayload{};
  std::string out;
  trace::append(out, SimTime::from_seconds(60.125), trace::Event::drop, 7, trace::Layer::IFQ, p, DropReason::IFQ);
  CHECK(out == "60.125000000 d 7 IFQ 42 cbr 1028 IFQ\n");
  const auto r = trace::parse_line(std::string_view(out).substr(0, out.size() - 1), 1);
  CHECK(r.time == SimTime::from_seconds(60.125));
  CHECK(r.event == trace::Event::drop);
  CHECK(r.node == 7);
  CHECK(r.layer == trace::Layer::IFQ);
  CHECK(r.packet == 42);
  CHECK(r.type == "cbr");
  CHECK(r.reason == DropReason::IFQ);
  p.payload = aodv::RreqMessage{};
  out.clear();
  trace::append(out, SimTime::from_seconds(2), trace::Event::send, 0, trace::Layer::RTR, p);
  CHECK(out == "2.000000000 s 0 RTR 42 RREQ 1028\n");

  CHECK_THROWS_WITH_AS(trace::parse_line("1.0 x 0 AGT 1 cbr 10", 12), doctest::Contains("line 12"), trace::TraceError);
  CHECK_THROWS_AS(trace::parse_line("1.0 d 0 AGT 1 cbr 10", 1), trace::TraceError);
  CHECK_THROWS_AS(trace::parse_line("1.0 r 0 AGT 1 cbr 10 END", 1), trace::TraceError);
  CHECK_THROWS_AS(trace::parse_line("1.0 d 0 AGT 1 cbr 10 BOGUS", 1), trace::TraceError);
  CHECK_THROWS_AS(trace::parse_line("1.0 s 0 PHY 1 cbr 10", 1), trace::TraceError);
  CHECK_THROWS_AS(trace::parse_line("1.0 s 0 AGT", 1), trace::TraceError);
}

TEST_CASE("tally attributes every data packet to one outcome") {
  const std::vector<traffic::FlowSpec> flows{flow(0, 0, 1), flow(1, 2, 3)};
  const std::string text =
      "60.0 s 0 AGT 1 cbr 1028\n"
      "60.0 s 0 RTR 100 RREQ 24\n"
      "60.1 r 1 AGT 1 cbr 1028\n"
      "60.1 s 0 AGT 2 cbr 1028\n"
      "60.2 f 5 RTR 2 cbr 1028\n"
      "60.3 d 5 IFQ 2 cbr 1028 IFQ\n"
      "60.3 s 2 AGT 3 cbr 1028\n"
      "60.4 d 2 RTR 3 cbr 1028 NRTE\n"
      "60.4 s 2 AGT 4 cbr 1028\n"
      "60.5 d 6 MAC 4 cbr 1028 RET\n"
      "60.6 s 2 AGT 5 cbr 1028\n"
      "60.6 r 5 AGT 5 cbr 1028\n"  // relay's receive is not a delivery
      "60.7 d 6 RTR 100 RREQ 24 COL\n"
      "200.0 d 5 RTR 5 cbr 1028 END\n";
  const auto t = tally(text, flows);
  CHECK(t.totals.ps == 5);
  CHECK(t.totals.pr == 1);
  CHECK(t.totals.rd == 2);
  CHECK(t.totals.pl == 4);
  CHECK(t.totals.drops_by_reason.at(DropReason::END) == 1);
  CHECK(t.totals.total_drops() == 4);
  CHECK(t.totals.rd <= t.totals.total_drops());
  CHECK(t.flows[0].ps == 2);
  CHECK(t.flows[0].pr == 1);
  CHECK(t.flows[1].dropped() == 3);
  CHECK(t.conserved());

  const auto open = tally("1.0 s 0 AGT 9 cbr 1028\n", flows);
  CHECK(open.unterminated == 1);
  CHECK_FALSE(open.conserved());
  const auto twice = tally("1.0 s 0 AGT 9 cbr 1028\n1.1 r 1 AGT 9 cbr 1028\n1.2 d 4 MAC 9 cbr 1028 RET\n", flows);
  CHECK(twice.multiply_terminated == 1);
  CHECK_FALSE(twice.conserved());
  CHECK_THROWS_AS(tally("1.0 s 0 AGT 9 cbr 1028\n1.0 s 0 AGT 9 cbr 1028\n", flows), MetricError);
  CHECK_THROWS_WITH_AS(tally("1.0 s 0 AGT 9 cbr 1028\ngarbage\n", flows), doctest::Contains("line 2"),
                       trace::TraceError);
}

TEST_CASE("turning a delivery into a drop never raises the delivery ratio") {
  const std::vector<traffic::FlowSpec> flows{flow(0, 0, 1)};
  std::string base;
  for (int k = 1; k <= 10; ++k) {
    base += "1.0 s 0 AGT " + std::to_string(k) + " cbr 1028\n";
    base += "1.1 r 1 AGT " + std::to_string(k) + " cbr 1028\n";
  }
  const auto before = tally(base, flows).totals;
  std::string worse = base;
  const std::string recv = "1.1 r 1 AGT 3 cbr 1028\n";
  worse.replace(worse.find(recv), recv.size(), "1.1 d 4 MAC 3 cbr 1028 COL\n");
  const auto after = tally(worse, flows).totals;
  CHECK(adr(std::vector<CounterSet>{after}).adr_pct <= adr(std::vector<CounterSet>{before}).adr_pct);
  CHECK(after.rd == before.rd + 1);
}
