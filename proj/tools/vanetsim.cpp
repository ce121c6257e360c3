#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vanet/config.hpp"
#include "vanet/metrics.hpp"
#include "vanet/phy.hpp"
#include "vanet/report.hpp"
#include "vanet/simulation.hpp"
#include "vanet/sweep.hpp"

namespace fs = std::filesystem;
using namespace vanet;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error(p.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot write");
  out << text;
}

struct ScenarioArgs {
  std::string net, routes, turns, config;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::vector<std::string> sets;
  bool no_signals = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--net", net, "Network path prefix (<prefix>.nod.xml etc.)");
    cmd->add_option("--routes", routes, "Route file");
    cmd->add_option("--turns", turns, "Turn probability table");
    cmd->add_option("--config", config, "Scenario config (key = value)");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--duration", duration, "Simulated seconds");
    cmd->add_option("--set", sets, "Override a config key, key=value");
    cmd->add_flag("--no-signals", no_signals, "Force every signal green");
  }

  sim::ScenarioConfig build() const {
    sim::ScenarioConfig cfg = config.empty() ? sim::ScenarioConfig{} : config::load(config);
    if (!net.empty()) cfg.net = net;
    if (!routes.empty()) cfg.routes = routes;
    if (!turns.empty()) cfg.turns = turns;
    if (seed) cfg.seed = *seed;
    if (duration) cfg.duration = *duration;
    if (no_signals) cfg.signals_enabled = false;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw config::ConfigError("--set " + s + ": expected key=value");
      config::apply(cfg, s.substr(0, eq), s.substr(eq + 1), fs::current_path());
    }
    if (cfg.net.empty()) throw config::ConfigError("--net is required (or 'net' in the config)");
    if (cfg.routes.empty()) throw config::ConfigError("--routes is required (or 'routes' in the config)");
    return cfg;
  }
};

int cmd_validate(const ScenarioArgs& a) {
  const auto cfg = a.build();
  const auto in = sim::load_inputs(cfg);
  std::size_t lights = 0;
  for (const auto& n : in.network.nodes()) lights += n.kind == road::NodeKind::traffic_light;
  const auto box = in.network.bounding_box();
  std::printf("network   %zu nodes (%zu signalized), %zu edges, %zu connections, %.1f x %.1f m\n",
              in.network.nodes().size(), lights, in.network.edges().size(), in.network.connections().size(),
              box.width, box.height);
  std::printf("routes    %zu types, %zu routes, %zu vehicles\n", in.routes.types.size(), in.routes.routes.size(),
              in.routes.vehicles.size());
  std::printf("radio     range %.2f m, crossover %.2f m\n", phy::max_range(cfg.phy), cfg.phy.crossover_distance());
  std::printf("ok\n");
  return 0;
}

int cmd_run(const ScenarioArgs& a, const std::string& out) {
  auto cfg = a.build();
  const auto in = sim::load_inputs(cfg);
  const auto bundle = sim::run(cfg, in);
  fs::create_directories(out);
  write_text(fs::path(out) / "mobility.csv", bundle.mobility_trace);
  write_text(fs::path(out) / "events.tr", bundle.event_trace);
  write_text(fs::path(out) / "counters.csv",
             sim::counters_csv(in.routes.vehicles.size(), cfg.seed, bundle.tally.totals));
  const auto& c = bundle.tally.totals;
  std::printf("ps %llu  pr %llu  rd %llu  pl %llu  flows %zu  events %llu\n", static_cast<unsigned long long>(c.ps),
              static_cast<unsigned long long>(c.pr), static_cast<unsigned long long>(c.rd),
              static_cast<unsigned long long>(c.pl), bundle.flows.size(),
              static_cast<unsigned long long>(bundle.events));
  if (!bundle.tally.conserved()) {
    std::fprintf(stderr, "error: packet conservation violated\n");
    return 1;
  }
  return 0;
}

int cmd_sweep(sweep::SweepSpec spec) {
  spec.workers = sweep::resolve_workers(spec.workers);
  std::fprintf(stderr, "sweep: %zu counts x %zu seeds on %d worker(s)\n", spec.counts.size(), spec.seeds.size(),
               spec.workers);
  const auto outcome = sweep::run_sweep(spec, [](const sweep::JobResult& r) {
    if (r.skipped) {
      std::fprintf(stderr, "  n=%zu seed=%llu reused\n", r.job.n_vehicles, static_cast<unsigned long long>(r.job.seed));
    } else if (r.ok) {
      std::fprintf(stderr, "  n=%zu seed=%llu ps=%llu pr=%llu (%.1f s)\n", r.job.n_vehicles,
                   static_cast<unsigned long long>(r.job.seed), static_cast<unsigned long long>(r.counters.ps),
                   static_cast<unsigned long long>(r.counters.pr), r.wall_seconds);
    } else {
      std::fprintf(stderr, "  n=%zu seed=%llu FAILED: %s\n", r.job.n_vehicles,
                   static_cast<unsigned long long>(r.job.seed), r.error.c_str());
    }
  });
  std::fputs(metrics::summary_csv(outcome.rows).c_str(), stdout);
  return outcome.all_ok ? 0 : 1;
}

int cmd_report(const std::string& summary, const std::string& out) {
  fs::path path = summary;
  if (fs::is_directory(path)) path /= "summary.csv";
  if (!fs::exists(path)) throw std::runtime_error(path.string() + ": summary not found");
  const auto rows = metrics::parse_summary_csv(read_text(path));
  if (rows.empty()) throw std::runtime_error(path.string() + ": summary has no rows");
  fs::create_directories(out);
  std::string adr = "n_vehicles,adr_pct\n";
  std::string dl = "n_vehicles,rd_pct,pl_pct\n";
  for (const auto& r : rows) {
    adr += std::to_string(r.n_vehicles) + ',' + metrics::format_pct(r.adr_pct) + '\n';
    dl += std::to_string(r.n_vehicles) + ',' + metrics::format_pct(r.rd_pct) + ',' + metrics::format_pct(r.pl_pct) + '\n';
  }
  write_text(fs::path(out) / "adr.csv", adr);
  write_text(fs::path(out) / "drop_loss.csv", dl);
  write_text(fs::path(out) / "adr.svg", report::render_svg(report::delivery_chart(rows)));
  write_text(fs::path(out) / "drop_loss.svg", report::render_svg(report::drop_loss_chart(rows)));
  std::printf("wrote %s/{adr,drop_loss}.{csv,svg}\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular ad-hoc network simulator"};
  app.require_subcommand(1);

  ScenarioArgs run_args;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one scenario and write its traces");
  run_args.add(run);
  run->add_option("--out", run_out, "Output directory")->required();

  ScenarioArgs val_args;
  auto* val = app.add_subcommand("validate", "Check a scenario's input files");
  val_args.add(val);

  sweep::SweepSpec spec;
  spec.workers = 0;
  std::string tmpl, sweep_out;
  auto* sw = app.add_subcommand("sweep", "Vehicle-count x seed sweep");
  sw->add_option("--template", tmpl, "Scenario template; {n} in routes is replaced by the count")->required();
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--counts", spec.counts, "Vehicle counts")->delimiter(',');
  sw->add_option("--seeds", spec.seeds, "Seeds")->delimiter(',');
  sw->add_option("--workers", spec.workers, "Parallel runs (VANETSIM_WORKERS overrides)");
  sw->add_flag("--resume", spec.resume, "Skip runs whose results already exist");
  sw->add_flag("--keep-traces", spec.keep_traces, "Also write per-run traces");

  std::string summary, report_out;
  auto* rep = app.add_subcommand("report", "Charts and tables from a sweep summary");
  rep->add_option("--summary", summary, "summary.csv or the sweep output directory")->required();
  rep->add_option("--out", report_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args, run_out);
    if (*val) return cmd_validate(val_args);
    if (*sw) {
      spec.template_path = tmpl;
      spec.out_dir = sweep_out;
      return cmd_sweep(spec);
    }
    if (*rep) return cmd_report(summary, report_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
