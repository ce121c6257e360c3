#include "vanet/sweep.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "vanet/config.hpp"

namespace vanet::sweep {

namespace fs = std::filesystem;

int resolve_workers(int requested) {
  if (const char* env = std::getenv("VANETSIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  return omp_get_max_threads();
}

namespace {

std::string substitute(std::string s, std::size_t n) {
  const std::string key = "{n}";
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos)) {
    s.replace(pos, key.size(), std::to_string(n));
  }
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error(p.string() + ": cannot write");
    out << text;
  }
  fs::rename(tmp, p);
}

std::string run_name(const Job& j) {
  return "n" + std::to_string(j.n_vehicles) + "_s" + std::to_string(j.seed);
}

}  // namespace

sim::ScenarioConfig scenario_for(const sim::ScenarioConfig& tmpl, std::size_t n, std::uint64_t seed) {
  sim::ScenarioConfig c = tmpl;
  c.routes = substitute(c.routes, n);
  c.turns = substitute(c.turns, n);
  c.n_vehicles = n;
  c.seed = seed;
  return c;
}

JobResult run_one(const sim::ScenarioConfig& tmpl, const Job& job, const fs::path& trace_dir) {
  JobResult r;
  r.job = job;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    sim::ScenarioConfig cfg = scenario_for(tmpl, job.n_vehicles, job.seed);
    cfg.record_mobility = !trace_dir.empty();
    cfg.record_events = !trace_dir.empty();
    const auto bundle = sim::run(cfg, sim::load_inputs(cfg));
    r.counters = bundle.tally.totals;
    r.conserved = bundle.tally.conserved();
    r.mean_near_signals = bundle.mean_near_signals;
    r.ok = r.conserved;
    if (!r.conserved) r.error = "packet conservation violated";
    if (!trace_dir.empty()) {
      spit(trace_dir / (run_name(job) + ".mobility.csv"), bundle.mobility_trace);
      spit(trace_dir / (run_name(job) + ".events.tr"), bundle.event_trace);
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<JobResult> run_jobs_serial(const std::vector<Job>& jobs, const JobFn& fn) {
  std::vector<JobResult> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) out.push_back(fn(j));
  return out;
}

std::vector<JobResult> run_jobs(const std::vector<Job>& jobs, const JobFn& fn, int workers) {
  std::vector<JobResult> out(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = fn(jobs[static_cast<std::size_t>(i)]);
  }
  return out;
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::function<void(const JobResult&)>& progress) {
  if (spec.counts.empty() || spec.seeds.empty()) throw std::invalid_argument("sweep: counts and seeds must be non-empty");
  const sim::ScenarioConfig tmpl = config::load(spec.template_path);
  const fs::path runs_dir = spec.out_dir / "runs";
  fs::create_directories(runs_dir);
  const fs::path trace_dir = spec.keep_traces ? spec.out_dir / "traces" : fs::path{};
  if (!trace_dir.empty()) fs::create_directories(trace_dir);

  std::vector<Job> jobs;
  for (auto n : spec.counts) {
    for (auto s : spec.seeds) jobs.push_back(Job{n, s});
  }

  SweepOutcome outcome;
  std::vector<Job> todo;
  std::map<std::pair<std::size_t, std::uint64_t>, JobResult> done;
  for (const auto& j : jobs) {
    const fs::path csv = runs_dir / (run_name(j) + ".csv");
    if (spec.resume && fs::exists(csv)) {
      try {
        const auto rows = metrics::parse_runs_csv(slurp(csv));
        if (rows.size() == 1 && rows[0].n_vehicles == j.n_vehicles && rows[0].seed == j.seed) {
          JobResult r;
          r.job = j;
          r.ok = true;
          r.skipped = true;
          r.conserved = true;
          r.counters = rows[0].counters;
          done[{j.n_vehicles, j.seed}] = r;
          if (progress) progress(r);
          continue;
        }
      } catch (const std::exception&) {
        // unreadable leftovers are simply rerun
      }
    }
    todo.push_back(j);
  }

  const int workers = std::max(1, spec.workers);
  const JobFn fn = [&](const Job& j) {
    JobResult r = run_one(tmpl, j, trace_dir);
    if (r.ok) spit(runs_dir / (run_name(j) + ".csv"), sim::counters_csv(j.n_vehicles, j.seed, r.counters));
#pragma omp critical(sweep_progress)
    {
      if (progress) progress(r);
    }
    return r;
  };
  for (auto& r : run_jobs(todo, fn, workers)) done[{r.job.n_vehicles, r.job.seed}] = std::move(r);

  std::map<std::size_t, std::vector<metrics::RunResult>> cells;
  std::vector<metrics::RunResult> runs;
  for (const auto& j : jobs) {
    const JobResult& r = done.at({j.n_vehicles, j.seed});
    outcome.results.push_back(r);
    auto& cell = cells[j.n_vehicles];
    if (!r.ok) {
      outcome.all_ok = false;
      continue;
    }
    metrics::RunResult rr{j.n_vehicles, j.seed, r.counters};
    cell.push_back(rr);
    runs.push_back(rr);
  }
  outcome.rows = metrics::summarize_sweep(cells, spec.seeds);
  spit(spec.out_dir / "runs.csv", metrics::runs_csv(runs));
  spit(spec.out_dir / "summary.csv", metrics::summary_csv(outcome.rows));
  return outcome;
}

}  // namespace vanet::sweep
