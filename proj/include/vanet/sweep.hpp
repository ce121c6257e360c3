#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vanet/metrics.hpp"
#include "vanet/simulation.hpp"

namespace vanet::sweep {

struct SweepSpec {
  std::vector<std::size_t> counts{10, 20, 30, 40, 50, 60, 70};
  std::vector<std::uint64_t> seeds{2, 4, 6, 8, 10};
  std::filesystem::path template_path;
  std::filesystem::path out_dir;
  int workers = 1;
  bool resume = false;
  bool keep_traces = false;
};

struct Job {
  std::size_t n_vehicles = 0;
  std::uint64_t seed = 0;
};

struct JobResult {
  Job job;
  bool ok = false;
  bool skipped = false;  // reused from a previous sweep
  std::string error;
  metrics::CounterSet counters;
  bool conserved = false;
  double mean_near_signals = 0.0;
  double wall_seconds = 0.0;
};

/// Worker count: VANETSIM_WORKERS when set to a positive integer, else
/// `requested`, else the OpenMP default.
int resolve_workers(int requested);

/// The template with `{n}` in routes/turns replaced and n_vehicles/seed set.
sim::ScenarioConfig scenario_for(const sim::ScenarioConfig& tmpl, std::size_t n, std::uint64_t seed);

using JobFn = std::function<JobResult(const Job&)>;

/// Runs every job on up to `workers` OpenMP threads; results keep job order.
std::vector<JobResult> run_jobs(const std::vector<Job>& jobs, const JobFn& fn, int workers);
/// Single-threaded reference for run_jobs.
std::vector<JobResult> run_jobs_serial(const std::vector<Job>& jobs, const JobFn& fn);

/// One simulation of the template for `job`. Never throws; failures land in the result.
JobResult run_one(const sim::ScenarioConfig& tmpl, const Job& job, const std::filesystem::path& trace_dir = {});

struct SweepOutcome {
  std::vector<JobResult> results;
  std::vector<metrics::SummaryRow> rows;
  bool all_ok = true;
};

/// Full density x seed sweep. Writes runs/n<N>_s<S>.csv, runs.csv and summary.csv
/// under spec.out_dir.
SweepOutcome run_sweep(const SweepSpec& spec, const std::function<void(const JobResult&)>& progress = {});

}  // namespace vanet::sweep
