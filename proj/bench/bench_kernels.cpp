// Parallel kernels against their single-threaded references.

#include <benchmark/benchmark.h>

#include <random>

#include "vanet/config.hpp"
#include "vanet/phy.hpp"
#include "vanet/sweep.hpp"

using namespace vanet;

namespace {

std::vector<Point2D> scatter(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1200.0);
  std::vector<Point2D> p(n);
  for (auto& x : p) x = {u(rng), u(rng)};
  return p;
}

void BM_receive_powers(benchmark::State& state) {
  const phy::PhyConfig cfg;
  const auto rx = scatter(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(rx.size());
  for (auto _ : state) {
    phy::receive_powers(cfg, {600, 600}, rx, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_receive_powers_serial(benchmark::State& state) {
  const phy::PhyConfig cfg;
  const auto rx = scatter(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(rx.size());
  for (auto _ : state) {
    phy::receive_powers_serial(cfg, {600, 600}, rx, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_receive_powers)->RangeMultiplier(8)->Range(64, 1 << 18);
BENCHMARK(BM_receive_powers_serial)->RangeMultiplier(8)->Range(64, 1 << 18);

const sim::ScenarioConfig& grid_template() {
  static const sim::ScenarioConfig t = config::load(std::string(VANET_DATA) + "/grid3x3/scenario.cfg");
  return t;
}

std::vector<sweep::Job> small_jobs() {
  std::vector<sweep::Job> jobs;
  for (std::uint64_t seed : {2, 4, 6, 8}) {
    jobs.push_back({10, seed});
    jobs.push_back({20, seed});
  }
  return jobs;
}

void BM_run_jobs(benchmark::State& state) {
  const auto jobs = small_jobs();
  const sweep::JobFn fn = [](const sweep::Job& j) { return sweep::run_one(grid_template(), j); };
  const int workers = sweep::resolve_workers(0);
  for (auto _ : state) benchmark::DoNotOptimize(sweep::run_jobs(jobs, fn, workers));
  state.counters["workers"] = workers;
}

void BM_run_jobs_serial(benchmark::State& state) {
  const auto jobs = small_jobs();
  const sweep::JobFn fn = [](const sweep::Job& j) { return sweep::run_one(grid_template(), j); };
  for (auto _ : state) benchmark::DoNotOptimize(sweep::run_jobs_serial(jobs, fn));
}

BENCHMARK(BM_run_jobs)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_run_jobs_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
