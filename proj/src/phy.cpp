#include "vanet/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace vanet::phy {

namespace {

void require_positive_distance(double d) {
  if (!(d > 0)) throw std::invalid_argument("distance must be > 0, got " + std::to_string(d));
}

inline double power_at(double d, double dc, double friis_k, double two_ray_k) {
  if (d < dc) return friis_k / (d * d);
  const double d2 = d * d;
  return two_ray_k / (d2 * d2);
}

}  // namespace

double PhyConfig::crossover_distance() const {
  return 4.0 * std::numbers::pi * ht * hr / wavelength();
}

void PhyConfig::validate() const {
  if (!(pt > 0 && gt > 0 && gr > 0 && ht > 0 && hr > 0 && frequency > 0 && rx_thresh > 0 && cs_thresh > 0)) {
    throw std::invalid_argument("phy parameters must be positive");
  }
  if (!(sys_loss >= 1.0)) throw std::invalid_argument("phy.sys_loss must be >= 1");
  if (!(cs_thresh < rx_thresh)) throw std::invalid_argument("phy.cs_thresh_w must be below phy.rx_thresh_w");
}

double friis_power(const PhyConfig& cfg, double d) {
  require_positive_distance(d);
  const double lambda = cfg.wavelength();
  const double four_pi = 4.0 * std::numbers::pi;
  return cfg.pt * cfg.gt * cfg.gr * lambda * lambda / (four_pi * four_pi * d * d * cfg.sys_loss);
}

double two_ray_power(const PhyConfig& cfg, double d) {
  require_positive_distance(d);
  return cfg.pt * cfg.gt * cfg.gr * cfg.ht * cfg.ht * cfg.hr * cfg.hr / (d * d * d * d * cfg.sys_loss);
}

double propagation_power(const PhyConfig& cfg, double d) {
  require_positive_distance(d);
  return d < cfg.crossover_distance() ? friis_power(cfg, d) : two_ray_power(cfg, d);
}

Reception classify_reception(const PhyConfig& cfg, double rx_power) {
  if (rx_power >= cfg.rx_thresh) return Reception::receivable;
  if (rx_power >= cfg.cs_thresh) return Reception::sensed_only;
  return Reception::below_noise;
}

double max_range(const PhyConfig& cfg) {
  double lo = 1e-3;
  if (propagation_power(cfg, lo) < cfg.rx_thresh) return 0.0;
  double hi = 1.0;
  while (propagation_power(cfg, hi) >= cfg.rx_thresh) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    if (propagation_power(cfg, mid) >= cfg.rx_thresh) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void receive_powers_serial(const PhyConfig& cfg, Point2D tx, std::span<const Point2D> rx,
                           std::span<double> out, double min_distance) {
  const double dc = cfg.crossover_distance();
  const double lambda = cfg.wavelength();
  const double four_pi = 4.0 * std::numbers::pi;
  const double friis_k = cfg.pt * cfg.gt * cfg.gr * lambda * lambda / (four_pi * four_pi * cfg.sys_loss);
  const double two_ray_k = cfg.pt * cfg.gt * cfg.gr * cfg.ht * cfg.ht * cfg.hr * cfg.hr / cfg.sys_loss;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double d = std::max(distance(tx, rx[i]), min_distance);
    out[i] = power_at(d, dc, friis_k, two_ray_k);
  }
}

void receive_powers(const PhyConfig& cfg, Point2D tx, std::span<const Point2D> rx,
                    std::span<double> out, double min_distance) {
  if (rx.size() < kParallelThreshold) {
    receive_powers_serial(cfg, tx, rx, out, min_distance);
    return;
  }
  const double dc = cfg.crossover_distance();
  const double lambda = cfg.wavelength();
  const double four_pi = 4.0 * std::numbers::pi;
  const double friis_k = cfg.pt * cfg.gt * cfg.gr * lambda * lambda / (four_pi * four_pi * cfg.sys_loss);
  const double two_ray_k = cfg.pt * cfg.gt * cfg.gr * cfg.ht * cfg.ht * cfg.hr * cfg.hr / cfg.sys_loss;
  const auto n = static_cast<std::ptrdiff_t>(rx.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double d = std::max(distance(tx, rx[k]), min_distance);
    out[k] = power_at(d, dc, friis_k, two_ray_k);
  }
}

}  // namespace vanet::phy
