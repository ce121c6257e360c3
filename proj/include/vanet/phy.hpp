#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "vanet/geometry.hpp"

namespace vanet::phy {

inline constexpr double kSpeedOfLight = 3.0e8;

/// Radio parameters. Defaults reproduce a 250 m two-ray-ground range at 2.4 GHz.
struct PhyConfig {
  double pt = 0.2818;              // W
  double gt = 1.0;
  double gr = 1.0;
  double ht = 1.5;                 // m
  double hr = 1.5;                 // m
  double sys_loss = 1.0;
  double frequency = 2.412e9;      // Hz
  double rx_thresh = 3.65262e-10;  // W
  double cs_thresh = 0.9 * 3.65262e-10;

  double wavelength() const { return kSpeedOfLight / frequency; }
  double crossover_distance() const;
  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class Reception { receivable, sensed_only, below_noise };

double friis_power(const PhyConfig& cfg, double d);
double two_ray_power(const PhyConfig& cfg, double d);
/// Friis below the crossover distance, two-ray ground at and beyond it.
double propagation_power(const PhyConfig& cfg, double d);
Reception classify_reception(const PhyConfig& cfg, double rx_power);
/// Largest distance still at or above rx_thresh, bisected to 0.01 m.
double max_range(const PhyConfig& cfg);

/// Received power at every receiver for one transmitter. Distances are floored
/// at `min_distance` so co-located nodes stay finite. Parallel over receivers
/// when the batch is large enough.
void receive_powers(const PhyConfig& cfg, Point2D tx, std::span<const Point2D> rx,
                    std::span<double> out, double min_distance = 1.0);
/// Single-threaded reference for receive_powers.
void receive_powers_serial(const PhyConfig& cfg, Point2D tx, std::span<const Point2D> rx,
                           std::span<double> out, double min_distance = 1.0);

/// Batch size at or above which receive_powers uses OpenMP.
inline constexpr std::size_t kParallelThreshold = 4096;

}  // namespace vanet::phy
