#pragma once

#include <span>
#include <string>
#include <vector>

#include "vanet/metrics.hpp"

namespace vanet::report {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 100.0;
  std::vector<Series> series;
};

/// Static line chart. Output depends only on the input.
std::string render_svg(const Chart& chart);

/// ADR% against vehicle count.
Chart delivery_chart(std::span<const metrics::SummaryPoint> rows);
/// RD% and PL% against vehicle count on shared axes.
Chart drop_loss_chart(std::span<const metrics::SummaryPoint> rows);

}  // namespace vanet::report
