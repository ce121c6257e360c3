#include "vanet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vanet::report {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 30, kTop = 50, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  double x_min = 1e300, x_max = -1e300;
  std::size_t points = 0;
  for (const auto& s : chart.series) {
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("render_svg: no data points");
  if (x_max == x_min) {
    x_min -= 1;
    x_max += 1;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - chart.y_min) / (chart.y_max - chart.y_min) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(chart.title) +
       "</text>\n";

  // grid and y ticks every 10 %
  const double y_step = (chart.y_max - chart.y_min) / 10.0;
  for (int i = 0; i <= 10; ++i) {
    const double v = chart.y_min + i * y_step;
    o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
         num(sy(v)) + "\" stroke=\"#dddddd\"/>\n";
    o += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(v) + 4) + "\" text-anchor=\"end\">" + num(v) + "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& s : chart.series) {
    for (auto [x, y] : s.points) {
      if (std::isfinite(x)) xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    o += "<line x1=\"" + num(sx(x)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx(x)) + "\" y2=\"" +
         num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", x);
    o += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(kTop + ph + 20) + "\" text-anchor=\"middle\">" + label +
         "</text>\n";
  }
  o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(kTop + ph) +
       "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
       num(kTop + ph) + "\" stroke=\"black\"/>\n";
  o += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">" +
       escape(chart.x_label) + "</text>\n";
  o += "<text x=\"18\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : chart.series) {
    std::string pts;
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(sx(x)) + "," + num(sy(y));
    }
    o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      o += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
    }
    o += "<line x1=\"" + num(kLeft + pw - 120) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(kLeft + pw - 100) +
         "\" y2=\"" + num(legend_y) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(kLeft + pw - 95) + "\" y=\"" + num(legend_y + 4) + "\">" + escape(s.label) + "</text>\n";
    legend_y += 16;
  }
  o += "</svg>\n";
  return o;
}

Chart delivery_chart(std::span<const metrics::SummaryPoint> rows) {
  if (rows.empty()) throw std::invalid_argument("delivery_chart: empty summary");
  Chart c{"Vehicles vs average delivery ratio", "Number of vehicles", "ADR %", 0, 100, {}};
  Series s{"ADR %", "#1f77b4", {}};
  for (const auto& r : rows) s.points.emplace_back(static_cast<double>(r.n_vehicles), r.adr_pct);
  c.series.push_back(std::move(s));
  return c;
}

Chart drop_loss_chart(std::span<const metrics::SummaryPoint> rows) {
  if (rows.empty()) throw std::invalid_argument("drop_loss_chart: empty summary");
  Chart c{"Vehicles vs router drop and packet loss", "Number of vehicles", "Percent", 0, 100, {}};
  Series rd{"Router drop %", "#d62728", {}};
  Series pl{"Packet loss %", "#2ca02c", {}};
  for (const auto& r : rows) {
    rd.points.emplace_back(static_cast<double>(r.n_vehicles), r.rd_pct);
    pl.points.emplace_back(static_cast<double>(r.n_vehicles), r.pl_pct);
  }
  c.series.push_back(std::move(rd));
  c.series.push_back(std::move(pl));
  return c;
}

}  // namespace vanet::report
