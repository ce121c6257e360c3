#include "vanet/mac.hpp"

#include <cmath>
#include <stdexcept>

namespace vanet::mac {

void MacConfig::validate() const {
  if (slot.ns() <= 0 || sifs.ns() <= 0 || difs.ns() <= 0) throw std::invalid_argument("mac timings must be positive");
  if (cw_min < 1 || cw_max < cw_min) throw std::invalid_argument("mac.cw_min/cw_max out of range");
  if (retry_limit < 1) throw std::invalid_argument("mac.retry_limit must be >= 1");
  if (!(data_rate > 0 && basic_rate > 0)) throw std::invalid_argument("mac rates must be positive");
  if (ifq_len < 1) throw std::invalid_argument("mac.ifq_len must be >= 1");
}

EnqueueResult IfQueue::enqueue(Frame frame) {
  if (size() >= capacity_) return EnqueueResult::dropped;
  (frame.band == Band::control ? control_ : data_).push_back(std::move(frame));
  return EnqueueResult::accepted;
}

std::optional<Frame> IfQueue::dequeue() {
  auto& q = control_.empty() ? data_ : control_;
  if (q.empty()) return std::nullopt;
  Frame f = std::move(q.front());
  q.pop_front();
  return f;
}

int backoff_draw(int cw, std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(0, cw)(rng);
}

int next_cw(int cw, const MacConfig& cfg) {
  return std::min(2 * cw + 1, cfg.cw_max);
}

SimTime airtime(std::uint32_t bytes, double rate_bps) {
  return SimTime::from_ns(std::llround(static_cast<double>(bytes) * 8.0 / rate_bps * 1e9));
}

bool captures(double power, double interference, const phy::PhyConfig& cfg) {
  return power >= cfg.rx_thresh && power >= kCaptureRatio * interference;
}

std::vector<FrameOutcome> resolve_receptions(std::span<const Transmission> overlapping, NodeId receiver,
                                             Point2D receiver_position, const phy::PhyConfig& cfg) {
  std::vector<double> power(overlapping.size());
  double sensed_total = 0.0;
  for (std::size_t i = 0; i < overlapping.size(); ++i) {
    const auto& t = overlapping[i];
    phy::PhyConfig c = cfg;
    c.pt = t.power;
    const double d = std::max(distance(t.sender_position, receiver_position), 1.0);
    power[i] = phy::propagation_power(c, d);
    if (power[i] >= cfg.cs_thresh) sensed_total += power[i];
  }
  std::vector<FrameOutcome> out;
  out.reserve(overlapping.size());
  for (std::size_t i = 0; i < overlapping.size(); ++i) {
    FrameOutcome o{overlapping[i].frame, receiver, Verdict::below_threshold};
    if (power[i] >= cfg.rx_thresh) {
      const double others = sensed_total - power[i];
      o.verdict = captures(power[i], others, cfg) ? Verdict::delivered : Verdict::collided;
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace vanet::mac
