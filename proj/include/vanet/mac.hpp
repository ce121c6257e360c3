#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vanet/geometry.hpp"
#include "vanet/packet.hpp"
#include "vanet/phy.hpp"
#include "vanet/sim_time.hpp"

namespace vanet::mac {

struct MacConfig {
  SimTime slot = SimTime::from_us(20);
  SimTime sifs = SimTime::from_us(10);
  SimTime difs = SimTime::from_us(50);
  int cw_min = 31;
  int cw_max = 1023;
  int retry_limit = 7;
  double data_rate = 2e6;   // bit/s
  double basic_rate = 1e6;  // bit/s
  std::size_t ifq_len = 50;

  void validate() const;
};

/// Power ratio a frame needs over the summed interference to be decoded (10 dB).
inline constexpr double kCaptureRatio = 10.0;

enum class Band { control, data };

struct Frame {
  Packet packet;
  NodeId next_hop = kBroadcast;
  Band band = Band::data;
};

enum class EnqueueResult { accepted, dropped };

/// Drop-tail interface queue with a routing-control band served before data.
class IfQueue {
 public:
  explicit IfQueue(std::size_t capacity = 50) : capacity_(capacity) {}

  EnqueueResult enqueue(Frame frame);
  std::optional<Frame> dequeue();

  std::size_t size() const { return control_.size() + data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size() == 0; }

  /// Removes and returns every queued frame for which `pred` holds, FIFO order
  /// within each band, control band first.
  template <class Pred>
  std::vector<Frame> remove_if(Pred pred) {
    std::vector<Frame> removed;
    for (auto* band : {&control_, &data_}) {
      std::deque<Frame> keep;
      for (auto& f : *band) {
        if (pred(f)) {
          removed.push_back(std::move(f));
        } else {
          keep.push_back(std::move(f));
        }
      }
      band->swap(keep);
    }
    return removed;
  }

 private:
  std::size_t capacity_;
  std::deque<Frame> control_;
  std::deque<Frame> data_;
};

/// Uniform slot count in [0, cw].
int backoff_draw(int cw, std::mt19937_64& rng);
/// Contention window after a failed unicast attempt.
int next_cw(int cw, const MacConfig& cfg);

SimTime airtime(std::uint32_t bytes, double rate_bps);

/// A frame on the air as seen by the reception model.
struct Transmission {
  std::uint64_t frame = 0;
  NodeId sender = 0;
  Point2D sender_position;
  SimTime start;
  SimTime duration;
  double power = 0.0;  // transmit power, W
};

enum class Verdict { delivered, collided, below_threshold };

struct FrameOutcome {
  std::uint64_t frame = 0;
  NodeId receiver = 0;
  Verdict verdict = Verdict::below_threshold;
};

/// Decodable iff at or above rx_thresh and at least kCaptureRatio times the
/// summed power of the other overlapping frames.
bool captures(double power, double interference, const phy::PhyConfig& cfg);

/// Verdicts for a set of mutually overlapping frames at one receiver. Only
/// signals at or above cs_thresh count as interference.
std::vector<FrameOutcome> resolve_receptions(std::span<const Transmission> overlapping, NodeId receiver,
                                             Point2D receiver_position, const phy::PhyConfig& cfg);

}  // namespace vanet::mac
