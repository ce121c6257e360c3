#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "vanet/sim_time.hpp"

namespace vanet {

using NodeId = std::uint32_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kBroadcast = 0xFFFFFFFFu;

/// Why a packet left the network without reaching its destination. END marks
/// packets still held by a node when the run stops or the node leaves.
enum class DropReason { IFQ, RET, NRTE, LNK, COL, TTL, END };

const char* to_string(DropReason r);

// Airtime sizes in bytes.
inline constexpr std::uint32_t kRreqBytes = 24;
inline constexpr std::uint32_t kRrepBytes = 20;
inline constexpr std::uint32_t kRerrBaseBytes = 4;
inline constexpr std::uint32_t kRerrPerDestBytes = 8;
inline constexpr std::uint32_t kUdpHeaderBytes = 8;
inline constexpr std::uint32_t kIpHeaderBytes = 20;
inline constexpr std::uint32_t kAckBytes = 14;
inline constexpr std::uint8_t kDefaultIpTtl = 32;

namespace aodv {

struct RreqMessage {
  NodeId orig = 0;
  std::uint32_t orig_seq = 0;
  NodeId dest = 0;
  std::uint32_t dest_seq = 0;
  bool dest_seq_known = false;
  std::uint32_t rreq_id = 0;
  std::uint8_t hop_count = 0;
  std::uint8_t ttl = 1;
};

struct RrepMessage {
  NodeId orig = 0;
  NodeId dest = 0;
  std::uint32_t dest_seq = 0;
  std::uint8_t hop_count = 0;
  double lifetime = 0.0;  // seconds
};

struct RerrMessage {
  std::vector<std::pair<NodeId, std::uint32_t>> unreachable;
};

}  // namespace aodv

struct DataPayload {
  std::uint32_t flow = 0;
  std::uint32_t seq = 0;
};

using Payload = std::variant<DataPayload, aodv::RreqMessage, aodv::RrepMessage, aodv::RerrMessage>;

struct Packet {
  PacketId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint8_t ttl = kDefaultIpTtl;
  std::uint32_t size_bytes = 0;
  SimTime created;
  Payload payload;

  bool is_data() const { return std::holds_alternative<DataPayload>(payload); }
  /// "cbr", "RREQ", "RREP" or "RERR".
  const char* type_name() const;
};

}  // namespace vanet
