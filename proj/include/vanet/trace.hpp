#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vanet/packet.hpp"
#include "vanet/sim_time.hpp"

namespace vanet::trace {

enum class Event : char { send = 's', recv = 'r', drop = 'd', forward = 'f' };
enum class Layer { AGT, RTR, MAC, IFQ };

const char* to_string(Layer l);

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One event trace line:
/// `<time> <s|r|d|f> <node> <AGT|RTR|MAC|IFQ> <pkt_id> <pkt_type> <size_bytes> [drop_reason]`
struct Record {
  SimTime time;
  Event event = Event::send;
  NodeId node = 0;
  Layer layer = Layer::AGT;
  PacketId packet = 0;
  std::string type;
  std::uint32_t size = 0;
  std::optional<DropReason> reason;
};

/// Seconds with nine decimals, printed from the integer clock.
std::string format_time(SimTime t);

void append(std::string& out, SimTime t, Event ev, NodeId node, Layer layer, const Packet& p,
            std::optional<DropReason> reason = std::nullopt);

/// Throws TraceError naming `line_no` when the line is malformed.
Record parse_line(std::string_view line, std::size_t line_no);

}  // namespace vanet::trace
