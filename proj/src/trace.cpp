#include "vanet/trace.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

namespace vanet::trace {

const char* to_string(Layer l) {
  switch (l) {
    case Layer::AGT: return "AGT";
    case Layer::RTR: return "RTR";
    case Layer::MAC: return "MAC";
    case Layer::IFQ: return "IFQ";
  }
  return "?";
}

std::string format_time(SimTime t) {
  const std::int64_t ns = t.ns();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%09lld", ns < 0 ? "-" : "", static_cast<long long>(std::llabs(ns) / 1000000000),
                static_cast<long long>(std::llabs(ns) % 1000000000));
  return buf;
}

void append(std::string& out, SimTime t, Event ev, NodeId node, Layer layer, const Packet& p,
            std::optional<DropReason> reason) {
  char buf[160];
  const int n = std::snprintf(buf, sizeof buf, "%s %c %u %s %llu %s %u%s%s\n", format_time(t).c_str(),
                              static_cast<char>(ev), node, to_string(layer), static_cast<unsigned long long>(p.id),
                              p.type_name(), p.size_bytes, reason ? " " : "", reason ? to_string(*reason) : "");
  out.append(buf, static_cast<std::size_t>(n));
}

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw TraceError("trace line " + std::to_string(line_no) + ": " + what);
}

template <class T>
T parse_int(std::string_view s, std::size_t line_no, const char* field) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) fail(line_no, std::string("bad ") + field + " '" + std::string(s) + "'");
  return v;
}

SimTime parse_time(std::string_view s, std::size_t line_no) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return SimTime::from_ns(parse_int<std::int64_t>(s, line_no, "time") * 1000000000);
  const auto whole = parse_int<std::int64_t>(s.substr(0, dot), line_no, "time");
  auto frac = s.substr(dot + 1);
  if (frac.empty() || frac.size() > 9) fail(line_no, "bad time '" + std::string(s) + "'");
  std::int64_t f = parse_int<std::int64_t>(frac, line_no, "time");
  for (std::size_t i = frac.size(); i < 9; ++i) f *= 10;
  return SimTime::from_ns(whole * 1000000000 + f);
}

}  // namespace

Record parse_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> tok;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) tok.push_back(line.substr(i, j - i));
    i = j;
  }
  if (tok.size() != 7 && tok.size() != 8) fail(line_no, "expected 7 or 8 fields, got " + std::to_string(tok.size()));
  Record r;
  r.time = parse_time(tok[0], line_no);
  if (tok[1].size() != 1 || std::string_view("srdf").find(tok[1][0]) == std::string_view::npos) {
    fail(line_no, "bad event '" + std::string(tok[1]) + "'");
  }
  r.event = static_cast<Event>(tok[1][0]);
  r.node = parse_int<NodeId>(tok[2], line_no, "node");
  if (tok[3] == "AGT") r.layer = Layer::AGT;
  else if (tok[3] == "RTR") r.layer = Layer::RTR;
  else if (tok[3] == "MAC") r.layer = Layer::MAC;
  else if (tok[3] == "IFQ") r.layer = Layer::IFQ;
  else fail(line_no, "bad layer '" + std::string(tok[3]) + "'");
  r.packet = parse_int<PacketId>(tok[4], line_no, "packet id");
  r.type = std::string(tok[5]);
  r.size = parse_int<std::uint32_t>(tok[6], line_no, "size");
  if (tok.size() == 8) {
    static constexpr DropReason all[] = {DropReason::IFQ, DropReason::RET, DropReason::NRTE, DropReason::LNK,
                                         DropReason::COL, DropReason::TTL, DropReason::END};
    for (auto d : all) {
      if (tok[7] == to_string(d)) r.reason = d;
    }
    if (!r.reason) fail(line_no, "bad drop reason '" + std::string(tok[7]) + "'");
  }
  if (r.event == Event::drop && !r.reason) fail(line_no, "drop without reason");
  if (r.event != Event::drop && r.reason) fail(line_no, "reason on a non-drop event");
  return r;
}

}  // namespace vanet::trace
