#include "vanet/packet.hpp"

namespace vanet {

const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::IFQ: return "IFQ";
    case DropReason::RET: return "RET";
    case DropReason::NRTE: return "NRTE";
    case DropReason::LNK: return "LNK";
    case DropReason::COL: return "COL";
    case DropReason::TTL: return "TTL";
    case DropReason::END: return "END";
  }
  return "?";
}

const char* Packet::type_name() const {
  struct V {
    const char* operator()(const DataPayload&) const { return "cbr"; }
    const char* operator()(const aodv::RreqMessage&) const { return "RREQ"; }
    const char* operator()(const aodv::RrepMessage&) const { return "RREP"; }
    const char* operator()(const aodv::RerrMessage&) const { return "RERR"; }
  };
  return std::visit(V{}, payload);
}

}  // namespace vanet
