#include "s2sim/trace.hpp"

namespace s2sim {

std::string_view to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::Spike:
        return "Spike";
    case TraceKind::PlChange:
        return "PlChange";
    case TraceKind::PacketSent:
        return "PacketSent";
    case TraceKind::PacketDelivered:
        return "PacketDelivered";
    case TraceKind::PacketDropped:
        return "PacketDropped";
    case TraceKind::EnergySample:
        return "EnergySample";
    case TraceKind::MacJobDone:
        return "MacJobDone";
    case TraceKind::RealtimeViolation:
        return "RealtimeViolation";
    }
    return "Unknown";
}

TraceWriter::TraceWriter(std::ostream *out) : out_(out)
{
    if (out_ != nullptr) {
        *out_ << header << '\n';
    }
}

void TraceWriter::emit(SimTime time, TraceKind kind, std::string source, std::string detail)
{
    if (!enabled()) {
        return;
    }
    buffer_.push_back(TraceEvent{time, kind, std::move(source), std::move(detail)});
}

void TraceWriter::flush()
{
    if (out_ != nullptr) {
        for (const auto &e : buffer_) {
            *out_ << e.time.tick << ',' << e.time.cycle_offset << ',' << to_string(e.kind) << ',' << e.source << ','
                  << e.detail << '\n';
        }
    }
    written_ += buffer_.size();
    if (keep_in_memory_) {
        retained_.insert(retained_.end(), std::make_move_iterator(buffer_.begin()),
                         std::make_move_iterator(buffer_.end()));
    }
    buffer_.clear();
}

} // namespace s2sim
