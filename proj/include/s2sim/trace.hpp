// trace.hpp - timestamped simulation records and the CSV trace writer
#ifndef S2SIM_TRACE_HPP
#define S2SIM_TRACE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "s2sim/sim_time.hpp"

namespace s2sim {

enum class TraceKind : std::uint8_t
{
    Spike,
    PlChange,
    PacketSent,
    PacketDelivered,
    PacketDropped,
    EnergySample,
    MacJobDone,
    RealtimeViolation,
};

std::string_view to_string(TraceKind kind);

struct TraceEvent
{
    SimTime time;
    TraceKind kind{TraceKind::Spike};
    std::string source;
    std::string detail;
};

// Buffers events and writes them as CSV rows on flush().
// Header: time_ms,cycle,kind,source,detail
class TraceWriter
{
public:
    TraceWriter() = default;
    explicit TraceWriter(std::ostream *out);

    bool enabled() const noexcept { return out_ != nullptr || keep_in_memory_; }
    void keep_in_memory(bool keep) { keep_in_memory_ = keep; }

    void emit(SimTime time, TraceKind kind, std::string source, std::string detail);
    void flush();

    std::uint64_t events_written() const noexcept { return written_; }
    const std::vector<TraceEvent> &retained() const noexcept { return retained_; }

    static constexpr std::string_view header = "time_ms,cycle,kind,source,detail";

private:
    std::ostream *out_{nullptr};
    bool keep_in_memory_{false};
    std::vector<TraceEvent> buffer_;
    std::vector<TraceEvent> retained_;
    std::uint64_t written_{0};
};

} // namespace s2sim

#endif
