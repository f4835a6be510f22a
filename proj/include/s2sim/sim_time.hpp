#ifndef S2SIM_SIM_TIME_HPP
#define S2SIM_SIM_TIME_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace s2sim {

// NoC, router and QPE logic run in a fixed 400 MHz domain.
constexpr std::int64_t kNocFrequencyHz = 400'000'000;

struct ClockDomain
{
    std::string id;
    std::int64_t frequency_hz{kNocFrequencyHz};

    // Number of cycles of this domain in one system tick of t_sys seconds.
    std::int64_t cycles_per_tick(double t_sys_s) const;
};

// Two-level time: global 1 ms tick plus a domain-local cycle offset.
struct SimTime
{
    std::int64_t tick{0};
    std::int64_t cycle_offset{0};

    auto operator<=>(const SimTime &) const = default;

    // Splits an absolute cycle count of a domain into (tick, offset).
    static SimTime from_cycles(std::int64_t absolute_cycle, std::int64_t cycles_per_tick);
    std::int64_t absolute_cycles(std::int64_t cycles_per_tick) const { return tick * cycles_per_tick + cycle_offset; }
};

} // namespace s2sim

#endif
