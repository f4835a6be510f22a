#include "s2sim/sim_time.hpp"

#include <cmath>
#include <stdexcept>

namespace s2sim {

std::int64_t ClockDomain::cycles_per_tick(double t_sys_s) const
{
    if (frequency_hz <= 0 || t_sys_s <= 0.0) {
        throw std::invalid_argument("clock domain " + id + ": non-positive frequency or tick length");
    }
    return std::llround(static_cast<double>(frequency_hz) * t_sys_s);
}

SimTime SimTime::from_cycles(std::int64_t absolute_cycle, std::int64_t cycles_per_tick)
{
    if (absolute_cycle < 0 || cycles_per_tick <= 0) {
        throw std::invalid_argument("SimTime::from_cycles: negative cycle or empty tick");
    }
    return SimTime{absolute_cycle / cycles_per_tick, absolute_cycle % cycles_per_tick};
}

} // namespace s2sim
