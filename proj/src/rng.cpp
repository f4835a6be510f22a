#include "s2sim/rng.hpp"

#include <cmath>
#include <numbers>

namespace s2sim {

namespace {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    // splitmix64 finalizer
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (stream_id * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL)))
{
}

std::uint64_t RngStream::next_u64() noexcept
{
    const std::uint64_t n = counter_++;
    return mix64(key_ ^ mix64(n * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
}

double RngStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53;
}

namespace {
__extension__ using u128 = unsigned __int128;
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept
{
    // Lemire's multiply-shift with rejection
    auto x = next_u64();
    auto m = static_cast<u128>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<u128>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64U);
}

double RngStream::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

RngStream seeded_rng(std::uint64_t seed, std::uint64_t stream_id) noexcept
{
    return RngStream{seed, stream_id};
}

} // namespace s2sim
