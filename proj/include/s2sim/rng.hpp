// rng.hpp - counter-based deterministic random streams
//
// Every entity that needs randomness owns an RngStream keyed by
// (seed, stream_id). The n-th draw of a stream is a pure function of
// (seed, stream_id, n), so results never depend on draw interleaving
// between entities or on the host standard library.
#ifndef S2SIM_RNG_HPP
#define S2SIM_RNG_HPP

#include <cstdint>
#include <limits>

namespace s2sim {

// Well-known stream ids. Per-PE streams are offset by the PE index.
namespace stream {
constexpr std::uint64_t build = 0x1000;
constexpr std::uint64_t stimulus = 0x2000;
constexpr std::uint64_t nef = 0x3000;
constexpr std::uint64_t dnn = 0x4000;
constexpr std::uint64_t traffic = 0x5000;
constexpr std::uint64_t pe_noise = 0x10000;
} // namespace stream

class RngStream
{
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    // Unbiased integer on [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;
    // Box-Muller; the spare variate is cached.
    double normal() noexcept;
    double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_{0};
    double spare_{0.0};
    bool has_spare_{false};
};

RngStream seeded_rng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

} // namespace s2sim

#endif
