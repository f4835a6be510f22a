#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "s2sim/rng.hpp"
#include "s2sim/sim_time.hpp"

using namespace s2sim;

TEST_CASE("same seed and stream reproduce the sequence", "[rng]")
{
    RngStream a(42, stream::build);
    RngStream b(42, stream::build);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("different streams diverge", "[rng]")
{
    RngStream a(42, stream::build);
    RngStream b(42, stream::stimulus);
    int equal = 0;
    for (int i = 0; i < 100; ++i) {
        equal += a.next_u64() == b.next_u64() ? 1 : 0;
    }
    REQUIRE(equal == 0);
}

TEST_CASE("draws depend only on the counter", "[rng]")
{
    RngStream a(7, 3);
    RngStream noise(7, 4);
    std::array<std::uint64_t, 8> first{};
    for (auto &v : first) {
        v = a.next_u64();
        noise.next_u64();
    }
    RngStream fresh(7, 3);
    for (auto v : first) {
        REQUIRE(fresh.next_u64() == v);
    }
    REQUIRE(fresh.counter() == 8);
}

TEST_CASE("uniform moments", "[rng][stats]")
{
    RngStream r(1, 99);
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    // 4 sigma of the sample mean
    REQUIRE(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    REQUIRE(std::abs(var - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("normal mean within CLT bound", "[rng][stats]")
{
    RngStream r(5, stream::pe_noise);
    const int n = 1000000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    REQUIRE(std::abs(sum / n) < 0.01);
    REQUIRE(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("bounded integers are unbiased", "[rng][stats]")
{
    RngStream r(11, 12);
    constexpr int bins = 10;
    constexpr int n = 100000;
    std::array<int, bins> counts{};
    for (int i = 0; i < n; ++i) {
        const auto v = r.below(bins);
        REQUIRE(v < bins);
        ++counts[v];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 9 degrees of freedom, p = 0.001
    REQUIRE(chi2 < 27.88);
}

TEST_CASE("tick and cycle split", "[time]")
{
    const ClockDomain noc{"noc", kNocFrequencyHz};
    REQUIRE(noc.cycles_per_tick(1e-3) == 400000);
    const auto t = SimTime::from_cycles(1'200'005, 400000);
    REQUIRE(t.tick == 3);
    REQUIRE(t.cycle_offset == 5);
    REQUIRE(t.absolute_cycles(400000) == 1'200'005);
    REQUIRE(SimTime{1, 10} < SimTime{2, 0});
}
