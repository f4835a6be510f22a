#include <catch_amalgamated.hpp>

#include <sstream>

#include "oracles.hpp"
#include "s2sim/mac.hpp"
#include "s2sim/rng.hpp"

using namespace s2sim;

namespace {

Mat8 random_mat(RngStream &r, std::size_t rows, std::size_t cols)
{
    Mat8 m(rows, cols);
    for (auto &v : m.data) {
        v = static_cast<std::uint8_t>(r.below(256));
    }
    return m;
}

Tensor8 random_tensor(RngStream &r, std::size_t h, std::size_t w, std::size_t c)
{
    Tensor8 t(h, w, c);
    for (auto &v : t.data) {
        v = static_cast<std::uint8_t>(r.below(256));
    }
    return t;
}

Kernel8 random_kernel(RngStream &r, std::size_t rr, std::size_t s, std::size_t c, std::size_t f)
{
    Kernel8 k(rr, s, c, f);
    for (auto &v : k.data) {
        v = static_cast<std::uint8_t>(r.below(256));
    }
    return k;
}

} // namespace

TEST_CASE("identity and ramp matrices", "[mac][mm]")
{
    Mat8 a(4, 4);
    Mat8 eye(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        eye(i, i) = 1;
        for (std::size_t j = 0; j < 4; ++j) {
            a(i, j) = static_cast<std::uint8_t>(i * 4 + j);
        }
    }
    const auto c = mm_execute(a, eye);
    for (std::size_t i = 0; i < 16; ++i) {
        REQUIRE(c.data[i] == a.data[i]);
    }

    Mat8 r(3, 3);
    for (std::size_t i = 0; i < 9; ++i) {
        r.data[i] = static_cast<std::uint8_t>(i + 1);
    }
    const auto rr = mm_execute(r, r);
    const std::vector<std::uint32_t> want{30, 36, 42, 66, 81, 96, 102, 126, 150};
    REQUIRE(rr.data == want);

    Mat8 big_a(1, 4, 255);
    Mat8 big_b(4, 1, 255);
    REQUIRE(mm_execute(big_a, big_b).data[0] == 4U * 255U * 255U);
}

TEST_CASE("random matrix products match the naive oracle", "[mac][mm][property]")
{
    RngStream r(31, stream::dnn + 31);
    for (int i = 0; i < 200; ++i) {
        const auto m = 1 + r.below(40);
        const auto k = 1 + r.below(70);
        const auto n = 1 + r.below(40);
        const auto a = random_mat(r, m, k);
        const auto b = random_mat(r, k, n);
        REQUIRE(mm_execute(a, b) == oracle::matmul(a, b));
    }
}

TEST_CASE("random convolutions match the naive oracle and im2col", "[mac][conv][property]")
{
    RngStream r(32, stream::dnn + 32);
    for (int i = 0; i < 100; ++i) {
        const auto k = 1 + r.below(3) * 2;  // 1, 3 or 5
        const ConvParams cp{1 + r.below(2), r.below(k / 2 + 1)};
        const auto h = k + r.below(10);
        const auto w = k + r.below(10);
        const auto c = 1 + r.below(6);
        const auto f = 1 + r.below(20);
        const auto in = random_tensor(r, h, w, c);
        const auto ker = random_kernel(r, k, k, c, f);
        const auto got = conv_execute(in, ker, cp);
        REQUIRE(got == oracle::conv(in, ker, cp.stride, cp.pad));
        REQUIRE(got == conv_via_im2col(in, ker, cp));
    }
}

TEST_CASE("im2col layout", "[mac][conv]")
{
    Tensor8 in(3, 3, 1);
    for (std::size_t i = 0; i < 9; ++i) {
        in.data[i] = static_cast<std::uint8_t>(i + 1);
    }
    const auto cols = im2col(in, 2, 2, ConvParams{});
    REQUIRE(cols.rows == 4);
    REQUIRE(cols.cols == 4);
    const std::vector<std::uint8_t> want{1, 2, 4, 5, 2, 3, 5, 6, 4, 5, 7, 8, 5, 6, 8, 9};
    REQUIRE(cols.data == want);

    const auto padded = im2col(in, 3, 3, ConvParams{1, 1});
    REQUIRE(padded.rows == 9);
    REQUIRE(padded(0, 0) == 0);
    REQUIRE(padded(0, 4) == 1);
}

TEST_CASE("operand validation", "[mac][errors]")
{
    REQUIRE_THROWS_AS(mm_execute(Mat8(2, 3), Mat8(4, 2)), MacError);
    REQUIRE_THROWS_AS(mm_execute(Mat8(0, 0), Mat8(0, 0)), MacError);
    REQUIRE_THROWS_AS(mm_execute(Mat8(1, kMaxMacK + 1), Mat8(kMaxMacK + 1, 1)), MacError);
    REQUIRE_NOTHROW(mm_timing(1, kMaxMacK, 1));
    REQUIRE_THROWS_AS(mm_timing(1, kMaxMacK + 1, 1), MacError);
    REQUIRE_THROWS_AS(conv_execute(Tensor8(2, 2, 1), Kernel8(3, 3, 1, 1)), MacError);
    REQUIRE_THROWS_AS(conv_execute(Tensor8(4, 4, 2), Kernel8(3, 3, 1, 1)), MacError);
}

TEST_CASE("timing model", "[mac][timing]")
{
    const auto full = mm_timing(4, 64, 16);
    REQUIRE(full.macs == 4 * 64 * 16);
    REQUIRE(full.utilization == 1.0);
    REQUIRE(full.cycles >= full.compute_cycles);

    // Ragged tiles waste lanes.
    REQUIRE(mm_timing(5, 64, 17).utilization < 1.0);

    // More work never takes fewer cycles.
    std::int64_t prev = 0;
    for (std::size_t k = 1; k <= 256; k *= 2) {
        const auto t = mm_timing(16, k, 32);
        REQUIRE(t.cycles >= prev);
        prev = t.cycles;
    }

    const ConvShape one{8, 8, 32, 1, 1, 16, {}};
    const auto ct = conv_timing(one);
    REQUIRE(ct.utilization == 1.0);
    REQUIRE(ct.macs == 8 * 8 * 32 * 16);

    MacConfig slow;
    slow.transfer_penalty = true;
    REQUIRE(mm_timing(16, 64, 32, slow).cycles > mm_timing(16, 64, 32).cycles);
}

TEST_CASE("peak throughput and efficiency", "[mac]")
{
    REQUIRE(mac_peak_throughput(200'000'000).ops_per_s == Catch::Approx(25.6e9).epsilon(1e-12));
    REQUIRE(mac_peak_throughput(400'000'000).ops_per_s == Catch::Approx(51.2e9).epsilon(1e-12));
    REQUIRE(mac_peak_throughput(200'000'000).macs_per_s == Catch::Approx(12.8e9).epsilon(1e-12));
    REQUIRE(mac_efficiency_tops_per_w(MacEnergyParams{}) == Catch::Approx(1.47).epsilon(0.01));
}

TEST_CASE("result CSV", "[mac][csv]")
{
    Mat32 m(2, 2);
    m.data = {1, 2, 3, 4};
    std::ostringstream os;
    write_csv(os, m);
    REQUIRE(os.str().find("1,2") != std::string::npos);
    REQUIRE(os.str().find("3,4") != std::string::npos);
}
