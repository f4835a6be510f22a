#include <catch_amalgamated.hpp>

#include <sstream>

#include "s2sim/bench/dnn.hpp"

using namespace s2sim;

TEST_CASE("reference layers: speedup ranges and direction", "[dnn]")
{
    const auto layers = reference_layers();
    REQUIRE(layers.size() == 4);
    double min_conv = 1e300;
    double max_mm = 0.0;
    for (const auto &l : layers) {
        const auto r = run_dnn_layer(l, DnnRunParams{}, 1);
        REQUIRE(r.matches_oracle);
        REQUIRE(r.matches_im2col);
        REQUIRE(r.accel_cycles > 0);
        if (l.mode == MacMode::CONV) {
            REQUIRE(r.speedup >= 116.0);
            REQUIRE(r.speedup <= 610.0);
            min_conv = std::min(min_conv, r.speedup);
        } else {
            REQUIRE(r.speedup >= 9.0);
            REQUIRE(r.speedup <= 28.0);
            max_mm = std::max(max_mm, r.speedup);
        }
    }
    REQUIRE(min_conv > max_mm);
}

TEST_CASE("1x1 convolution with 16 filters fully uses the array", "[dnn][mac]")
{
    DnnLayerSpec l;
    l.name = "pw";
    l.mode = MacMode::CONV;
    l.h = 8;
    l.w = 8;
    l.c = 32;
    l.r = 1;
    l.s = 1;
    l.f = 16;
    const auto r = run_dnn_layer(l, DnnRunParams{}, 2);
    REQUIRE(r.utilization == 1.0);
    REQUIRE(r.matches_oracle);

    DnnLayerSpec odd = l;
    odd.f = 17;
    REQUIRE(run_dnn_layer(odd, DnnRunParams{}, 2).utilization < 1.0);
}

TEST_CASE("SRAM budget", "[dnn][errors]")
{
    DnnLayerSpec l;
    l.name = "big";
    l.mode = MacMode::MM;
    l.m = 256;
    l.k = 512;
    l.n = 256;
    REQUIRE(sram_bytes(l) == 256 * 512 + 512 * 256 + 4 * 256 * 256);
    REQUIRE_THROWS_AS(check_sram(l), MacError);
    try {
        check_sram(l);
    } catch (const MacError &e) {
        REQUIRE(std::string(e.what()).find("split") != std::string::npos);
    }
    REQUIRE_THROWS_AS(run_dnn_layer(l, DnnRunParams{}, 1), MacError);
    for (const auto &ref : reference_layers()) {
        REQUIRE(sram_bytes(ref) <= kPeSramBytes);
    }
}

TEST_CASE("scalar baseline scales with work", "[dnn]")
{
    DnnLayerSpec l;
    l.name = "fc";
    l.m = 1;
    l.k = 100;
    l.n = 10;
    const auto a = run_dnn_layer(l, DnnRunParams{}, 3);
    l.k = 200;
    const auto b = run_dnn_layer(l, DnnRunParams{}, 3);
    REQUIRE(a.macs == 1000);
    REQUIRE(b.scalar_cycles > a.scalar_cycles);
    REQUIRE(a.scalar_cycles == static_cast<std::int64_t>(std::ceil(1.2 * 1000.0 + 16.0 * 10.0)));
}

TEST_CASE("results CSV header", "[dnn][csv]")
{
    std::ostringstream os;
    write_dnn_csv(os, {run_dnn_layer(reference_layers()[0], DnnRunParams{}, 1)});
    REQUIRE(os.str().rfind("layer,mode,accel_cycles,scalar_cycles,speedup,gops\n", 0) == 0);
}
