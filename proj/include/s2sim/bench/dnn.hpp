// dnn.hpp - single DNN layers on the MAC array vs a scalar ARM baseline
#ifndef S2SIM_BENCH_DNN_HPP
#define S2SIM_BENCH_DNN_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "s2sim/mac.hpp"

namespace s2sim {

enum class MacMode : std::uint8_t
{
    MM,
    CONV,
};

std::string_view to_string(MacMode m);

struct DnnLayerSpec
{
    std::string name;
    MacMode mode{MacMode::MM};
    // MM: A is m x k, B is k x n
    std::size_t m{1}, k{1}, n{1};
    // CONV: ifmap h x w x c, kernel r x s x c x f
    std::size_t h{1}, w{1}, c{1}, r{1}, s{1}, f{1};
    ConvParams conv;
    int repeat{1};
};

constexpr std::int64_t kPeSramBytes = 128 * 1024;

// Operand bytes plus 4 bytes per output. Throws MacError with a split hint
// when the layer does not fit one PE's SRAM.
std::int64_t sram_bytes(const DnnLayerSpec &l);
void check_sram(const DnnLayerSpec &l);

// Software path on the ARM core: cycles = per-MAC cost * MACs + per-output
// cost * outputs. The per-MAC costs differ by mode because the convolution
// loop nest carries more index arithmetic per MAC than a dot product.
struct ScalarBaseline
{
    double conv_cycles_per_mac{6.0};
    double mm_cycles_per_mac{1.2};
    double cycles_per_output{16.0};
};

struct DnnLayerResult
{
    std::string name;
    MacMode mode{MacMode::MM};
    std::int64_t macs{0};
    std::int64_t accel_cycles{0};
    std::int64_t scalar_cycles{0};
    double speedup{0.0};
    double gops{0.0};
    double utilization{0.0};
    double accel_energy_j{0.0};
    double accel_power_mw{0.0};
    bool matches_oracle{false};
    bool matches_im2col{true};
};

struct DnnRunParams
{
    ScalarBaseline baseline;
    MacConfig mac;
    MacEnergyParams energy;
    std::int64_t freq_hz{200'000'000};
};

DnnLayerResult run_dnn_layer(const DnnLayerSpec &spec, const DnnRunParams &params, std::uint64_t seed);

// LeNet conv2, ResNet-50 1x1 bottleneck conv, MobileNetV2 classifier slice, LeNet FC1.
std::vector<DnnLayerSpec> reference_layers();

// layer,mode,accel_cycles,scalar_cycles,speedup,gops
void write_dnn_csv(std::ostream &out, const std::vector<DnnLayerResult> &rows);

} // namespace s2sim

#endif
