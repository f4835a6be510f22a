// mac.hpp - 4x16 8-bit MAC array, MM and CONV modes
//
// Output-stationary: each cycle the array updates a tile of 4 output rows
// (MM) or 4 output columns of the feature map (CONV) by 16 output
// columns/channels. Operands are unsigned 8-bit, accumulators 32-bit.
//
// Layouts: matrices row-major; ifmap H x W x C, kernel R x S x C x F,
// ofmap H_out x W_out x F, all with the last index fastest.
#ifndef S2SIM_MAC_HPP
#define S2SIM_MAC_HPP

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace s2sim {

constexpr int kMacRows = 4;
constexpr int kMacCols = 16;
constexpr int kMacUnits = kMacRows * kMacCols;
// Largest reduction length for which 255*255*K fits in 32 bits.
constexpr std::int64_t kMaxMacK = 66051;

template <class T>
struct Matrix
{
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T &operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool operator==(const Matrix &) const = default;
};

using Mat8 = Matrix<std::uint8_t>;
using Mat32 = Matrix<std::uint32_t>;

struct Tensor8
{
    std::size_t h{0}, w{0}, c{0};
    std::vector<std::uint8_t> data;

    Tensor8() = default;
    Tensor8(std::size_t h_, std::size_t w_, std::size_t c_) : h(h_), w(w_), c(c_), data(h_ * w_ * c_, 0) {}
    std::uint8_t &at(std::size_t y, std::size_t x, std::size_t ch) { return data[(y * w + x) * c + ch]; }
    std::uint8_t at(std::size_t y, std::size_t x, std::size_t ch) const { return data[(y * w + x) * c + ch]; }
};

struct Kernel8
{
    std::size_t r{0}, s{0}, c{0}, f{0};
    std::vector<std::uint8_t> data;

    Kernel8() = default;
    Kernel8(std::size_t r_, std::size_t s_, std::size_t c_, std::size_t f_)
        : r(r_), s(s_), c(c_), f(f_), data(r_ * s_ * c_ * f_, 0)
    {
    }
    std::uint8_t &at(std::size_t dy, std::size_t dx, std::size_t ch, std::size_t o)
    {
        return data[((dy * s + dx) * c + ch) * f + o];
    }
    std::uint8_t at(std::size_t dy, std::size_t dx, std::size_t ch, std::size_t o) const
    {
        return data[((dy * s + dx) * c + ch) * f + o];
    }
};

struct Tensor32
{
    std::size_t h{0}, w{0}, c{0};
    std::vector<std::uint32_t> data;

    Tensor32() = default;
    Tensor32(std::size_t h_, std::size_t w_, std::size_t c_) : h(h_), w(w_), c(c_), data(h_ * w_ * c_, 0) {}
    std::uint32_t &at(std::size_t y, std::size_t x, std::size_t ch) { return data[(y * w + x) * c + ch]; }
    std::uint32_t at(std::size_t y, std::size_t x, std::size_t ch) const { return data[(y * w + x) * c + ch]; }
    bool operator==(const Tensor32 &) const = default;
};

struct ConvParams
{
    std::size_t stride{1};
    std::size_t pad{0};
};

class MacError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ConvShape
{
    std::size_t h{0}, w{0}, c{0};  // ifmap
    std::size_t r{0}, s{0}, f{0};  // kernel
    ConvParams params;

    std::size_t h_out() const;
    std::size_t w_out() const;
};

// Throws MacError for empty or mismatched operands, zero-size outputs or K > kMaxMacK.
Mat32 mm_execute(const Mat8 &a, const Mat8 &b);
Tensor32 conv_execute(const Tensor8 &ifmap, const Kernel8 &kernel, ConvParams params = {});

// (H_out*W_out) x (R*S*C) patch matrix, and the kernel as (R*S*C) x F.
Mat8 im2col(const Tensor8 &ifmap, std::size_t r, std::size_t s, ConvParams params);
Mat8 kernel_matrix(const Kernel8 &kernel);
Tensor32 conv_via_im2col(const Tensor8 &ifmap, const Kernel8 &kernel, ConvParams params = {});

struct MacConfig
{
    std::int64_t setup_cycles{16};
    // Data-transfer slowdown measured on the prototype silicon; off by default.
    bool transfer_penalty{false};
    double transfer_penalty_factor{1.56};
    // Operand B streamed over the NoC instead of local SRAM.
    bool b_from_noc{false};
};

struct MacTiming
{
    std::int64_t cycles{1};
    std::int64_t compute_cycles{0};
    std::int64_t macs{0};
    std::int64_t sram_words_read{0};  // 128-bit beats
    std::int64_t noc_words_read{0};   // 32-bit words
    double utilization{0.0};          // macs / (64 * compute_cycles)
};

MacTiming mm_timing(std::size_t m, std::size_t k, std::size_t n, const MacConfig &cfg = {});
MacTiming conv_timing(const ConvShape &shape, const MacConfig &cfg = {});

struct MacThroughput
{
    double macs_per_s{0.0};
    double ops_per_s{0.0};  // multiply and add counted separately
};

MacThroughput mac_peak_throughput(std::int64_t freq_hz) noexcept;

struct MacEnergyParams
{
    double e_mac_pj{1.36};  // one multiply-accumulate
};

// ops per joule expressed in TOPS/W
double mac_efficiency_tops_per_w(const MacEnergyParams &p) noexcept;

void write_csv(std::ostream &out, const Mat32 &m);
void write_csv(std::ostream &out, const Tensor32 &t);  // rows y*W+x, columns channel

} // namespace s2sim

#endif
