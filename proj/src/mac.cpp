#include "s2sim/mac.hpp"

#include <cmath>
#include <string>

namespace s2sim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_k(std::size_t k)
{
    if (static_cast<std::int64_t>(k) > kMaxMacK) {
        throw MacError("reduction length " + std::to_string(k) + " exceeds " + std::to_string(kMaxMacK) +
                       "; 32-bit accumulators could overflow");
    }
}

std::int64_t apply_penalty(std::int64_t compute, const MacConfig &cfg)
{
    if (!cfg.transfer_penalty) {
        return compute;
    }
    return static_cast<std::int64_t>(std::ceil(static_cast<double>(compute) * cfg.transfer_penalty_factor));
}

void check_shape(const ConvShape &sh)
{
    if (sh.h == 0 || sh.w == 0 || sh.c == 0 || sh.r == 0 || sh.s == 0 || sh.f == 0) {
        throw MacError("conv: all dimensions must be >= 1");
    }
    if (sh.params.stride == 0) {
        throw MacError("conv: stride must be >= 1");
    }
    if (sh.h + 2 * sh.params.pad < sh.r || sh.w + 2 * sh.params.pad < sh.s) {
        throw MacError("conv: kernel larger than padded input; output would be empty");
    }
    check_k(sh.r * sh.s * sh.c);
}

} // namespace

std::size_t ConvShape::h_out() const
{
    if (params.stride == 0 || h + 2 * params.pad < r) {
        return 0;
    }
    return (h + 2 * params.pad - r) / params.stride + 1;
}

std::size_t ConvShape::w_out() const
{
    if (params.stride == 0 || w + 2 * params.pad < s) {
        return 0;
    }
    return (w + 2 * params.pad - s) / params.stride + 1;
}

Mat32 mm_execute(const Mat8 &a, const Mat8 &b)
{
    if (a.rows == 0 || a.cols == 0 || b.cols == 0) {
        throw MacError("mm: all dimensions must be >= 1");
    }
    if (a.cols != b.rows) {
        throw MacError("mm: inner dimensions differ (" + std::to_string(a.cols) + " vs " + std::to_string(b.rows) +
                       ")");
    }
    check_k(a.cols);
    Mat32 c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::uint32_t *crow = &c.data[i * c.cols];
        for (std::size_t k = 0; k < a.cols; ++k) {
            const std::uint32_t av = a(i, k);
            if (av == 0) {
                continue;
            }
            const std::uint8_t *brow = &b.data[k * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
    return c;
}

Tensor32 conv_execute(const Tensor8 &ifmap, const Kernel8 &kernel, ConvParams params)
{
    if (ifmap.c != kernel.c) {
        throw MacError("conv: ifmap has " + std::to_string(ifmap.c) + " channels, kernel expects " +
                       std::to_string(kernel.c));
    }
    const ConvShape sh{ifmap.h, ifmap.w, ifmap.c, kernel.r, kernel.s, kernel.f, params};
    check_shape(sh);
    const std::size_t ho = sh.h_out();
    const std::size_t wo = sh.w_out();
    Tensor32 out(ho, wo, kernel.f);
    const auto pad = static_cast<std::ptrdiff_t>(params.pad);
    for (std::size_t oy = 0; oy < ho; ++oy) {
        for (std::size_t ox = 0; ox < wo; ++ox) {
            std::uint32_t *acc = &out.data[(oy * wo + ox) * kernel.f];
            for (std::size_t dy = 0; dy < kernel.r; ++dy) {
                const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * params.stride + dy) - pad;
                if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(ifmap.h)) {
                    continue;
                }
                for (std::size_t dx = 0; dx < kernel.s; ++dx) {
                    const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * params.stride + dx) - pad;
                    if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(ifmap.w)) {
                        continue;
                    }
                    for (std::size_t ch = 0; ch < ifmap.c; ++ch) {
                        const std::uint32_t v = ifmap.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ch);
                        if (v == 0) {
                            continue;
                        }
                        const std::uint8_t *kf = &kernel.data[((dy * kernel.s + dx) * kernel.c + ch) * kernel.f];
                        for (std::size_t o = 0; o < kernel.f; ++o) {
                            acc[o] += v * kf[o];
                        }
                    }
                }
            }
        }
    }
    return out;
}

Mat8 im2col(const Tensor8 &ifmap, std::size_t r, std::size_t s, ConvParams params)
{
    const ConvShape sh{ifmap.h, ifmap.w, ifmap.c, r, s, 1, params};
    check_shape(sh);
    const std::size_t ho = sh.h_out();
    const std::size_t wo = sh.w_out();
    Mat8 m(ho * wo, r * s * ifmap.c);
    const auto pad = static_cast<std::ptrdiff_t>(params.pad);
    for (std::size_t oy = 0; oy < ho; ++oy) {
        for (std::size_t ox = 0; ox < wo; ++ox) {
            const std::size_t row = oy * wo + ox;
            for (std::size_t dy = 0; dy < r; ++dy) {
                const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * params.stride + dy) - pad;
                for (std::size_t dx = 0; dx < s; ++dx) {
                    const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * params.stride + dx) - pad;
                    const bool inside = iy >= 0 && iy < static_cast<std::ptrdiff_t>(ifmap.h) && ix >= 0 &&
                                        ix < static_cast<std::ptrdiff_t>(ifmap.w);
                    for (std::size_t ch = 0; ch < ifmap.c; ++ch) {
                        m(row, (dy * s + dx) * ifmap.c + ch) =
                            inside ? ifmap.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ch) : 0;
                    }
                }
            }
        }
    }
    return m;
}

Mat8 kernel_matrix(const Kernel8 &kernel)
{
    // R x S x C x F with F fastest is already (R*S*C) x F row-major.
    Mat8 m(kernel.r * kernel.s * kernel.c, kernel.f);
    m.data = kernel.data;
    return m;
}

Tensor32 conv_via_im2col(const Tensor8 &ifmap, const Kernel8 &kernel, ConvParams params)
{
    if (ifmap.c != kernel.c) {
        throw MacError("conv: channel mismatch");
    }
    const ConvShape sh{ifmap.h, ifmap.w, ifmap.c, kernel.r, kernel.s, kernel.f, params};
    const Mat32 flat = mm_execute(im2col(ifmap, kernel.r, kernel.s, params), kernel_matrix(kernel));
    Tensor32 out(sh.h_out(), sh.w_out(), kernel.f);
    out.data = flat.data;
    return out;
}

MacTiming mm_timing(std::size_t m, std::size_t k, std::size_t n, const MacConfig &cfg)
{
    if (m == 0 || k == 0 || n == 0) {
        throw MacError("mm: all dimensions must be >= 1");
    }
    check_k(k);
    const auto M = static_cast<std::int64_t>(m);
    const auto K = static_cast<std::int64_t>(k);
    const auto N = static_cast<std::int64_t>(n);
    const std::int64_t tiles = ceil_div(M, kMacRows) * ceil_div(N, kMacCols);
    MacTiming t;
    t.macs = M * K * N;
    t.compute_cycles = apply_penalty(tiles * K, cfg);
    t.cycles = t.compute_cycles + cfg.setup_cycles;
    t.utilization = static_cast<double>(t.macs) / (static_cast<double>(kMacUnits) * static_cast<double>(tiles * K));
    // Per step: 4 bytes of A and 16 bytes of B.
    const std::int64_t a_bytes = tiles * K * kMacRows;
    const std::int64_t b_bytes = tiles * K * kMacCols;
    if (cfg.b_from_noc) {
        t.sram_words_read = ceil_div(a_bytes, 16);
        t.noc_words_read = ceil_div(b_bytes, 4);
    } else {
        t.sram_words_read = ceil_div(a_bytes + b_bytes, 16);
    }
    return t;
}

MacTiming conv_timing(const ConvShape &shape, const MacConfig &cfg)
{
    check_shape(shape);
    const auto ho = static_cast<std::int64_t>(shape.h_out());
    const auto wo = static_cast<std::int64_t>(shape.w_out());
    const auto F = static_cast<std::int64_t>(shape.f);
    const auto rsc = static_cast<std::int64_t>(shape.r * shape.s * shape.c);
    const std::int64_t steps = ceil_div(wo, kMacRows) * ceil_div(F, kMacCols) * ho * rsc;
    MacTiming t;
    t.macs = ho * wo * F * rsc;
    t.compute_cycles = apply_penalty(steps, cfg);
    t.cycles = t.compute_cycles + cfg.setup_cycles;
    t.utilization = static_cast<double>(t.macs) / (static_cast<double>(kMacUnits) * static_cast<double>(steps));
    // The shift register reuses ifmap bytes: 4 new bytes per 4 cycles.
    const std::int64_t if_bytes = steps;
    const std::int64_t k_bytes = steps * kMacCols;
    if (cfg.b_from_noc) {
        t.sram_words_read = ceil_div(if_bytes, 16);
        t.noc_words_read = ceil_div(k_bytes, 4);
    } else {
        t.sram_words_read = ceil_div(if_bytes + k_bytes, 16);
    }
    return t;
}

MacThroughput mac_peak_throughput(std::int64_t freq_hz) noexcept
{
    const double macs = static_cast<double>(kMacUnits) * static_cast<double>(freq_hz);
    return {macs, 2.0 * macs};
}

double mac_efficiency_tops_per_w(const MacEnergyParams &p) noexcept
{
    // 2 ops per MAC; pJ -> TOPS/W: (2 / (e * 1e-12)) / 1e12
    return 2.0 / p.e_mac_pj;
}

void write_csv(std::ostream &out, const Mat32 &m)
{
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            out << (j ? "," : "") << m(i, j);
        }
        out << '\n';
    }
}

void write_csv(std::ostream &out, const Tensor32 &t)
{
    for (std::size_t y = 0; y < t.h; ++y) {
        for (std::size_t x = 0; x < t.w; ++x) {
            for (std::size_t ch = 0; ch < t.c; ++ch) {
                out << (ch ? "," : "") << t.at(y, x, ch);
            }
            out << '\n';
        }
    }
}

} // namespace s2sim
