#include "s2sim/bench/dnn.hpp"

#include <cmath>
#include <string>

#include "s2sim/report.hpp"
#include "s2sim/rng.hpp"

namespace s2sim {

std::string_view to_string(MacMode m)
{
    return m == MacMode::MM ? "MM" : "CONV";
}

namespace {

ConvShape shape_of(const DnnLayerSpec &l)
{
    return ConvShape{l.h, l.w, l.c, l.r, l.s, l.f, l.conv};
}

std::int64_t scalar_cycles(const ScalarBaseline &b, MacMode mode, std::int64_t macs, std::int64_t outputs)
{
    const double per_mac = mode == MacMode::CONV ? b.conv_cycles_per_mac : b.mm_cycles_per_mac;
    return static_cast<std::int64_t>(
        std::ceil(per_mac * static_cast<double>(macs) + b.cycles_per_output * static_cast<double>(outputs)));
}

void fill(std::vector<std::uint8_t> &v, RngStream &rng)
{
    for (auto &x : v) {
        x = static_cast<std::uint8_t>(rng.below(256));
    }
}

} // namespace

std::int64_t sram_bytes(const DnnLayerSpec &l)
{
    if (l.mode == MacMode::MM) {
        return static_cast<std::int64_t>(l.m * l.k + l.k * l.n + 4 * l.m * l.n);
    }
    const ConvShape sh = shape_of(l);
    return static_cast<std::int64_t>(l.h * l.w * l.c + l.r * l.s * l.c * l.f + 4 * sh.h_out() * sh.w_out() * l.f);
}

void check_sram(const DnnLayerSpec &l)
{
    const std::int64_t need = sram_bytes(l);
    if (need <= kPeSramBytes) {
        return;
    }
    const std::int64_t parts = (need + kPeSramBytes - 1) / kPeSramBytes;
    const std::string axis = l.mode == MacMode::MM ? "the N (output column) dimension" : "the output channels F";
    throw MacError("layer '" + l.name + "' needs " + std::to_string(need) + " bytes of SRAM, more than " +
                   std::to_string(kPeSramBytes) + "; split " + axis + " into at least " + std::to_string(parts) +
                   " parts");
}

DnnLayerResult run_dnn_layer(const DnnLayerSpec &spec, const DnnRunParams &params, std::uint64_t seed)
{
    if (spec.repeat < 1) {
        throw MacError("layer '" + spec.name + "': repeat must be >= 1");
    }
    check_sram(spec);
    RngStream rng = seeded_rng(seed, stream::dnn);
    DnnLayerResult res;
    res.name = spec.name;
    res.mode = spec.mode;

    MacTiming timing;
    std::int64_t outputs = 0;
    if (spec.mode == MacMode::MM) {
        Mat8 a(spec.m, spec.k);
        Mat8 b(spec.k, spec.n);
        fill(a.data, rng);
        fill(b.data, rng);
        const Mat32 c = mm_execute(a, b);
        // Scalar path: plain triple loop.
        Mat32 ref(spec.m, spec.n);
        for (std::size_t i = 0; i < spec.m; ++i) {
            for (std::size_t j = 0; j < spec.n; ++j) {
                std::uint32_t acc = 0;
                for (std::size_t kk = 0; kk < spec.k; ++kk) {
                    acc += static_cast<std::uint32_t>(a(i, kk)) * b(kk, j);
                }
                ref(i, j) = acc;
            }
        }
        res.matches_oracle = c == ref;
        timing = mm_timing(spec.m, spec.k, spec.n, params.mac);
        outputs = static_cast<std::int64_t>(spec.m * spec.n);
    } else {
        Tensor8 in(spec.h, spec.w, spec.c);
        Kernel8 ker(spec.r, spec.s, spec.c, spec.f);
        fill(in.data, rng);
        fill(ker.data, rng);
        const Tensor32 out = conv_execute(in, ker, spec.conv);
        const ConvShape sh = shape_of(spec);
        Tensor32 ref(sh.h_out(), sh.w_out(), spec.f);
        const auto pad = static_cast<std::ptrdiff_t>(spec.conv.pad);
        for (std::size_t oy = 0; oy < ref.h; ++oy) {
            for (std::size_t ox = 0; ox < ref.w; ++ox) {
                for (std::size_t o = 0; o < spec.f; ++o) {
                    std::uint32_t acc = 0;
                    for (std::size_t dy = 0; dy < spec.r; ++dy) {
                        for (std::size_t dx = 0; dx < spec.s; ++dx) {
                            const auto iy = static_cast<std::ptrdiff_t>(oy * spec.conv.stride + dy) - pad;
                            const auto ix = static_cast<std::ptrdiff_t>(ox * spec.conv.stride + dx) - pad;
                            if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(spec.h) ||
                                ix >= static_cast<std::ptrdiff_t>(spec.w)) {
                                continue;
                            }
                            for (std::size_t ch = 0; ch < spec.c; ++ch) {
                                acc += static_cast<std::uint32_t>(
                                           in.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ch)) *
                                       ker.at(dy, dx, ch, o);
                            }
                        }
                    }
                    ref.at(oy, ox, o) = acc;
                }
            }
        }
        res.matches_oracle = out == ref;
        res.matches_im2col = conv_via_im2col(in, ker, spec.conv) == out;
        timing = conv_timing(sh, params.mac);
        outputs = static_cast<std::int64_t>(ref.data.size());
    }

    const auto rep = static_cast<std::int64_t>(spec.repeat);
    res.macs = timing.macs * rep;
    res.accel_cycles = timing.cycles * rep;
    res.scalar_cycles = scalar_cycles(params.baseline, spec.mode, timing.macs, outputs) * rep;
    res.utilization = timing.utilization;
    res.speedup = static_cast<double>(res.scalar_cycles) / static_cast<double>(res.accel_cycles);
    const double seconds = static_cast<double>(res.accel_cycles) / static_cast<double>(params.freq_hz);
    res.gops = 2.0 * static_cast<double>(res.macs) / seconds * 1e-9;
    res.accel_energy_j = static_cast<double>(res.macs) * params.energy.e_mac_pj * 1e-12;
    res.accel_power_mw = res.accel_energy_j / seconds * 1e3;
    return res;
}

std::vector<DnnLayerSpec> reference_layers()
{
    std::vector<DnnLayerSpec> v;
    DnnLayerSpec lenet_conv2;
    lenet_conv2.name = "lenet_conv2";
    lenet_conv2.mode = MacMode::CONV;
    lenet_conv2.h = 14;
    lenet_conv2.w = 14;
    lenet_conv2.c = 6;
    lenet_conv2.r = 5;
    lenet_conv2.s = 5;
    lenet_conv2.f = 16;
    v.push_back(lenet_conv2);

    DnnLayerSpec resnet;
    resnet.name = "resnet50_1x1";
    resnet.mode = MacMode::CONV;
    resnet.h = 14;
    resnet.w = 14;
    resnet.c = 64;
    resnet.r = 1;
    resnet.s = 1;
    resnet.f = 64;
    v.push_back(resnet);

    DnnLayerSpec mobilenet;
    mobilenet.name = "mobilenetv2_fc_slice";
    mobilenet.mode = MacMode::MM;
    mobilenet.m = 1;
    mobilenet.k = 512;
    mobilenet.n = 64;
    v.push_back(mobilenet);

    DnnLayerSpec lenet_fc1;
    lenet_fc1.name = "lenet_fc1";
    lenet_fc1.mode = MacMode::MM;
    lenet_fc1.m = 1;
    lenet_fc1.k = 400;
    lenet_fc1.n = 120;
    v.push_back(lenet_fc1);
    return v;
}

void write_dnn_csv(std::ostream &out, const std::vector<DnnLayerResult> &rows)
{
    out << "layer,mode,accel_cycles,scalar_cycles,speedup,gops\n";
    for (const auto &r : rows) {
        out << r.name << ',' << to_string(r.mode) << ',' << r.accel_cycles << ',' << r.scalar_cycles << ','
            << format_double(r.speedup) << ',' << format_double(r.gops) << '\n';
    }
}

} // namespace s2sim
