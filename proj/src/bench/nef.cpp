#include "s2sim/bench/nef.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "s2sim/energy.hpp"
#include "s2sim/mac.hpp"
#include "s2sim/report.hpp"
#include "s2sim/rng.hpp"

namespace s2sim {

namespace {

constexpr int kZeroPoint = 128;
constexpr double kQuantScale = 127.0;

std::uint8_t quantize(double v)
{
    const long q = std::lround(std::clamp(v, -1.0, 1.0) * kQuantScale) + kZeroPoint;
    return static_cast<std::uint8_t>(std::clamp<long>(q, 0, 255));
}

} // namespace

double NefSignal::value(std::int64_t tick) const
{
    const double t = static_cast<double>(tick);
    switch (kind) {
    case Kind::Ramp:
        if (duration_ms <= 0.0 || t >= duration_ms) {
            return to;
        }
        return from + (to - from) * t / duration_ms;
    case Kind::Constant:
        return from;
    case Kind::Sine:
        return to * std::sin(2.0 * std::numbers::pi * t / duration_ms);
    }
    return 0.0;
}

void validate(const NefSpec &s)
{
    auto fail = [](const std::string &what) { throw std::invalid_argument("nef: " + what); };
    if (s.n_neurons < 1 || s.dims < 1) {
        fail("n_neurons and dims must be >= 1");
    }
    if (!(s.tau_rc_ms > 0.0) || !(s.tau_syn_ms > 0.0) || s.refractory_ticks < 0) {
        fail("time constants must be positive");
    }
    if (!(s.max_rate_lo > 0.0) || s.max_rate_hi < s.max_rate_lo) {
        fail("max rate range must be positive and ordered");
    }
    if (!(s.intercept_lo < s.intercept_hi) || s.intercept_lo <= -1.0 || s.intercept_hi >= 1.0) {
        fail("intercepts must lie inside (-1, 1)");
    }
    if (s.reg < 0.0 || s.eval_points < 2) {
        fail("reg must be >= 0 and eval_points >= 2");
    }
    if (s.energy.freq_hz < 1) {
        fail("frequency must be positive");
    }
}

double lif_discrete_rate(double j, double tau_rc_ms, int refractory_ticks)
{
    if (!(j > 1.0)) {
        return 0.0;
    }
    // From reset, v_k = J (1 - a^k); the neuron fires at the first k with v_k >= 1.
    const double a = std::exp(-1.0 / tau_rc_ms);
    double k = std::ceil(std::log(1.0 - 1.0 / j) / std::log(a));
    k = std::max(k, 1.0);
    // Guard against rounding right at the boundary.
    while (k > 1.0 && j * (1.0 - std::pow(a, k - 1.0)) >= 1.0) {
        k -= 1.0;
    }
    while (j * (1.0 - std::pow(a, k)) < 1.0) {
        k += 1.0;
    }
    return 1000.0 / (k + static_cast<double>(refractory_ticks));
}

NefPopulation build_nef_population(const NefSpec &spec, std::uint64_t seed)
{
    validate(spec);
    const int n = spec.n_neurons;
    const int d = spec.dims;
    NefPopulation pop;
    pop.n = n;
    pop.dims = d;
    pop.encoders.resize(static_cast<std::size_t>(n * d));
    pop.gains.resize(static_cast<std::size_t>(n));
    pop.biases.resize(static_cast<std::size_t>(n));

    RngStream rng = seeded_rng(seed, stream::nef);
    const double tau_ref_s = spec.refractory_ticks * 1e-3;
    const double tau_rc_s = spec.tau_rc_ms * 1e-3;
    for (int i = 0; i < n; ++i) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int k = 0; k < d; ++k) {
                const double v = d == 1 ? (rng.uniform() < 0.5 ? -1.0 : 1.0) : rng.normal();
                pop.encoders[static_cast<std::size_t>(i * d + k)] = v;
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (int k = 0; k < d; ++k) {
            pop.encoders[static_cast<std::size_t>(i * d + k)] /= norm;
        }
        const double max_rate = rng.uniform(spec.max_rate_lo, spec.max_rate_hi);
        const double intercept = rng.uniform(spec.intercept_lo, spec.intercept_hi);
        // Continuous-time LIF rate inverted at the maximum rate.
        const double j_max = 1.0 / (1.0 - std::exp((tau_ref_s - 1.0 / max_rate) / tau_rc_s));
        const double gain = (j_max - 1.0) / (1.0 - intercept);
        pop.gains[static_cast<std::size_t>(i)] = gain;
        pop.biases[static_cast<std::size_t>(i)] = 1.0 - gain * intercept;
    }

    // Evaluation points: a uniform grid in 1-D, uniform in the unit ball otherwise.
    const int p = spec.eval_points;
    Eigen::MatrixXd x(p, d);
    for (int s = 0; s < p; ++s) {
        if (d == 1) {
            x(s, 0) = -1.0 + 2.0 * s / (p - 1);
            continue;
        }
        double norm = 0.0;
        for (int k = 0; k < d; ++k) {
            x(s, k) = rng.normal();
            norm += x(s, k) * x(s, k);
        }
        const double radius = std::pow(rng.uniform(), 1.0 / d);
        x.row(s) *= norm > 0.0 ? radius / std::sqrt(norm) : 0.0;
    }

    Eigen::MatrixXd activities(p, n);
    for (int s = 0; s < p; ++s) {
        for (int i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) {
                dot += pop.encoders[static_cast<std::size_t>(i * d + k)] * x(s, k);
            }
            const double j = pop.gains[static_cast<std::size_t>(i)] * dot + pop.biases[static_cast<std::size_t>(i)];
            activities(s, i) = lif_discrete_rate(j, spec.tau_rc_ms, spec.refractory_ticks);
        }
    }
    const double sigma = spec.reg * activities.maxCoeff();
    Eigen::MatrixXd gram = activities.transpose() * activities;
    gram.diagonal().array() += static_cast<double>(p) * sigma * sigma;
    const Eigen::MatrixXd dec = gram.ldlt().solve(activities.transpose() * x);
    pop.decoders.resize(static_cast<std::size_t>(n * d));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            pop.decoders[static_cast<std::size_t>(i * d + k)] = dec(i, k);
        }
    }
    return pop;
}

NefResult run_nef_channel(const NefSpec &spec, const NefPopulation &pop, const NefSignal &signal, std::int64_t ticks,
                          std::uint64_t seed)
{
    validate(spec);
    if (pop.n != spec.n_neurons || pop.dims != spec.dims) {
        throw std::invalid_argument("nef: population does not match spec");
    }
    if (ticks < 0) {
        throw std::invalid_argument("nef: negative tick count");
    }
    const int n = pop.n;
    const int d = pop.dims;
    const auto un = static_cast<std::size_t>(n);
    const auto ud = static_cast<std::size_t>(d);

    NefResult res;
    double dnorm = 0.0;
    for (double v : pop.decoders) {
        dnorm += v * v;
    }
    res.decoder_norm_zero = dnorm == 0.0;

    // Encoders as a D x N operand, with per-neuron column sums for dequantization.
    Mat8 enc(ud, un);
    std::vector<std::int64_t> enc_colsum(un, 0);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t k = 0; k < ud; ++k) {
            enc(k, i) = quantize(pop.encoders[i * ud + k]);
            enc_colsum[i] += enc(k, i);
        }
    }

    const LifParams lp{spec.tau_rc_ms, 0.0, 1.0, 0.0, 1.0, spec.refractory_ticks};
    const LifKernel lif(lp, 1.0);
    RngStream rng = seeded_rng(seed, stream::nef + 1);
    std::vector<NeuronState> neurons(un);
    for (auto &s : neurons) {
        s.v = rng.uniform();
    }

    const double syn_decay = std::exp(-1.0 / spec.tau_syn_ms);
    std::vector<double> filtered(ud, 0.0);
    const auto &en = spec.energy;
    const MacTiming mac_t = mm_timing(1, ud, un);
    const double scale2 = kQuantScale * kQuantScale;

    double sq_all = 0.0;
    double sq_settled = 0.0;
    std::int64_t n_settled = 0;
    const auto settle = static_cast<std::int64_t>(std::ceil(5.0 * spec.tau_syn_ms));

    res.ticks.reserve(static_cast<std::size_t>(ticks));
    for (std::int64_t t = 0; t < ticks; ++t) {
        NefTick tk;
        tk.tick = t;
        tk.input.assign(ud, 0.0);
        Mat8 xq(1, ud);
        std::int64_t xsum = 0;
        for (std::size_t k = 0; k < ud; ++k) {
            tk.input[k] = d == 1 ? signal.value(t) : (k == 0 ? signal.value(t) : 0.0);
            xq(0, k) = quantize(tk.input[k]);
            xsum += xq(0, k);
        }
        const Mat32 acc = mm_execute(xq, enc);

        std::vector<double> raw(ud, 0.0);
        std::int64_t spikes = 0;
        for (std::size_t i = 0; i < un; ++i) {
            const std::int64_t centered = static_cast<std::int64_t>(acc(0, i)) - kZeroPoint * xsum -
                                          kZeroPoint * enc_colsum[i] +
                                          static_cast<std::int64_t>(d) * kZeroPoint * kZeroPoint;
            const double dot = static_cast<double>(centered) / scale2;
            const double j = pop.gains[i] * dot + pop.biases[i];
            const LifStep st = lif.step(neurons[i], j);
            neurons[i] = st.state;
            if (st.fired) {
                ++spikes;
                for (std::size_t k = 0; k < ud; ++k) {
                    raw[k] += pop.decoders[i * ud + k] * 1000.0;
                }
            }
        }
        tk.decoded.assign(ud, 0.0);
        for (std::size_t k = 0; k < ud; ++k) {
            filtered[k] = syn_decay * filtered[k] + (1.0 - syn_decay) * raw[k];
            tk.decoded[k] = filtered[k];
            const double e = filtered[k] - tk.input[k];
            sq_all += e * e;
            if (t >= settle) {
                sq_settled += e * e;
            }
        }
        n_settled += t >= settle ? 1 : 0;

        tk.spikes = spikes;
        const auto m = static_cast<std::uint64_t>(spikes);
        tk.synops_hw = nef_synops(un, ud, m, SynopMode::Hardware);
        tk.synops_eq = nef_synops(un, ud, m, SynopMode::Equivalent);
        tk.mac_cycles = mac_t.cycles;
        tk.cycles = en.cycles_tick_overhead + static_cast<std::int64_t>(n) * en.cycles_per_neuron +
                    spikes * d * en.cycles_per_decode_add;
        tk.energy_j = (static_cast<double>(mac_t.macs) * en.e_mac_pj +
                       static_cast<double>(tk.cycles - en.cycles_tick_overhead) * en.e_cycle_pj) *
                      1e-12;

        res.total_spikes += m;
        res.synops_hw += tk.synops_hw;
        res.synops_eq += tk.synops_eq;
        res.dynamic_energy_j += tk.energy_j;
        res.ticks.push_back(std::move(tk));
    }

    if (ticks > 0) {
        res.rmse_all = std::sqrt(sq_all / static_cast<double>(ticks * d));
        res.rmse = n_settled > 0 ? std::sqrt(sq_settled / static_cast<double>(n_settled * d)) : res.rmse_all;
        res.mean_rate_hz = static_cast<double>(res.total_spikes) / (static_cast<double>(n) * static_cast<double>(ticks) * 1e-3);
    }
    if (res.synops_hw > 0) {
        res.pj_per_synop_hw = res.dynamic_energy_j / static_cast<double>(res.synops_hw) * 1e12;
    }
    if (res.synops_eq > 0) {
        res.pj_per_synop_eq = res.dynamic_energy_j / static_cast<double>(res.synops_eq) * 1e12;
    }
    return res;
}

void write_nef_csv(std::ostream &out, const NefResult &r)
{
    out << "time_ms,input,decoded\n";
    for (const auto &t : r.ticks) {
        out << t.tick << ',' << format_double(t.input.empty() ? 0.0 : t.input[0]) << ','
            << format_double(t.decoded.empty() ? 0.0 : t.decoded[0]) << '\n';
    }
}

} // namespace s2sim
