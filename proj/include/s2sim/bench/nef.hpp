// nef.hpp - NEF communication channel on one PE
//
// Per tick: the MAC array computes encoder dot products on 8-bit offset
// binary operands, the ARM core dequantizes them into input currents and
// updates N LIF neurons, then adds the decoder of every neuron that fired
// and low-pass filters the sum.
#ifndef S2SIM_BENCH_NEF_HPP
#define S2SIM_BENCH_NEF_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "s2sim/pe.hpp"

namespace s2sim {

struct NefSignal
{
    enum class Kind : std::uint8_t
    {
        Ramp,      // from -> to over duration_ms, then held
        Constant,  // from
        Sine,      // amplitude `to`, period duration_ms
    };
    Kind kind{Kind::Ramp};
    double from{-1.0};
    double to{1.0};
    double duration_ms{1000.0};

    double value(std::int64_t tick) const;
};

struct NefEnergyParams
{
    double e_mac_pj{1.36};
    double e_cycle_pj{16.68};  // ARM core energy per cycle at 0.5 V, 200 MHz
    std::int64_t cycles_per_neuron{16};
    std::int64_t cycles_per_decode_add{4};
    std::int64_t cycles_tick_overhead{2000};
    std::int64_t freq_hz{200'000'000};
};

struct NefSpec
{
    int n_neurons{512};
    int dims{1};
    double tau_rc_ms{20.0};
    int refractory_ticks{2};
    double max_rate_lo{100.0};
    double max_rate_hi{200.0};
    double intercept_lo{-0.95};
    double intercept_hi{0.95};
    double tau_syn_ms{10.0};
    double reg{0.1};  // ridge strength relative to the largest rate
    int eval_points{256};
    NefEnergyParams energy;
};

void validate(const NefSpec &s);

struct NefPopulation
{
    int n{0};
    int dims{0};
    std::vector<double> encoders;  // n x dims, unit norm
    std::vector<double> gains;
    std::vector<double> biases;
    std::vector<double> decoders;  // n x dims
};

// Firing rate in Hz of the discrete-time LIF neuron for constant current J.
double lif_discrete_rate(double j, double tau_rc_ms, int refractory_ticks);

NefPopulation build_nef_population(const NefSpec &spec, std::uint64_t seed);

struct NefTick
{
    std::int64_t tick{0};
    std::vector<double> input;
    std::vector<double> decoded;
    std::int64_t spikes{0};
    std::uint64_t synops_hw{0};
    std::uint64_t synops_eq{0};
    double energy_j{0.0};
    std::int64_t cycles{0};
    std::int64_t mac_cycles{0};
};

struct NefResult
{
    std::vector<NefTick> ticks;
    double rmse{0.0};          // after the filter settles (5 tau_syn)
    double rmse_all{0.0};      // whole run
    std::uint64_t total_spikes{0};
    std::uint64_t synops_hw{0};
    std::uint64_t synops_eq{0};
    double dynamic_energy_j{0.0};
    std::optional<double> pj_per_synop_hw;
    std::optional<double> pj_per_synop_eq;
    double mean_rate_hz{0.0};
    bool decoder_norm_zero{false};
};

NefResult run_nef_channel(const NefSpec &spec, const NefPopulation &pop, const NefSignal &signal, std::int64_t ticks,
                          std::uint64_t seed);

// time_ms,input,decoded (first dimension)
void write_nef_csv(std::ostream &out, const NefResult &r);

} // namespace s2sim

#endif
