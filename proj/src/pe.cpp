#include "s2sim/pe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace s2sim {

std::string_view to_string(PlId id)
{
    switch (id) {
    case PlId::PL1:
        return "PL1";
    case PlId::PL2:
        return "PL2";
    case PlId::PL3:
        return "PL3";
    }
    return "PL?";
}

std::string_view to_string(PlMode m)
{
    switch (m) {
    case PlMode::Dvfs:
        return "dvfs";
    case PlMode::OnlyPl3:
        return "pl3";
    case PlMode::OnlyPl1:
        return "pl1";
    }
    return "?";
}

std::array<PerformanceLevel, kNumPls> default_performance_levels()
{
    return {PerformanceLevel{PlId::PL1, 0.5, 100'000'000}, PerformanceLevel{PlId::PL2, 0.5, 200'000'000},
            PerformanceLevel{PlId::PL3, 0.6, 400'000'000}};
}

void validate(const DvfsThresholds &th)
{
    if (th.l_th1 < 0 || th.l_th1 >= th.l_th2) {
        throw std::invalid_argument("DVFS thresholds must satisfy 0 <= l_th1 < l_th2");
    }
}

PlId select_pl(std::int64_t fifo_len, const DvfsThresholds &th) noexcept
{
    if (fifo_len > th.l_th2) {
        return PlId::PL3;
    }
    if (fifo_len > th.l_th1) {
        return PlId::PL2;
    }
    return PlId::PL1;
}

PlId PlPolicy::choose(std::int64_t fifo_len) const noexcept
{
    switch (mode) {
    case PlMode::OnlyPl3:
        return PlId::PL3;
    case PlMode::OnlyPl1:
        return PlId::PL1;
    case PlMode::Dvfs:
        break;
    }
    return select_pl(fifo_len, thresholds);
}

LifKernel::LifKernel(const LifParams &p, double dt_ms) : p_(p), decay_(std::exp(-dt_ms / p.tau_m_ms))
{
    if (p.tau_m_ms <= 0.0 || dt_ms <= 0.0 || p.refractory_ticks < 0 || p.v_th <= p.v_reset) {
        throw std::invalid_argument("LIF parameters: need tau_m > 0, dt > 0, refractory >= 0, v_th > v_reset");
    }
}

LifStep LifKernel::step(NeuronState n, double input_current) const noexcept
{
    if (n.refractory_remaining > 0) {
        --n.refractory_remaining;
        n.v = p_.v_reset;
        return {n, false};
    }
    n.v = p_.v_rest + (n.v - p_.v_rest) * decay_ + p_.r * input_current * (1.0 - decay_);
    if (n.v >= p_.v_th) {
        n.v = p_.v_reset;
        n.refractory_remaining = p_.refractory_ticks;
        return {n, true};
    }
    return {n, false};
}

LifStep lif_step(NeuronState n, double input_current, const LifParams &p, double dt_ms)
{
    return LifKernel(p, dt_ms).step(n, input_current);
}

bool SpikeFifo::push(std::uint32_t key, std::int64_t arrival_tick)
{
    if (q_.size() >= capacity_) {
        ++overflows_;
        return false;
    }
    if (!q_.empty() && arrival_tick < q_.back().arrival_tick) {
        throw std::logic_error("SpikeFifo: arrivals must be in nondecreasing tick order");
    }
    q_.push_back(SpikeArrival{key, arrival_tick});
    return true;
}

std::size_t SpikeFifo::count_before(std::int64_t tick) const noexcept
{
    std::size_t n = 0;
    for (const auto &s : q_) {
        if (s.arrival_tick >= tick) {
            break;
        }
        ++n;
    }
    return n;
}

std::vector<SpikeArrival> SpikeFifo::drain_before(std::int64_t tick)
{
    std::vector<SpikeArrival> out;
    while (!q_.empty() && q_.front().arrival_tick < tick) {
        out.push_back(q_.front());
        q_.pop_front();
    }
    return out;
}

void validate(const PeCycleBudget &b)
{
    if (b.cycles_tick_overhead < 1 || b.cycles_per_neuron < 1 || b.cycles_per_syn_event < 1) {
        throw std::invalid_argument("PE cycle budget entries must all be >= 1");
    }
}

Fixed16_15 Fixed16_15::from_double(double v)
{
    const double scaled = std::nearbyint(v * scale);
    if (scaled > std::numeric_limits<std::int32_t>::max() || scaled < std::numeric_limits<std::int32_t>::min()) {
        throw std::out_of_range("Fixed16_15: value not representable");
    }
    return Fixed16_15{static_cast<std::int32_t>(scaled)};
}

namespace {

AccelResult round_to_fixed(long double v, int cycles)
{
    const long double scaled = v * 32768.0L;
    constexpr auto hi = static_cast<long double>(std::numeric_limits<std::int32_t>::max());
    constexpr auto lo = static_cast<long double>(std::numeric_limits<std::int32_t>::min());
    if (!(scaled <= hi + 0.5L)) {
        return {Fixed16_15{std::numeric_limits<std::int32_t>::max()}, true, cycles};
    }
    if (!(scaled >= lo - 0.5L)) {
        return {Fixed16_15{std::numeric_limits<std::int32_t>::min()}, true, cycles};
    }
    const long long r = std::llroundl(scaled);
    return {Fixed16_15{static_cast<std::int32_t>(std::clamp<long long>(r, std::numeric_limits<std::int32_t>::min(),
                                                                       std::numeric_limits<std::int32_t>::max()))},
            false, cycles};
}

} // namespace

AccelResult exp_accel(Fixed16_15 x, int cycles)
{
    const long double xv = static_cast<long double>(x.raw) / 32768.0L;
    return round_to_fixed(std::exp(xv), cycles);
}

AccelResult log_accel(Fixed16_15 x, int cycles)
{
    if (x.raw <= 0) {
        return {Fixed16_15{std::numeric_limits<std::int32_t>::min()}, true, cycles};
    }
    const long double xv = static_cast<long double>(x.raw) / 32768.0L;
    return round_to_fixed(std::log(xv), cycles);
}

ProcessingElement::ProcessingElement(int id, PeProgram program, PeCycleBudget budget, std::uint64_t seed,
                                     std::size_t fifo_capacity, double t_sys_ms)
    : id_(id), program_(std::move(program)), budget_(budget), lif_(program_.lif, t_sys_ms),
      rng_(seed, stream::pe_noise + static_cast<std::uint64_t>(id)), fifo_(fifo_capacity), t_sys_s_(t_sys_ms * 1e-3)
{
    validate(budget_);
    if (program_.neuron_keys.size() != program_.n_neurons) {
        throw std::invalid_argument("PE " + std::to_string(id) + ": one multicast key per neuron required");
    }
    neurons_.assign(program_.n_neurons, NeuronState{program_.lif.v_rest, 0});
    if (program_.lif.tau_syn_ms < 0.0) {
        throw std::invalid_argument("PE " + std::to_string(id) + ": tau_syn_ms must be non-negative");
    }
    i_syn_.assign(program_.n_neurons, 0.0);
    syn_decay_ = program_.lif.tau_syn_ms > 0.0 ? std::exp(-t_sys_ms / program_.lif.tau_syn_ms) : 0.0;
    std::uint16_t max_delay = 1;
    for (const auto &[key, row] : program_.rows) {
        for (const auto &s : row) {
            if (s.delay < 1) {
                throw std::invalid_argument("PE " + std::to_string(id) + ": synaptic delay must be >= 1 tick");
            }
            if (s.target >= program_.n_neurons) {
                throw std::invalid_argument("PE " + std::to_string(id) + ": synapse target out of range");
            }
            max_delay = std::max(max_delay, s.delay);
        }
    }
    delay_ring_.assign(static_cast<std::size_t>(max_delay) + 2, std::vector<double>(program_.n_neurons, 0.0));
}

PeTickResult ProcessingElement::tick(std::int64_t tick, const PlPolicy &policy)
{
    if (tick <= last_tick_) {
        throw std::logic_error("PE " + std::to_string(id_) + ": tick " + std::to_string(tick) + " already processed");
    }
    last_tick_ = tick;

    PeTickResult res;
    res.tick = tick;
    res.fifo_len = static_cast<std::int64_t>(fifo_.count_before(tick));
    res.pl = policy.choose(res.fifo_len);

    const auto ring_len = static_cast<std::int64_t>(delay_ring_.size());
    for (const auto &arrival : fifo_.drain_before(tick)) {
        auto it = program_.rows.find(arrival.key);
        if (it == program_.rows.end()) {
            continue;
        }
        for (const auto &s : it->second) {
            const std::int64_t due = std::max(arrival.arrival_tick + s.delay, tick);
            delay_ring_[static_cast<std::size_t>(due % ring_len)][s.target] += s.weight;
        }
        res.n_syn += static_cast<std::int64_t>(it->second.size());
    }

    auto &slot = delay_ring_[static_cast<std::size_t>(tick % ring_len)];
    for (std::uint32_t i = 0; i < program_.n_neurons; ++i) {
        const double noise = program_.noise_sigma > 0.0 ? program_.noise_sigma * rng_.normal() : 0.0;
        i_syn_[i] = i_syn_[i] * syn_decay_ + slot[i];
        slot[i] = 0.0;
        const double current = program_.noise_mu + noise + i_syn_[i];
        const LifStep step = lif_.step(neurons_[i], current);
        neurons_[i] = step.state;
        if (step.fired) {
            res.fired.push_back(i);
        }
    }

    res.n_neur = program_.n_neurons;
    res.cycles = budget_.cycles(res.n_neur, res.n_syn) + extra_cycles_;
    extra_cycles_ = 0;
    const auto &level = policy.levels[pl_index(res.pl)];
    res.t_sp_s = static_cast<double>(res.cycles) / static_cast<double>(level.freq_hz);
    res.realtime_violation = res.t_sp_s > t_sys_s_;
    return res;
}

} // namespace s2sim
