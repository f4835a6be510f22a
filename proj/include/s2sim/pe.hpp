// pe.hpp - processing element behavioral model
//
// One PE simulates its neurons once per 1 ms timer tick:
//   sample FIFO length -> pick PL -> drain FIFO into delay buffers ->
//   update neurons -> send spikes -> back to PL1 and sleep.
// Work counts are converted to cycles with PeCycleBudget and divided by
// the PL frequency to give t_sp, the busy time within the tick.
#ifndef S2SIM_PE_HPP
#define S2SIM_PE_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "s2sim/rng.hpp"

namespace s2sim {

enum class PlId : std::uint8_t
{
    PL1 = 1,
    PL2 = 2,
    PL3 = 3,
};

constexpr int kNumPls = 3;
constexpr std::size_t pl_index(PlId id) noexcept { return static_cast<std::size_t>(id) - 1; }
std::string_view to_string(PlId id);

struct PerformanceLevel
{
    PlId id{PlId::PL1};
    double vdd{0.5};
    std::int64_t freq_hz{100'000'000};
};

// PL1 (0.5 V, 100 MHz), PL2 (0.5 V, 200 MHz), PL3 (0.6 V, 400 MHz)
std::array<PerformanceLevel, kNumPls> default_performance_levels();

struct DvfsThresholds
{
    std::int64_t l_th1{17};
    std::int64_t l_th2{59};
};

void validate(const DvfsThresholds &th);

// Strictly above l_th2 -> PL3, strictly above l_th1 -> PL2, else PL1.
PlId select_pl(std::int64_t fifo_len, const DvfsThresholds &th) noexcept;

enum class PlMode : std::uint8_t
{
    Dvfs,
    OnlyPl3,
    OnlyPl1,
};

std::string_view to_string(PlMode m);

struct LifParams
{
    double tau_m_ms{10.0};
    double v_rest{-65.0};
    double v_th{-50.0};
    double v_reset{-65.0};
    double r{1.0};
    int refractory_ticks{2};
    // Exponential synaptic current; 0 means input acts during its arrival tick only.
    double tau_syn_ms{0.0};
};

struct NeuronState
{
    double v{-65.0};
    int refractory_remaining{0};
};

struct LifStep
{
    NeuronState state;
    bool fired{false};
};

// Exact exponential integration over one step with constant input current.
LifStep lif_step(NeuronState n, double input_current, const LifParams &p, double dt_ms);

// Same update with the decay factor precomputed.
class LifKernel
{
public:
    LifKernel(const LifParams &p, double dt_ms);
    LifStep step(NeuronState n, double input_current) const noexcept;
    const LifParams &params() const noexcept { return p_; }

private:
    LifParams p_;
    double decay_;
};

struct SpikeArrival
{
    std::uint32_t key{0};
    std::int64_t arrival_tick{0};
};

class SpikeFifo
{
public:
    explicit SpikeFifo(std::size_t capacity = 4096) : capacity_(capacity) {}

    // False (and the spike is counted as overflow) when full.
    bool push(std::uint32_t key, std::int64_t arrival_tick);
    std::size_t size() const noexcept { return q_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::uint64_t overflows() const noexcept { return overflows_; }
    // Spikes that arrived strictly before `tick`.
    std::size_t count_before(std::int64_t tick) const noexcept;
    std::vector<SpikeArrival> drain_before(std::int64_t tick);

private:
    std::size_t capacity_;
    std::deque<SpikeArrival> q_;
    std::uint64_t overflows_{0};
};

struct PeCycleBudget
{
    std::int64_t cycles_tick_overhead{2000};
    std::int64_t cycles_per_neuron{400};
    std::int64_t cycles_per_syn_event{40};

    std::int64_t cycles(std::int64_t n_neur, std::int64_t n_syn) const noexcept
    {
        return cycles_tick_overhead + n_neur * cycles_per_neuron + n_syn * cycles_per_syn_event;
    }
};

void validate(const PeCycleBudget &b);

// s16.15 fixed point: 1 sign, 16 integer and 15 fraction bits.
struct Fixed16_15
{
    static constexpr int frac_bits = 15;
    static constexpr double scale = 32768.0;
    std::int32_t raw{0};

    static Fixed16_15 from_double(double v);
    double to_double() const noexcept { return static_cast<double>(raw) / scale; }
    bool operator==(const Fixed16_15 &) const = default;
};

struct AccelResult
{
    Fixed16_15 value;
    bool saturated{false};
    int cycles{4};
};

constexpr int kDefaultExpLogCycles = 4;

// Functional stand-ins for the exp/log accelerator: round-to-nearest
// results at s16.15 precision, saturating on overflow.
AccelResult exp_accel(Fixed16_15 x, int cycles = kDefaultExpLogCycles);
AccelResult log_accel(Fixed16_15 x, int cycles = kDefaultExpLogCycles);

struct Synapse
{
    std::uint32_t target{0};
    float weight{0.0F};
    std::uint16_t delay{1};  // ticks, >= 1
};

using SynapticRow = std::vector<Synapse>;

// Network state mapped onto one PE.
struct PeProgram
{
    std::uint32_t n_neurons{0};
    std::vector<std::uint32_t> neuron_keys;                    // multicast key per neuron
    std::unordered_map<std::uint32_t, SynapticRow> rows;       // incoming spike key -> row
    LifParams lif;
    double noise_mu{0.0};
    double noise_sigma{0.0};
};

struct PeTickResult
{
    std::int64_t tick{0};
    PlId pl{PlId::PL1};
    std::int64_t fifo_len{0};
    std::int64_t n_neur{0};
    std::int64_t n_syn{0};
    std::int64_t cycles{0};
    double t_sp_s{0.0};
    bool realtime_violation{false};
    std::vector<std::uint32_t> fired;
};

struct PlPolicy
{
    PlMode mode{PlMode::Dvfs};
    DvfsThresholds thresholds;
    std::array<PerformanceLevel, kNumPls> levels{default_performance_levels()};

    PlId choose(std::int64_t fifo_len) const noexcept;
};

class ProcessingElement
{
public:
    ProcessingElement(int id, PeProgram program, PeCycleBudget budget, std::uint64_t seed,
                      std::size_t fifo_capacity = 4096, double t_sys_ms = 1.0);

    int id() const noexcept { return id_; }
    const PeProgram &program() const noexcept { return program_; }
    const SpikeFifo &fifo() const noexcept { return fifo_; }
    const std::vector<NeuronState> &neurons() const noexcept { return neurons_; }
    std::int64_t last_tick() const noexcept { return last_tick_; }

    bool receive(std::uint32_t key, std::int64_t arrival_tick) { return fifo_.push(key, arrival_tick); }
    // Extra work charged to the current tick (e.g. accelerator calls).
    void charge_cycles(std::int64_t cycles) noexcept { extra_cycles_ += cycles; }

    // Throws std::logic_error if the tick was already processed.
    PeTickResult tick(std::int64_t tick, const PlPolicy &policy);

private:
    int id_;
    PeProgram program_;
    PeCycleBudget budget_;
    LifKernel lif_;
    RngStream rng_;
    SpikeFifo fifo_;
    double t_sys_s_;
    std::vector<NeuronState> neurons_;
    std::vector<double> i_syn_;
    double syn_decay_{0.0};
    std::vector<std::vector<double>> delay_ring_;
    std::int64_t last_tick_{-1};
    std::int64_t extra_cycles_{0};
};

} // namespace s2sim

#endif
