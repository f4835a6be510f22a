// energy.hpp - per-tick PE energy accounting
//
//   E_cycle = P_BL,i * t_sp + P_BL,1 * (t_sys - t_sp) + e_neur,i * n_neur + e_syn,i * n_syn
//
// The first two terms are the baseline component, the last two the neuron
// and synapse components. In fixed-level modes the PE never drops back to
// PL1, so the baseline becomes P_BL,i * t_sys.
#ifndef S2SIM_ENERGY_HPP
#define S2SIM_ENERGY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "s2sim/pe.hpp"

namespace s2sim {

struct PlEnergy
{
    double p_bl_mw{0.0};
    double e_neur_nj{0.0};
    double e_syn_nj{0.0};
};

struct EnergyParams
{
    std::array<PlEnergy, kNumPls> pl{{{22.38, 1.51, 0.20}, {29.72, 1.50, 0.20}, {66.44, 1.89, 0.26}}};
    double t_sys_ms{1.0};
    // Router/NoC energy is kept apart from the PE components.
    double noc_hop_energy_pj{0.0};

    const PlEnergy &at(PlId id) const { return pl.at(pl_index(id)); }
};

void validate(const EnergyParams &p);

struct EnergyComponents
{
    double baseline_j{0.0};
    double neuron_j{0.0};
    double synapse_j{0.0};

    double total_j() const noexcept { return baseline_j + neuron_j + synapse_j; }
    EnergyComponents &operator+=(const EnergyComponents &o) noexcept
    {
        baseline_j += o.baseline_j;
        neuron_j += o.neuron_j;
        synapse_j += o.synapse_j;
        return *this;
    }
};

enum class SleepMode : std::uint8_t
{
    ReturnToPl1,  // DVFS: after t_sp the PE sleeps at PL1
    StayAtLevel,  // fixed level for the whole tick
};

struct EnergyCycle
{
    EnergyComponents components;
    bool clamped{false};  // t_sp exceeded t_sys and was clamped
};

// t_sp and t_sys in seconds. Negative t_sp throws.
EnergyCycle energy_cycle(PlId pl, double t_sp_s, std::int64_t n_neur, std::int64_t n_syn, const EnergyParams &params,
                         SleepMode sleep = SleepMode::ReturnToPl1);

// Average power per component over a horizon, in mW.
struct PowerBreakdown
{
    double baseline_mw{0.0};
    double neuron_mw{0.0};
    double synapse_mw{0.0};

    double total_mw() const noexcept { return baseline_mw + neuron_mw + synapse_mw; }
};

PowerBreakdown to_power(const EnergyComponents &e, double horizon_s);

// Per-PE, per-tick accumulation.
class EnergyLedger
{
public:
    EnergyLedger(std::size_t n_pes, EnergyParams params, SleepMode sleep);

    void record(std::size_t pe, PlId pl, double t_sp_s, std::int64_t n_neur, std::int64_t n_syn);

    const EnergyParams &params() const noexcept { return params_; }
    std::size_t pes() const noexcept { return per_pe_.size(); }
    const EnergyComponents &pe(std::size_t i) const { return per_pe_.at(i); }
    EnergyComponents total() const;
    std::int64_t ticks_recorded(std::size_t pe) const { return ticks_.at(pe); }
    std::uint64_t clamped_ticks() const noexcept { return clamped_; }
    // Mean over PEs of each PE's average power.
    PowerBreakdown mean_pe_power() const;

private:
    EnergyParams params_;
    SleepMode sleep_;
    std::vector<EnergyComponents> per_pe_;
    std::vector<std::int64_t> ticks_;
    std::uint64_t clamped_{0};
};

struct PowerSummary
{
    std::int64_t ticks{0};
    std::uint64_t spike_digest{0};
    PowerBreakdown power;
};

struct Reductions
{
    double baseline_pct{0.0};
    double neuron_pct{0.0};
    double synapse_pct{0.0};
    double total_pct{0.0};
};

// Reduction of DVFS relative to the only-PL3 reference, in percent.
// Throws std::invalid_argument if horizons or spike traces differ.
Reductions compare_dvfs(const PowerSummary &dvfs, const PowerSummary &pl3);

// component,only_pl3_mW,dvfs_mW,reduction_pct
void write_power_report(std::ostream &out, const PowerSummary &dvfs, const PowerSummary &pl3);
// Published reference values in the same layout.
void write_reference_power_table(std::ostream &out);

enum class SynopMode : std::uint8_t
{
    Hardware,    // N*D MACs + M*D adds
    Equivalent,  // M*N, as if the connection were a dense N x N matrix
};

std::uint64_t nef_synops(std::uint64_t n, std::uint64_t d, std::uint64_t m, SynopMode mode) noexcept;
// Energy per synaptic operation in pJ; nullopt when the count is zero.
std::optional<double> nef_synop_energy(double dynamic_energy_j, std::uint64_t n, std::uint64_t d, std::uint64_t m,
                                       SynopMode mode) noexcept;

} // namespace s2sim

#endif
