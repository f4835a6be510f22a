#include "s2sim/energy.hpp"

#include <stdexcept>
#include <string>

#include "s2sim/report.hpp"

namespace s2sim {

void validate(const EnergyParams &p)
{
    for (std::size_t i = 0; i < p.pl.size(); ++i) {
        const auto &e = p.pl[i];
        if (!(e.p_bl_mw > 0.0) || !(e.e_neur_nj > 0.0) || !(e.e_syn_nj > 0.0)) {
            throw std::invalid_argument("energy parameters for PL" + std::to_string(i + 1) + " must be positive");
        }
    }
    if (!(p.t_sys_ms > 0.0)) {
        throw std::invalid_argument("t_sys must be positive");
    }
    if (p.noc_hop_energy_pj < 0.0) {
        throw std::invalid_argument("NoC hop energy must be non-negative");
    }
}

EnergyCycle energy_cycle(PlId pl, double t_sp_s, std::int64_t n_neur, std::int64_t n_syn, const EnergyParams &params,
                         SleepMode sleep)
{
    if (t_sp_s < 0.0 || n_neur < 0 || n_syn < 0) {
        throw std::invalid_argument("energy_cycle: negative t_sp or event count");
    }
    const double t_sys = params.t_sys_ms * 1e-3;
    EnergyCycle out;
    if (t_sp_s > t_sys) {
        t_sp_s = t_sys;
        out.clamped = true;
    }
    const auto &level = params.at(pl);
    const double p_i = level.p_bl_mw * 1e-3;
    if (sleep == SleepMode::ReturnToPl1) {
        const double p_1 = params.at(PlId::PL1).p_bl_mw * 1e-3;
        out.components.baseline_j = p_i * t_sp_s + p_1 * (t_sys - t_sp_s);
    } else {
        out.components.baseline_j = p_i * t_sys;
    }
    out.components.neuron_j = level.e_neur_nj * 1e-9 * static_cast<double>(n_neur);
    out.components.synapse_j = level.e_syn_nj * 1e-9 * static_cast<double>(n_syn);
    return out;
}

PowerBreakdown to_power(const EnergyComponents &e, double horizon_s)
{
    if (!(horizon_s > 0.0)) {
        return {};
    }
    return PowerBreakdown{e.baseline_j / horizon_s * 1e3, e.neuron_j / horizon_s * 1e3, e.synapse_j / horizon_s * 1e3};
}

EnergyLedger::EnergyLedger(std::size_t n_pes, EnergyParams params, SleepMode sleep)
    : params_(params), sleep_(sleep), per_pe_(n_pes), ticks_(n_pes, 0)
{
    validate(params_);
}

void EnergyLedger::record(std::size_t pe, PlId pl, double t_sp_s, std::int64_t n_neur, std::int64_t n_syn)
{
    const auto c = energy_cycle(pl, t_sp_s, n_neur, n_syn, params_, sleep_);
    per_pe_.at(pe) += c.components;
    ++ticks_.at(pe);
    clamped_ += c.clamped ? 1U : 0U;
}

EnergyComponents EnergyLedger::total() const
{
    EnergyComponents sum;
    for (const auto &e : per_pe_) {
        sum += e;
    }
    return sum;
}

PowerBreakdown EnergyLedger::mean_pe_power() const
{
    PowerBreakdown mean;
    if (per_pe_.empty()) {
        return mean;
    }
    const double t_sys = params_.t_sys_ms * 1e-3;
    for (std::size_t i = 0; i < per_pe_.size(); ++i) {
        const auto p = to_power(per_pe_[i], static_cast<double>(ticks_[i]) * t_sys);
        mean.baseline_mw += p.baseline_mw;
        mean.neuron_mw += p.neuron_mw;
        mean.synapse_mw += p.synapse_mw;
    }
    const auto n = static_cast<double>(per_pe_.size());
    mean.baseline_mw /= n;
    mean.neuron_mw /= n;
    mean.synapse_mw /= n;
    return mean;
}

namespace {

double reduction_pct(double dvfs, double ref)
{
    if (ref == 0.0) {
        return 0.0;
    }
    return (1.0 - dvfs / ref) * 100.0;
}

} // namespace

Reductions compare_dvfs(const PowerSummary &dvfs, const PowerSummary &pl3)
{
    if (dvfs.ticks != pl3.ticks) {
        throw std::invalid_argument("compare_dvfs: horizons differ (" + std::to_string(dvfs.ticks) + " vs " +
                                    std::to_string(pl3.ticks) + " ticks)");
    }
    if (dvfs.spike_digest != pl3.spike_digest) {
        throw std::invalid_argument("compare_dvfs: spike traces differ between runs");
    }
    return Reductions{reduction_pct(dvfs.power.baseline_mw, pl3.power.baseline_mw),
                      reduction_pct(dvfs.power.neuron_mw, pl3.power.neuron_mw),
                      reduction_pct(dvfs.power.synapse_mw, pl3.power.synapse_mw),
                      reduction_pct(dvfs.power.total_mw(), pl3.power.total_mw())};
}

void write_power_report(std::ostream &out, const PowerSummary &dvfs, const PowerSummary &pl3)
{
    const auto r = compare_dvfs(dvfs, pl3);
    out << "component,only_pl3_mW,dvfs_mW,reduction_pct\n";
    out << "baseline," << format_double(pl3.power.baseline_mw) << ',' << format_double(dvfs.power.baseline_mw) << ','
        << format_double(r.baseline_pct) << '\n';
    out << "neuron," << format_double(pl3.power.neuron_mw) << ',' << format_double(dvfs.power.neuron_mw) << ','
        << format_double(r.neuron_pct) << '\n';
    out << "synapse," << format_double(pl3.power.synapse_mw) << ',' << format_double(dvfs.power.synapse_mw) << ','
        << format_double(r.synapse_pct) << '\n';
    out << "total," << format_double(pl3.power.total_mw()) << ',' << format_double(dvfs.power.total_mw()) << ','
        << format_double(r.total_pct) << '\n';
}

void write_reference_power_table(std::ostream &out)
{
    out << "component,only_pl3_mW,dvfs_mW,reduction_pct\n"
        << "baseline,66.4,24.3,63.4\n"
        << "neuron,3.3,2.6,21.2\n"
        << "synapse,1.6,1.3,18.7\n"
        << "total,71.3,28.2,60.4\n";
}

std::uint64_t nef_synops(std::uint64_t n, std::uint64_t d, std::uint64_t m, SynopMode mode) noexcept
{
    return mode == SynopMode::Hardware ? n * d + m * d : m * n;
}

std::optional<double> nef_synop_energy(double dynamic_energy_j, std::uint64_t n, std::uint64_t d, std::uint64_t m,
                                       SynopMode mode) noexcept
{
    const auto ops = nef_synops(n, d, m, mode);
    if (ops == 0) {
        return std::nullopt;
    }
    return dynamic_energy_j / static_cast<double>(ops) * 1e12;
}

} // namespace s2sim
