// engine.hpp - tick-driven simulation of a whole configuration
//
// Per tick, PEs run in id order: FIFO drain, DVFS decision, neuron and
// synapse update, spike send, return to PL1. The interconnect then carries
// the tick's spikes to their targets, which process them in the next tick.
#ifndef S2SIM_ENGINE_HPP
#define S2SIM_ENGINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "s2sim/bench/dnn.hpp"
#include "s2sim/bench/nef.hpp"
#include "s2sim/config.hpp"
#include "s2sim/energy.hpp"
#include "s2sim/report.hpp"

namespace s2sim {

struct PeTickRow
{
    std::int64_t tick{0};
    int pe{0};
    PlId pl{PlId::PL1};
    std::int64_t fifo_len{0};
    double t_sp_us{0.0};
    std::int64_t spikes_out{0};
};

struct RasterRow
{
    std::int64_t tick{0};
    int pe{0};
    std::uint32_t neuron{0};
};

struct SimReport
{
    MetricTable metrics;
    PowerSummary power;
    EnergyComponents energy;  // all PEs, whole run
    std::array<std::int64_t, kNumPls> pl_ticks{};
    std::vector<PeTickRow> pe_rows;
    std::vector<RasterRow> raster;
    std::optional<NefResult> nef;
    std::vector<DnnLayerResult> dnn;
};

// trace_out receives the CSV trace when non-null (and output.trace is set).
SimReport run_simulation(const SimConfig &config, std::ostream *trace_out = nullptr);

// FNV-1a over (tick, pe, neuron) of every spike.
std::uint64_t spike_digest(const std::vector<RasterRow> &raster);

void write_pe_csv(std::ostream &out, const std::vector<PeTickRow> &rows);
void write_raster_csv(std::ostream &out, const std::vector<RasterRow> &rows);

struct OutputFiles
{
    std::filesystem::path trace;
    std::filesystem::path report;
    std::filesystem::path pe_ticks;
    std::filesystem::path raster;
    std::filesystem::path nef;
    std::filesystem::path dnn;
};

OutputFiles output_files(const std::filesystem::path &dir);

// Runs the configuration and writes every enabled output under dir.
SimReport run_to_directory(const SimConfig &config, const std::filesystem::path &dir);

struct Comparison
{
    SimReport dvfs;
    SimReport pl3;
    Reductions reductions;
};

// Runs the configuration twice, in DVFS and only-PL3 mode, with the same seed.
Comparison compare_modes(const SimConfig &config);

} // namespace s2sim

#endif
