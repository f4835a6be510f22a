// config.hpp - simulation configuration and its JSON form
//
// Every section is optional and falls back to the defaults below. Unknown
// keys are rejected; errors carry the JSON path of the offending field.
#ifndef S2SIM_CONFIG_HPP
#define S2SIM_CONFIG_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2sim/bench/dnn.hpp"
#include "s2sim/bench/nef.hpp"
#include "s2sim/bench/synfire.hpp"
#include "s2sim/energy.hpp"
#include "s2sim/mac.hpp"
#include "s2sim/noc.hpp"
#include "s2sim/pe.hpp"
#include "s2sim/spinn_router.hpp"

namespace s2sim {

class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string path, const std::string &what)
        : std::runtime_error(path + ": " + what), path_(std::move(path))
    {
    }
    const std::string &path() const noexcept { return path_; }

private:
    std::string path_;
};

struct TopologyConfig
{
    int mesh_x{2};
    int mesh_y{1};
    int n_pes{8};
    int pes_per_qpe{kPesPerQpe};
    NocParams noc;
    int spinn_router_qpe{0};
};

struct RouterConfig
{
    std::int64_t drop_timeout{kDefaultDropTimeout};
    std::size_t table_capacity{1024};
    DefaultRoutePolicy default_route{DefaultRoutePolicy::OppositeOfArrival};
    int default_link{0};
    std::int64_t link_cycles_per_packet{1};
};

enum class BenchmarkKind : std::uint8_t
{
    Idle,
    Synfire,
    Nef,
    Dnn,
};

std::string_view to_string(BenchmarkKind k);

struct IdleBenchmark
{
    int neurons_per_pe{0};
};

struct NefBenchmark
{
    NefSpec spec;
    NefSignal signal;
};

struct DnnBenchmark
{
    std::vector<DnnLayerSpec> layers{reference_layers()};
    ScalarBaseline baseline;
    MacConfig mac;
    std::int64_t freq_hz{200'000'000};
};

struct BenchmarkConfig
{
    BenchmarkKind kind{BenchmarkKind::Idle};
    IdleBenchmark idle;
    SynfireSpec synfire;
    NefBenchmark nef;
    DnnBenchmark dnn;
};

struct OutputConfig
{
    std::string dir;  // empty: S2SIM_OUT_DIR or "out"
    bool trace{true};
    bool trace_packets{false};
    bool pe_csv{true};
    bool raster{true};
    std::int64_t energy_sample_interval{100};
};

struct SimConfig
{
    TopologyConfig topology;
    EnergyParams energy;
    MacEnergyParams mac_energy;
    DvfsThresholds dvfs;
    std::array<PerformanceLevel, kNumPls> levels{default_performance_levels()};
    PeCycleBudget pe;
    std::size_t fifo_capacity{4096};
    LifParams neuron;
    RouterConfig router;
    BenchmarkConfig benchmark;
    std::int64_t ticks{1000};
    PlMode mode{PlMode::Dvfs};
    std::uint64_t rng_seed{1};
    OutputConfig output;
};

// Throws ConfigError with the field path.
void validate(const SimConfig &c);

SimConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const SimConfig &c);
// Throws std::system_error-like ConfigError("<file>") if missing; see cli.
SimConfig load_config(const std::filesystem::path &file);

// Sets a dotted path (e.g. "benchmark.w_exc") inside a config document.
// Numeric-looking values become numbers, true/false booleans, else strings.
void set_json_path(nlohmann::json &doc, const std::string &dotted, const std::string &value);

PlMode parse_mode(const std::string &s);
BenchmarkKind parse_benchmark(const std::string &s);

// Calibrated synfire setup used by the shipped configs.
SimConfig synfire_config();

} // namespace s2sim

#endif
