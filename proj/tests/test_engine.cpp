#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "s2sim/config.hpp"
#include "s2sim/engine.hpp"

using namespace s2sim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SimConfig short_synfire(std::int64_t ticks)
{
    SimConfig c = synfire_config();
    c.ticks = ticks;
    return c;
}

fs::path fresh_dir(const std::string &name)
{
    const auto d = fs::temp_directory_path() / ("s2sim_engine_" + name);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("zero ticks", "[engine]")
{
    SimConfig c;
    c.ticks = 0;
    const auto r = run_simulation(c);
    REQUIRE(r.energy.total_j() == 0.0);
    REQUIRE(r.pe_rows.empty());
    REQUIRE(r.raster.empty());
    REQUIRE(r.metrics.at("total_energy_uJ") == 0.0);
}

TEST_CASE("one empty PE at PL1 for 10 ticks", "[engine][energy]")
{
    SimConfig c;
    c.topology.n_pes = 1;
    c.topology.mesh_x = 1;
    c.mode = PlMode::OnlyPl1;
    c.ticks = 10;
    const auto r = run_simulation(c);
    REQUIRE(r.energy.total_j() * 1e6 == Catch::Approx(223.8).epsilon(1e-12));
    REQUIRE(r.energy.neuron_j == 0.0);
    REQUIRE(r.energy.synapse_j == 0.0);
    REQUIRE(r.pl_ticks[0] == 10);
}

TEST_CASE("component energies sum to the total", "[engine][energy]")
{
    const auto r = run_simulation(short_synfire(300));
    const double sum = r.metrics.at("baseline_energy_uJ") + r.metrics.at("neuron_energy_uJ") +
                       r.metrics.at("synapse_energy_uJ");
    REQUIRE(std::abs(sum - r.metrics.at("total_energy_uJ")) / r.metrics.at("total_energy_uJ") < 1e-9);
    REQUIRE(r.pl_ticks[0] + r.pl_ticks[1] + r.pl_ticks[2] == 300 * 8);
}

TEST_CASE("repeated runs are byte-identical", "[engine][determinism]")
{
    SimConfig c = short_synfire(400);
    c.rng_seed = 12;
    c.output.trace_packets = true;
    const auto a = fresh_dir("det_a");
    const auto b = fresh_dir("det_b");
    run_to_directory(c, a);
    run_to_directory(c, b);
    int compared = 0;
    for (const auto &e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        REQUIRE(fs::exists(b / name));
        REQUIRE(slurp(a / name) == slurp(b / name));
        ++compared;
    }
    REQUIRE(compared >= 4);
    REQUIRE(fs::file_size(a / "trace.csv") > 0);

    c.rng_seed = 13;
    const auto d = fresh_dir("det_c");
    run_to_directory(c, d);
    REQUIRE(slurp(a / "raster.csv") != slurp(d / "raster.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(d);
}

TEST_CASE("trace timestamps never go backwards per source", "[engine][trace]")
{
    SimConfig c = short_synfire(200);
    c.output.trace_packets = true;
    std::ostringstream trace;
    (void)run_simulation(c, &trace);
    std::istringstream in(trace.str());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "time_ms,cycle,kind,source,detail");
    std::map<std::string, std::pair<long long, long long>> last;
    long rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string t, cyc, kind, src;
        std::getline(ls, t, ',');
        std::getline(ls, cyc, ',');
        std::getline(ls, kind, ',');
        std::getline(ls, src, ',');
        const std::pair<long long, long long> now{std::stoll(t), std::stoll(cyc)};
        auto it = last.find(src);
        if (it != last.end()) {
            REQUIRE(now >= it->second);
        }
        last[src] = now;
        ++rows;
    }
    REQUIRE(rows > 0);
}

TEST_CASE("DVFS and PL3 see the same spikes", "[engine][compare]")
{
    const auto cmp = compare_modes(short_synfire(1000));
    REQUIRE(cmp.dvfs.power.spike_digest == cmp.pl3.power.spike_digest);
    REQUIRE(spike_digest(cmp.dvfs.raster) == spike_digest(cmp.pl3.raster));
    REQUIRE(cmp.pl3.power.power.baseline_mw == Catch::Approx(66.44).epsilon(1e-12));
    REQUIRE(cmp.reductions.total_pct > 0.0);
    REQUIRE(cmp.dvfs.pl_ticks[0] > cmp.dvfs.pl_ticks[2]);
}

TEST_CASE("the pulse travels around the ring", "[engine][synfire]")
{
    const auto r = run_simulation(short_synfire(200));
    // Burst onset: first tick with at least 50 excitatory spikes on a PE.
    std::map<std::pair<int, std::int64_t>, int> count;
    for (const auto &s : r.raster) {
        if (s.neuron < 200) {
            ++count[{s.pe, s.tick}];
        }
    }
    std::vector<std::int64_t> onsets;  // PE0..PE7, then PE0 again
    for (int k = 0; k < 9; ++k) {
        const int pe = k % 8;
        const std::int64_t after = onsets.empty() ? 0 : onsets.back() + 1;
        std::int64_t found = -1;
        for (const auto &[key, n] : count) {
            if (key.first == pe && key.second >= after && n >= 50) {
                found = key.second;
                break;
            }
        }
        REQUIRE(found >= 0);
        onsets.push_back(found);
    }
    for (std::size_t i = 1; i < onsets.size(); ++i) {
        INFO("layer step " << i);
        REQUIRE(onsets[i] - onsets[i - 1] >= 10);
        REQUIRE(onsets[i] - onsets[i - 1] <= 12);
    }
}

TEST_CASE("NEF and DNN benchmarks through the engine", "[engine]")
{
    SimConfig n;
    n.benchmark.kind = BenchmarkKind::Nef;
    n.ticks = 1000;
    const auto rn = run_simulation(n);
    REQUIRE(rn.nef.has_value());
    REQUIRE(rn.metrics.at("nef_rmse") <= 0.1);

    SimConfig d;
    d.benchmark.kind = BenchmarkKind::Dnn;
    d.ticks = 1;
    const auto rd = run_simulation(d);
    REQUIRE(rd.dnn.size() == 4);
    REQUIRE(rd.metrics.at("mac_peak_GOPS") == Catch::Approx(25.6));
}

TEST_CASE("output CSV headers", "[engine][csv]")
{
    std::ostringstream pe, ra;
    write_pe_csv(pe, {});
    write_raster_csv(ra, {});
    REQUIRE(ra.str() == "time_ms,pe,neuron\n");
    REQUIRE(pe.str().rfind("tick,pe,", 0) == 0);
}
