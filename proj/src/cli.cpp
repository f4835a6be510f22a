#include "s2sim/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "s2sim/config.hpp"
#include "s2sim/engine.hpp"
#include "s2sim/verify.hpp"

namespace s2sim {

namespace {

namespace fs = std::filesystem;

struct MissingFile : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

nlohmann::json read_config_doc(const std::string &path)
{
    if (path.empty()) {
        return nlohmann::json::object();
    }
    if (!fs::exists(path)) {
        throw MissingFile("config file not found: " + path);
    }
    std::ifstream in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
}

fs::path resolve_out_dir(const std::string &flag, const SimConfig &c)
{
    if (!flag.empty()) {
        return flag;
    }
    if (!c.output.dir.empty()) {
        return c.output.dir;
    }
    if (const char *env = std::getenv("S2SIM_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "out";
}

struct RunOptions
{
    std::string config;
    std::string benchmark;
    std::string mode;
    std::int64_t ticks{-1};
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string baseline_report;
    bool no_trace{false};
};

void apply_overrides(SimConfig &c, const RunOptions &o)
{
    if (!o.benchmark.empty()) {
        try {
            c.benchmark.kind = parse_benchmark(o.benchmark);
        } catch (const std::invalid_argument &e) {
            throw ConfigError("--benchmark", e.what());
        }
    }
    if (!o.mode.empty()) {
        try {
            c.mode = parse_mode(o.mode);
        } catch (const std::invalid_argument &e) {
            throw ConfigError("--mode", e.what());
        }
    }
    if (o.ticks >= 0) {
        c.ticks = o.ticks;
    }
    if (o.seed) {
        c.rng_seed = *o.seed;
    }
    if (o.no_trace) {
        c.output.trace = false;
    }
    validate(c);
}

void print_metrics(std::ostream &out, const MetricTable &m, std::initializer_list<std::string_view> names)
{
    for (auto n : names) {
        if (auto v = m.find(n)) {
            out << "  " << std::left << std::setw(26) << n << ' ' << format_double(*v) << '\n';
        }
    }
}

int cmd_run(const RunOptions &o, std::ostream &out)
{
    // Without a config file the synfire benchmark starts from its calibrated setup.
    SimConfig c = o.config.empty() && o.benchmark == "synfire" ? synfire_config()
                                                                : config_from_json(read_config_doc(o.config));
    apply_overrides(c, o);
    const fs::path dir = resolve_out_dir(o.out, c);
    SimReport rep = run_to_directory(c, dir);
    out << "s2sim run: " << to_string(c.benchmark.kind) << ", mode " << to_string(c.mode) << ", " << c.ticks
        << " ticks, seed " << c.rng_seed << '\n';
    print_metrics(out, rep.metrics,
                  {"total_power_mW", "baseline_power_mW", "neuron_power_mW", "synapse_power_mW", "pl1_fraction",
                   "spikes_total", "realtime_violations", "router_drops", "nef_rmse", "nef_pj_per_synop_eq"});
    for (const auto &d : rep.dnn) {
        out << "  " << std::left << std::setw(26) << d.name << " speedup " << format_double(d.speedup) << '\n';
    }

    if (!o.baseline_report.empty()) {
        if (c.mode == PlMode::OnlyPl1) {
            throw ConfigError("--mode", "a baseline report compares dvfs against pl3; pl1 runs have no counterpart");
        }
        SimConfig other = c;
        other.mode = c.mode == PlMode::Dvfs ? PlMode::OnlyPl3 : PlMode::Dvfs;
        other.output.trace = false;
        const SimReport rep2 = run_simulation(other);
        const PowerSummary &dvfs = c.mode == PlMode::Dvfs ? rep.power : rep2.power;
        const PowerSummary &pl3 = c.mode == PlMode::Dvfs ? rep2.power : rep.power;
        const fs::path path = o.baseline_report;
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path());
        }
        {
            std::ofstream f(path, std::ios::binary);
            write_power_report(f, dvfs, pl3);
        }
        {
            std::ofstream f(path.parent_path() / "table3_reference.csv", std::ios::binary);
            write_reference_power_table(f);
        }
        const Reductions r = compare_dvfs(dvfs, pl3);
        out << "  power reduction (dvfs vs pl3): total " << format_double(r.total_pct) << " %, baseline "
            << format_double(r.baseline_pct) << " %\n";
    }
    out << "  outputs in " << dir.string() << '\n';
    return kExitOk;
}

struct SweepOptions
{
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    int jobs{0};
    std::int64_t ticks{-1};
    std::string mode;
};

int cmd_sweep(const SweepOptions &o, std::ostream &out)
{
    const nlohmann::json base = read_config_doc(o.config);
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto &s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
            throw ConfigError("--set", "expected path=v1,v2,... but got '" + s + "'");
        }
        std::vector<std::string> vals;
        std::stringstream ss(s.substr(eq + 1));
        std::string v;
        while (std::getline(ss, v, ',')) {
            vals.push_back(v);
        }
        axes.emplace_back(s.substr(0, eq), std::move(vals));
    }

    // Cartesian product, last axis fastest.
    std::vector<std::vector<std::string>> combos{{}};
    for (const auto &[path, vals] : axes) {
        std::vector<std::vector<std::string>> next;
        for (const auto &c : combos) {
            for (const auto &v : vals) {
                auto e = c;
                e.push_back(v);
                next.push_back(std::move(e));
            }
        }
        combos = std::move(next);
    }

    std::vector<SimConfig> configs;
    for (const auto &combo : combos) {
        nlohmann::json doc = base;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            set_json_path(doc, axes[i].first, combo[i]);
        }
        SimConfig c = config_from_json(doc);
        RunOptions ro;
        ro.mode = o.mode;
        ro.ticks = o.ticks;
        ro.no_trace = true;
        apply_overrides(c, ro);
        configs.push_back(std::move(c));
    }

    const fs::path dir = resolve_out_dir(o.out, configs.front());
    fs::create_directories(dir);
    const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
    const std::size_t jobs = o.jobs > 0 ? static_cast<std::size_t>(o.jobs) : hw;
    std::vector<MetricTable> results(configs.size());
    for (std::size_t start = 0; start < configs.size(); start += jobs) {
        std::vector<std::future<MetricTable>> batch;
        for (std::size_t i = start; i < std::min(configs.size(), start + jobs); ++i) {
            std::ostringstream name;
            name << "run_" << std::setw(3) << std::setfill('0') << i;
            const fs::path run_dir = dir / name.str();
            batch.push_back(std::async(std::launch::async, [cfg = configs[i], run_dir] {
                return run_to_directory(cfg, run_dir).metrics;
            }));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) {
            results[start + k] = batch[k].get();
        }
    }

    std::ofstream f(dir / "sweep_summary.csv", std::ios::binary);
    f << "run";
    for (const auto &a : axes) {
        f << ',' << a.first;
    }
    for (const auto &m : results.front().rows()) {
        f << ',' << m.name;
    }
    f << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
        f << i;
        for (const auto &v : combos[i]) {
            f << ',' << v;
        }
        for (const auto &m : results.front().rows()) {
            const auto v = results[i].find(m.name);
            f << ',' << (v ? format_double(*v) : "");
        }
        f << '\n';
    }
    out << "s2sim sweep: " << configs.size() << " runs, summary in " << (dir / "sweep_summary.csv").string()
        << '\n';
    return kExitOk;
}

int cmd_verify(const std::string &golden_dir, bool write, std::ostream &out)
{
    const fs::path file = fs::path(golden_dir) / "packets.csv";
    if (write) {
        fs::create_directories(golden_dir);
        std::ofstream f(file, std::ios::binary);
        write_golden(f);
        out << "wrote " << file.string() << '\n';
        return kExitOk;
    }
    if (!fs::exists(file)) {
        throw MissingFile("golden vector file not found: " + file.string());
    }
    std::ifstream in(file);
    CheckResult all = verify_golden(in);
    all.merge(verify_energy_cases());
    all.merge(verify_mac_oracles(1));
    if (all.ok()) {
        out << "s2sim verify: all " << all.checks << " checks passed\n";
        return kExitOk;
    }
    out << "s2sim verify: " << all.failures.size() << " of " << all.checks << " checks failed\n";
    for (const auto &f : all.failures) {
        out << "  FAIL " << f << '\n';
    }
    return kExitFailure;
}

int cmd_tables(const std::string &config, std::ostream &out)
{
    SimConfig c = config_from_json(read_config_doc(config));
    out << "Energy model parameters\n";
    out << "  PL   VDD[V]  f[MHz]  P_BL[mW]  e_neur[nJ]  e_syn[nJ]\n";
    for (std::size_t i = 0; i < kNumPls; ++i) {
        const auto &lv = c.levels[i];
        const auto &e = c.energy.pl[i];
        out << "  PL" << i + 1 << "  " << std::setw(6) << format_double(lv.vdd) << "  " << std::setw(6)
            << format_double(static_cast<double>(lv.freq_hz) / 1e6) << "  " << std::setw(8)
            << format_double(e.p_bl_mw) << "  " << std::setw(10) << format_double(e.e_neur_nj) << "  "
            << std::setw(9) << format_double(e.e_syn_nj) << '\n';
    }
    out << "  t_sys = " << format_double(c.energy.t_sys_ms) << " ms\n\n";
    const SynfireSpec &s = c.benchmark.synfire;
    const std::int64_t syn = static_cast<std::int64_t>(s.exc_per_layer + s.inh_per_layer) * s.fanin_exc +
                             static_cast<std::int64_t>(s.exc_per_layer) * s.fanin_inh;
    const double fanout = static_cast<double>(syn) / (s.exc_per_layer + s.inh_per_layer);
    out << "Synfire chain parameters\n";
    out << "  PEs                      " << c.topology.n_pes << '\n';
    out << "  excitatory per layer     " << s.exc_per_layer << '\n';
    out << "  inhibitory per layer     " << s.inh_per_layer << '\n';
    out << "  exc fan-in               " << s.fanin_exc << '\n';
    out << "  inh fan-in               " << s.fanin_inh << '\n';
    out << "  delay inh->exc [ms]      " << s.delay_inh_to_exc << '\n';
    out << "  delay exc->next [ms]     " << s.delay_exc_to_next << '\n';
    out << "  synapses per core        " << syn << '\n';
    out << "  avg. fan-out             " << format_double(fanout) << '\n';
    out << "  l_th1 / l_th2            " << c.dvfs.l_th1 << " / " << c.dvfs.l_th2 << '\n';
    return kExitOk;
}

} // namespace

int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"SpiNNaker2 prototype simulator", "s2sim"};
    app.require_subcommand(1);

    RunOptions ro;
    auto *run = app.add_subcommand("run", "Run one simulation");
    run->add_option("config", ro.config, "JSON configuration file");
    run->add_option("--benchmark", ro.benchmark, "idle|synfire|nef|dnn");
    run->add_option("--mode", ro.mode, "dvfs|pl3|pl1");
    run->add_option("--ticks", ro.ticks, "Number of 1 ms ticks");
    run->add_option("--seed", ro.seed, "RNG seed");
    run->add_option("--out", ro.out, "Output directory (default: config, $S2SIM_OUT_DIR, ./out)");
    run->add_option("--baseline-report", ro.baseline_report,
                    "Also run the opposite mode and write the dvfs vs pl3 power table here");
    run->add_flag("--no-trace", ro.no_trace, "Do not write trace.csv");

    SweepOptions so;
    auto *sweep = app.add_subcommand("sweep", "Run a parameter grid in parallel");
    sweep->add_option("config", so.config, "JSON configuration file");
    sweep->add_option("--set", so.sets, "path=v1,v2,... (repeatable)")->required();
    sweep->add_option("--out", so.out, "Output directory");
    sweep->add_option("--jobs", so.jobs, "Parallel runs (default: hardware threads)");
    sweep->add_option("--ticks", so.ticks, "Number of ticks per run");
    sweep->add_option("--mode", so.mode, "dvfs|pl3|pl1");

    std::string golden_dir = "golden";
    bool write_golden_flag = false;
    auto *verify = app.add_subcommand("verify", "Check golden vectors, energy cases and MAC oracles");
    verify->add_option("golden_dir", golden_dir, "Directory holding packets.csv");
    verify->add_flag("--write-golden", write_golden_flag, "Regenerate packets.csv instead of checking it");

    std::string tables_config;
    auto *tables = app.add_subcommand("tables", "Print energy and synfire parameter tables");
    tables->add_option("config", tables_config, "Optional configuration to show overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (*run) {
            return cmd_run(ro, out);
        }
        if (*sweep) {
            return cmd_sweep(so, out);
        }
        if (*verify) {
            return cmd_verify(golden_dir, write_golden_flag, out);
        }
        return cmd_tables(tables_config, out);
    } catch (const MissingFile &e) {
        err << "error: " << e.what() << '\n';
        return kExitMissingFile;
    } catch (const ConfigError &e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace s2sim
