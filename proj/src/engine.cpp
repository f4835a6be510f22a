#include "s2sim/engine.hpp"

#include <fstream>
#include <memory>
#include <string>

#include "s2sim/bench/synfire.hpp"
#include "s2sim/interconnect.hpp"
#include "s2sim/pe.hpp"
#include "s2sim/trace.hpp"

namespace s2sim {

std::uint64_t spike_digest(const std::vector<RasterRow> &raster)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFFU;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto &r : raster) {
        mix(static_cast<std::uint64_t>(r.tick));
        mix(static_cast<std::uint64_t>(r.pe));
        mix(r.neuron);
    }
    return h;
}

void write_pe_csv(std::ostream &out, const std::vector<PeTickRow> &rows)
{
    out << "tick,pe,pl,fifo_len,t_sp_us,spikes_out\n";
    for (const auto &r : rows) {
        out << r.tick << ',' << r.pe << ',' << static_cast<int>(r.pl) << ',' << r.fifo_len << ','
            << format_double(r.t_sp_us) << ',' << r.spikes_out << '\n';
    }
}

void write_raster_csv(std::ostream &out, const std::vector<RasterRow> &rows)
{
    out << "time_ms,pe,neuron\n";
    for (const auto &r : rows) {
        out << r.tick << ',' << r.pe << ',' << r.neuron << '\n';
    }
}

namespace {

struct Network
{
    std::vector<PeProgram> programs;
    RoutingTable table;
    std::vector<StimulusSpike> stimulus;
};

Network build_network(const SimConfig &c)
{
    const int n_pes = c.topology.n_pes;
    if (c.benchmark.kind == BenchmarkKind::Synfire) {
        SynfireSpec spec = c.benchmark.synfire;
        spec.n_pes = n_pes;
        spec.lif = c.neuron;
        SynfireNetwork net = build_synfire(spec, c.rng_seed);
        RoutingTable table(c.router.table_capacity, c.router.default_link, c.router.default_route);
        for (const auto &e : net.table.entries()) {
            table.add(e);
        }
        return Network{std::move(net.programs), std::move(table), std::move(net.stimulus)};
    }
    Network net{{}, RoutingTable(c.router.table_capacity, c.router.default_link, c.router.default_route), {}};
    for (int pe = 0; pe < n_pes; ++pe) {
        PeProgram p;
        p.n_neurons = static_cast<std::uint32_t>(c.benchmark.idle.neurons_per_pe);
        p.lif = c.neuron;
        for (std::uint32_t i = 0; i < p.n_neurons; ++i) {
            p.neuron_keys.push_back((static_cast<std::uint32_t>(pe) << 16U) | i);
        }
        net.programs.push_back(std::move(p));
    }
    return net;
}

void add_power_metrics(SimReport &rep, const EnergyLedger &ledger, std::int64_t ticks, int n_pes)
{
    auto &m = rep.metrics;
    const PowerBreakdown mean = ledger.mean_pe_power();
    rep.energy = ledger.total();
    m.add("baseline_power_mW", mean.baseline_mw, "mW");
    m.add("neuron_power_mW", mean.neuron_mw, "mW");
    m.add("synapse_power_mW", mean.synapse_mw, "mW");
    m.add("total_power_mW", mean.total_mw(), "mW");
    const double horizon = static_cast<double>(ticks) * ledger.params().t_sys_ms * 1e-3;
    const PowerBreakdown sys = to_power(rep.energy, horizon);
    m.add("system_baseline_power_mW", sys.baseline_mw, "mW");
    m.add("system_neuron_power_mW", sys.neuron_mw, "mW");
    m.add("system_synapse_power_mW", sys.synapse_mw, "mW");
    m.add("system_total_power_mW", sys.total_mw(), "mW");
    m.add("baseline_energy_uJ", rep.energy.baseline_j * 1e6, "uJ");
    m.add("neuron_energy_uJ", rep.energy.neuron_j * 1e6, "uJ");
    m.add("synapse_energy_uJ", rep.energy.synapse_j * 1e6, "uJ");
    m.add("total_energy_uJ", rep.energy.total_j() * 1e6, "uJ");
    m.add("clamped_ticks", static_cast<double>(ledger.clamped_ticks()), "count");
    const double pe_ticks = static_cast<double>(ticks) * n_pes;
    for (std::size_t i = 0; i < kNumPls; ++i) {
        m.add("pl" + std::to_string(i + 1) + "_fraction",
              pe_ticks > 0 ? static_cast<double>(rep.pl_ticks[i]) / pe_ticks : 0.0, "ratio");
    }
    rep.power.ticks = ticks;
    rep.power.power = mean;
}

void run_spiking(const SimConfig &c, SimReport &rep, TraceWriter &trace)
{
    Network net = build_network(c);
    const int n_pes = c.topology.n_pes;
    const MeshDims dims{c.topology.mesh_x, c.topology.mesh_y};
    const std::int64_t noc_cpt = ClockDomain{"noc", kNocFrequencyHz}.cycles_per_tick(c.energy.t_sys_ms * 1e-3);

    std::vector<ProcessingElement> pes;
    pes.reserve(static_cast<std::size_t>(n_pes));
    for (int i = 0; i < n_pes; ++i) {
        pes.emplace_back(i, std::move(net.programs[static_cast<std::size_t>(i)]), c.pe, c.rng_seed, c.fifo_capacity,
                         c.energy.t_sys_ms);
    }

    InterconnectParams ip;
    ip.dims = dims;
    ip.noc = c.topology.noc;
    ip.spinn_node = qpe_coord(dims, c.topology.spinn_router_qpe);
    ip.router.chip.n_pes = n_pes;
    ip.router.drop_timeout = c.router.drop_timeout;
    ip.router.link_cycles_per_packet = c.router.link_cycles_per_packet;
    ip.cycles_per_tick = noc_cpt;
    ip.hop_energy_pj = c.energy.noc_hop_energy_pj;
    ip.trace_packets = c.output.trace_packets;
    Interconnect ic(ip, std::move(net.table), n_pes, &trace);

    const PlPolicy policy{c.mode, c.dvfs, c.levels};
    const SleepMode sleep = c.mode == PlMode::OnlyPl3 ? SleepMode::StayAtLevel : SleepMode::ReturnToPl1;
    EnergyLedger ledger(static_cast<std::size_t>(n_pes), c.energy, sleep);

    std::vector<std::string> names;
    for (int i = 0; i < n_pes; ++i) {
        names.push_back("pe" + std::to_string(i));
    }

    std::int64_t violations = 0;
    std::int64_t spikes_total = 0;
    double t_sp_sum = 0.0;
    double t_sp_max = 0.0;
    std::size_t next_stim = 0;

    if (c.mode != PlMode::Dvfs && c.ticks > 0) {
        const PlId fixed = policy.choose(0);
        if (fixed != PlId::PL1) {
            for (int i = 0; i < n_pes; ++i) {
                trace.emit(SimTime{0, 0}, TraceKind::PlChange, names[static_cast<std::size_t>(i)],
                           "pl=" + std::string(to_string(fixed)));
            }
        }
    }

    for (std::int64_t t = 0; t < c.ticks; ++t) {
        while (next_stim < net.stimulus.size() && net.stimulus[next_stim].tick <= t) {
            pes.front().receive(net.stimulus[next_stim].key, t);
            ++next_stim;
        }
        for (int i = 0; i < n_pes; ++i) {
            auto &pe = pes[static_cast<std::size_t>(i)];
            const auto &name = names[static_cast<std::size_t>(i)];
            PeTickResult r = pe.tick(t, policy);
            ledger.record(static_cast<std::size_t>(i), r.pl, r.t_sp_s, r.n_neur, r.n_syn);
            ++rep.pl_ticks[pl_index(r.pl)];
            t_sp_sum += r.t_sp_s;
            t_sp_max = std::max(t_sp_max, r.t_sp_s);

            if (c.mode == PlMode::Dvfs && r.pl != PlId::PL1) {
                trace.emit(SimTime{t, 0}, TraceKind::PlChange, name, "pl=" + std::string(to_string(r.pl)));
            }
            const auto send_cycle =
                t * noc_cpt + static_cast<std::int64_t>(std::ceil(r.t_sp_s * static_cast<double>(kNocFrequencyHz)));
            for (std::uint32_t n : r.fired) {
                const std::uint32_t key = pe.program().neuron_keys[n];
                trace.emit(SimTime{t, r.cycles}, TraceKind::Spike, name,
                           "neuron=" + std::to_string(n) + ";key=" + std::to_string(key));
                rep.raster.push_back(RasterRow{t, i, n});
                ic.send_spike(i, key, send_cycle);
            }
            if (r.realtime_violation) {
                ++violations;
                trace.emit(SimTime{t, r.cycles}, TraceKind::RealtimeViolation, name,
                           "t_sp_us=" + format_double(r.t_sp_s * 1e6));
            }
            if (c.mode == PlMode::Dvfs && r.pl != PlId::PL1) {
                trace.emit(SimTime{t, r.cycles}, TraceKind::PlChange, name, "pl=PL1;sleep");
            }
            if ((t + 1) % c.output.energy_sample_interval == 0) {
                trace.emit(SimTime{t, r.cycles}, TraceKind::EnergySample, name,
                           "energy_uJ=" + format_double(ledger.pe(static_cast<std::size_t>(i)).total_j() * 1e6));
            }
            spikes_total += static_cast<std::int64_t>(r.fired.size());
            rep.pe_rows.push_back(PeTickRow{t, i, r.pl, r.fifo_len, r.t_sp_s * 1e6,
                                            static_cast<std::int64_t>(r.fired.size())});
        }
        for (const auto &d : ic.drain(t)) {
            pes[static_cast<std::size_t>(d.pe)].receive(d.key, t);
        }
        trace.flush();
    }

    add_power_metrics(rep, ledger, c.ticks, n_pes);
    auto &m = rep.metrics;
    const std::uint64_t digest = spike_digest(rep.raster);
    rep.power.spike_digest = digest;
    m.add("spikes_total", static_cast<double>(spikes_total), "count");
    m.add("spike_rate_per_pe_Hz",
          c.ticks > 0 ? static_cast<double>(spikes_total) / n_pes / (static_cast<double>(c.ticks) * 1e-3) : 0.0,
          "Hz");
    m.add("spike_digest_hi", static_cast<double>(digest >> 32U), "hash");
    m.add("spike_digest_lo", static_cast<double>(digest & 0xFFFFFFFFULL), "hash");
    m.add("realtime_violations", static_cast<double>(violations), "count");
    std::uint64_t overflows = 0;
    for (const auto &pe : pes) {
        overflows += pe.fifo().overflows();
    }
    m.add("fifo_overflows", static_cast<double>(overflows), "count");
    const double pe_ticks = static_cast<double>(c.ticks) * n_pes;
    m.add("t_sp_mean_us", pe_ticks > 0 ? t_sp_sum / pe_ticks * 1e6 : 0.0, "us");
    m.add("t_sp_max_us", t_sp_max * 1e6, "us");

    const auto &st = ic.stats();
    m.add("noc_spikes_sent", static_cast<double>(st.spikes_sent), "count");
    m.add("noc_copies_delivered", static_cast<double>(st.copies_delivered), "count");
    m.add("noc_late_deliveries", static_cast<double>(st.late_deliveries), "count");
    m.add("noc_max_latency_cycles", static_cast<double>(st.max_latency_cycles), "cycles");
    m.add("noc_hops", static_cast<double>(st.noc_hops), "count");
    m.add("noc_energy_uJ", ic.noc_energy_j() * 1e6, "uJ");
    m.add("router_drops", static_cast<double>(st.router_drops), "count");
    const auto &mc = ic.router().counters(SpinnKind::Multicast);
    m.add("router_mc_injected", static_cast<double>(mc.injected), "count");
    m.add("router_mc_delivered", static_cast<double>(mc.delivered), "count");
    m.add("router_mc_dropped", static_cast<double>(mc.dropped), "count");
    for (int q = 0; q < dims.nodes(); ++q) {
        const QpeCoord qc = qpe_coord(dims, q);
        const RouterStats &rs = ic.fabric().stats(qc);
        const std::string pre = "noc_q" + std::to_string(q) + "_";
        for (int o = 0; o < kNumOutputs; ++o) {
            m.add(pre + "grants_" + std::string(to_string(static_cast<Output>(o))),
                  static_cast<double>(rs.grants[static_cast<std::size_t>(o)]), "count");
        }
        int occ = 0;
        for (int p : rs.max_occupancy) {
            occ = std::max(occ, p);
        }
        m.add(pre + "max_occupancy", occ, "packets");
        m.add(pre + "stall_cycles", static_cast<double>(rs.stall_cycles), "cycles");
    }
}

void run_nef(const SimConfig &c, SimReport &rep, TraceWriter &trace)
{
    const auto &nb = c.benchmark.nef;
    const NefPopulation pop = build_nef_population(nb.spec, c.rng_seed);
    NefResult r = run_nef_channel(nb.spec, pop, nb.signal, c.ticks, c.rng_seed);
    for (const auto &t : r.ticks) {
        trace.emit(SimTime{t.tick, t.mac_cycles}, TraceKind::MacJobDone, "mac.pe0",
                   "mode=MM;cycles=" + std::to_string(t.mac_cycles));
        trace.emit(SimTime{t.tick, t.cycles}, TraceKind::EnergySample, "pe0",
                   "dynamic_nJ=" + format_double(t.energy_j * 1e9) + ";spikes=" + std::to_string(t.spikes));
        trace.flush();
    }
    auto &m = rep.metrics;
    m.add("nef_neurons", nb.spec.n_neurons, "count");
    m.add("nef_dims", nb.spec.dims, "count");
    m.add("nef_rmse", r.rmse, "");
    m.add("nef_rmse_all", r.rmse_all, "");
    m.add("nef_mean_rate_Hz", r.mean_rate_hz, "Hz");
    m.add("nef_spikes_total", static_cast<double>(r.total_spikes), "count");
    m.add("nef_synops_hw", static_cast<double>(r.synops_hw), "count");
    m.add("nef_synops_eq", static_cast<double>(r.synops_eq), "count");
    m.add("nef_dynamic_energy_uJ", r.dynamic_energy_j * 1e6, "uJ");
    m.add("nef_dynamic_power_mW",
          c.ticks > 0 ? r.dynamic_energy_j / (static_cast<double>(c.ticks) * c.energy.t_sys_ms * 1e-3) * 1e3 : 0.0,
          "mW");
    m.add("nef_pj_per_synop_hw", r.pj_per_synop_hw.value_or(0.0), "pJ");
    m.add("nef_pj_per_synop_eq", r.pj_per_synop_eq.value_or(0.0), "pJ");
    m.add("nef_decoder_norm_zero", r.decoder_norm_zero ? 1.0 : 0.0, "flag");
    rep.nef = std::move(r);
}

void run_dnn(const SimConfig &c, SimReport &rep, TraceWriter &trace)
{
    const auto &db = c.benchmark.dnn;
    const DnnRunParams params{db.baseline, db.mac, c.mac_energy, db.freq_hz};
    const std::int64_t cpt = ClockDomain{"pe0", db.freq_hz}.cycles_per_tick(c.energy.t_sys_ms * 1e-3);
    std::int64_t clock = 0;
    auto &m = rep.metrics;
    for (const auto &layer : db.layers) {
        DnnLayerResult r = run_dnn_layer(layer, params, c.rng_seed);
        clock += r.accel_cycles;
        trace.emit(SimTime::from_cycles(clock, cpt), TraceKind::MacJobDone, "mac.pe0",
                   "layer=" + r.name + ";mode=" + std::string(to_string(r.mode)) +
                       ";cycles=" + std::to_string(r.accel_cycles));
        const std::string pre = "dnn_" + r.name + "_";
        m.add(pre + "speedup", r.speedup, "x");
        m.add(pre + "gops", r.gops, "GOPS");
        m.add(pre + "utilization", r.utilization, "ratio");
        m.add(pre + "power_mW", r.accel_power_mw, "mW");
        m.add(pre + "oracle_match", r.matches_oracle && r.matches_im2col ? 1.0 : 0.0, "flag");
        rep.dnn.push_back(std::move(r));
    }
    trace.flush();
    const MacThroughput peak = mac_peak_throughput(db.freq_hz);
    m.add("mac_peak_GOPS", peak.ops_per_s * 1e-9, "GOPS");
    m.add("mac_efficiency_TOPS_per_W", mac_efficiency_tops_per_w(c.mac_energy), "TOPS/W");
}

} // namespace

SimReport run_simulation(const SimConfig &config, std::ostream *trace_out)
{
    validate(config);
    SimReport rep;
    TraceWriter trace(config.output.trace ? trace_out : nullptr);
    rep.metrics.add("ticks", static_cast<double>(config.ticks), "ticks");
    rep.metrics.add("n_pes", config.topology.n_pes, "count");
    rep.metrics.add("rng_seed_lo", static_cast<double>(config.rng_seed & 0xFFFFFFFFULL), "");
    switch (config.benchmark.kind) {
    case BenchmarkKind::Idle:
    case BenchmarkKind::Synfire:
        run_spiking(config, rep, trace);
        break;
    case BenchmarkKind::Nef:
        run_nef(config, rep, trace);
        break;
    case BenchmarkKind::Dnn:
        run_dnn(config, rep, trace);
        break;
    }
    trace.flush();
    return rep;
}

OutputFiles output_files(const std::filesystem::path &dir)
{
    return OutputFiles{dir / "trace.csv", dir / "report.csv", dir / "pe_ticks.csv",
                       dir / "raster.csv", dir / "nef.csv",   dir / "dnn.csv"};
}

namespace {

std::ofstream open_out(const std::filesystem::path &p)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + p.string());
    }
    return f;
}

} // namespace

SimReport run_to_directory(const SimConfig &config, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    const OutputFiles files = output_files(dir);
    std::unique_ptr<std::ofstream> trace;
    if (config.output.trace) {
        trace = std::make_unique<std::ofstream>(open_out(files.trace));
    }
    SimReport rep = run_simulation(config, trace.get());
    {
        auto f = open_out(files.report);
        rep.metrics.write_csv(f);
    }
    const bool spiking =
        config.benchmark.kind == BenchmarkKind::Synfire || config.benchmark.kind == BenchmarkKind::Idle;
    if (spiking && config.output.pe_csv) {
        auto f = open_out(files.pe_ticks);
        write_pe_csv(f, rep.pe_rows);
    }
    if (spiking && config.output.raster) {
        auto f = open_out(files.raster);
        write_raster_csv(f, rep.raster);
    }
    if (rep.nef) {
        auto f = open_out(files.nef);
        write_nef_csv(f, *rep.nef);
    }
    if (!rep.dnn.empty()) {
        auto f = open_out(files.dnn);
        write_dnn_csv(f, rep.dnn);
    }
    return rep;
}

Comparison compare_modes(const SimConfig &config)
{
    SimConfig a = config;
    a.mode = PlMode::Dvfs;
    a.output.trace = false;
    SimConfig b = a;
    b.mode = PlMode::OnlyPl3;
    Comparison cmp{run_simulation(a), run_simulation(b), {}};
    cmp.reductions = compare_dvfs(cmp.dvfs.power, cmp.pl3.power);
    return cmp;
}

} // namespace s2sim
