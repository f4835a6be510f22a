#include "s2sim/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace s2sim {

using nlohmann::json;

std::string_view to_string(BenchmarkKind k)
{
    switch (k) {
    case BenchmarkKind::Idle:
        return "idle";
    case BenchmarkKind::Synfire:
        return "synfire";
    case BenchmarkKind::Nef:
        return "nef";
    case BenchmarkKind::Dnn:
        return "dnn";
    }
    return "?";
}

PlMode parse_mode(const std::string &s)
{
    if (s == "dvfs") {
        return PlMode::Dvfs;
    }
    if (s == "pl3") {
        return PlMode::OnlyPl3;
    }
    if (s == "pl1") {
        return PlMode::OnlyPl1;
    }
    throw std::invalid_argument("unknown mode '" + s + "' (expected dvfs, pl3 or pl1)");
}

BenchmarkKind parse_benchmark(const std::string &s)
{
    for (auto k : {BenchmarkKind::Idle, BenchmarkKind::Synfire, BenchmarkKind::Nef, BenchmarkKind::Dnn}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown benchmark '" + s + "' (expected idle, synfire, nef or dnn)");
}

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Section
{
public:
    Section(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string at(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string &key) const { return j_.contains(key); }

    template <class T>
    void get(const std::string &key, T &out)
    {
        used_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) {
            return;
        }
        read(*it, at(key), out);
    }

    std::optional<Section> child(const std::string &key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) {
            return std::nullopt;
        }
        return Section(*it, at(key));
    }

    const json *raw(const std::string &key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (const auto &item : j_.items()) {
            if (used_.count(item.key()) == 0) {
                throw ConfigError(at(item.key()), "unknown key");
            }
        }
    }

    template <class T>
    static void read(const json &v, const std::string &path, T &out)
    {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError(path, "expected true or false");
            }
            out = v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                throw ConfigError(path, "expected an integer");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) {
                    out = static_cast<T>(v.get<std::uint64_t>());
                } else {
                    const auto s = v.get<std::int64_t>();
                    if (s < 0) {
                        throw ConfigError(path, "must be non-negative");
                    }
                    out = static_cast<T>(s);
                }
            } else {
                const auto s = v.get<std::int64_t>();
                if (s < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
                    s > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
                    throw ConfigError(path, "integer out of range");
                }
                out = static_cast<T>(s);
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                throw ConfigError(path, "expected a number");
            }
            out = v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw ConfigError(path, "expected a string");
            }
            out = v.get<std::string>();
        } else {
            static_assert(sizeof(T) == 0, "unsupported config field type");
        }
    }

private:
    const json &j_;
    std::string path_;
    std::set<std::string> used_;
};

template <class T>
void read_triplet(Section &s, const std::string &key, std::array<T, kNumPls> &vals)
{
    const json *v = s.raw(key);
    if (v == nullptr) {
        return;
    }
    if (!v->is_array() || v->size() != kNumPls) {
        throw ConfigError(s.at(key), "expected an array of 3 values (PL1, PL2, PL3)");
    }
    for (std::size_t i = 0; i < kNumPls; ++i) {
        Section::read((*v)[i], s.at(key) + "[" + std::to_string(i) + "]", vals[i]);
    }
}

std::int64_t mhz_to_hz(double mhz)
{
    return static_cast<std::int64_t>(std::llround(mhz * 1e6));
}

void read_topology(Section s, SimConfig &c)
{
    auto &t = c.topology;
    s.get("mesh_x", t.mesh_x);
    s.get("mesh_y", t.mesh_y);
    s.get("n_pes", t.n_pes);
    s.get("pes_per_qpe", t.pes_per_qpe);
    s.get("fifo_depth", t.noc.fifo_depth);
    s.get("hop_latency", t.noc.hop_latency);
    s.get("spinn_router_qpe", t.spinn_router_qpe);
    s.finish();
}

void read_energy(Section s, SimConfig &c)
{
    std::array<double, kNumPls> p{}, en{}, es{};
    for (std::size_t i = 0; i < kNumPls; ++i) {
        p[i] = c.energy.pl[i].p_bl_mw;
        en[i] = c.energy.pl[i].e_neur_nj;
        es[i] = c.energy.pl[i].e_syn_nj;
    }
    read_triplet(s, "p_bl_mw", p);
    read_triplet(s, "e_neur_nj", en);
    read_triplet(s, "e_syn_nj", es);
    for (std::size_t i = 0; i < kNumPls; ++i) {
        c.energy.pl[i] = PlEnergy{p[i], en[i], es[i]};
    }
    s.get("t_sys_ms", c.energy.t_sys_ms);
    s.get("noc_hop_energy_pj", c.energy.noc_hop_energy_pj);
    s.get("e_mac_pj", c.mac_energy.e_mac_pj);
    s.finish();
}

void read_dvfs(Section s, SimConfig &c)
{
    s.get("l_th1", c.dvfs.l_th1);
    s.get("l_th2", c.dvfs.l_th2);
    if (const json *lv = s.raw("levels")) {
        if (!lv->is_array() || lv->size() != kNumPls) {
            throw ConfigError(s.at("levels"), "expected an array of 3 levels");
        }
        for (std::size_t i = 0; i < kNumPls; ++i) {
            Section ls((*lv)[i], s.at("levels") + "[" + std::to_string(i) + "]");
            double mhz = static_cast<double>(c.levels[i].freq_hz) / 1e6;
            ls.get("vdd", c.levels[i].vdd);
            ls.get("freq_mhz", mhz);
            ls.finish();
            c.levels[i].freq_hz = mhz_to_hz(mhz);
        }
    }
    s.finish();
}

void read_pe(Section s, SimConfig &c)
{
    s.get("cycles_tick_overhead", c.pe.cycles_tick_overhead);
    s.get("cycles_per_neuron", c.pe.cycles_per_neuron);
    s.get("cycles_per_syn_event", c.pe.cycles_per_syn_event);
    s.get("fifo_capacity", c.fifo_capacity);
    s.finish();
}

void read_neuron(Section s, SimConfig &c)
{
    s.get("tau_m_ms", c.neuron.tau_m_ms);
    s.get("v_rest", c.neuron.v_rest);
    s.get("v_th", c.neuron.v_th);
    s.get("v_reset", c.neuron.v_reset);
    s.get("r", c.neuron.r);
    s.get("refractory_ticks", c.neuron.refractory_ticks);
    s.get("tau_syn_ms", c.neuron.tau_syn_ms);
    s.finish();
}

void read_router(Section s, SimConfig &c)
{
    s.get("drop_timeout", c.router.drop_timeout);
    s.get("table_capacity", c.router.table_capacity);
    std::string policy = c.router.default_route == DefaultRoutePolicy::Fixed ? "fixed" : "opposite";
    s.get("default_route", policy);
    if (policy == "fixed") {
        c.router.default_route = DefaultRoutePolicy::Fixed;
    } else if (policy == "opposite") {
        c.router.default_route = DefaultRoutePolicy::OppositeOfArrival;
    } else {
        throw ConfigError(s.at("default_route"), "expected \"fixed\" or \"opposite\"");
    }
    s.get("default_link", c.router.default_link);
    s.get("link_cycles_per_packet", c.router.link_cycles_per_packet);
    s.finish();
}

void read_synfire(Section &s, SynfireSpec &sp)
{
    s.get("exc_per_layer", sp.exc_per_layer);
    s.get("inh_per_layer", sp.inh_per_layer);
    s.get("fanin_exc", sp.fanin_exc);
    s.get("fanin_inh", sp.fanin_inh);
    s.get("delay_inh_to_exc", sp.delay_inh_to_exc);
    s.get("delay_exc_to_next", sp.delay_exc_to_next);
    s.get("w_exc", sp.w_exc);
    s.get("w_inh", sp.w_inh);
    s.get("noise_mu", sp.noise_mu);
    s.get("noise_sigma", sp.noise_sigma);
    if (auto st = s.child("stimulus")) {
        st->get("spikes", sp.stimulus.spikes);
        st->get("jitter_ms", sp.stimulus.jitter_ms);
        st->get("center_tick", sp.stimulus.center_tick);
        st->get("weight", sp.stimulus.weight);
        st->finish();
    }
}

void read_nef(Section &s, NefBenchmark &nb)
{
    auto &sp = nb.spec;
    s.get("n_neurons", sp.n_neurons);
    s.get("dims", sp.dims);
    s.get("tau_rc_ms", sp.tau_rc_ms);
    s.get("refractory_ticks", sp.refractory_ticks);
    s.get("max_rate_lo", sp.max_rate_lo);
    s.get("max_rate_hi", sp.max_rate_hi);
    s.get("intercept_lo", sp.intercept_lo);
    s.get("intercept_hi", sp.intercept_hi);
    s.get("tau_syn_ms", sp.tau_syn_ms);
    s.get("reg", sp.reg);
    s.get("eval_points", sp.eval_points);
    s.get("e_cycle_pj", sp.energy.e_cycle_pj);
    s.get("cycles_per_neuron", sp.energy.cycles_per_neuron);
    s.get("cycles_per_decode_add", sp.energy.cycles_per_decode_add);
    s.get("cycles_tick_overhead", sp.energy.cycles_tick_overhead);
    double mhz = static_cast<double>(sp.energy.freq_hz) / 1e6;
    s.get("freq_mhz", mhz);
    sp.energy.freq_hz = mhz_to_hz(mhz);
    if (auto sig = s.child("signal")) {
        std::string kind = "ramp";
        sig->get("kind", kind);
        if (kind == "ramp") {
            nb.signal.kind = NefSignal::Kind::Ramp;
        } else if (kind == "constant") {
            nb.signal.kind = NefSignal::Kind::Constant;
        } else if (kind == "sine") {
            nb.signal.kind = NefSignal::Kind::Sine;
        } else {
            throw ConfigError(sig->at("kind"), "expected ramp, constant or sine");
        }
        sig->get("from", nb.signal.from);
        sig->get("to", nb.signal.to);
        sig->get("duration_ms", nb.signal.duration_ms);
        sig->finish();
    }
}

void read_dnn(Section &s, DnnBenchmark &db)
{
    if (const json *layers = s.raw("layers")) {
        if (!layers->is_array() || layers->empty()) {
            throw ConfigError(s.at("layers"), "expected a nonempty array of layers");
        }
        db.layers.clear();
        for (std::size_t i = 0; i < layers->size(); ++i) {
            Section ls((*layers)[i], s.at("layers") + "[" + std::to_string(i) + "]");
            DnnLayerSpec l;
            ls.get("name", l.name);
            std::string mode = "MM";
            ls.get("mode", mode);
            if (mode == "MM" || mode == "mm") {
                l.mode = MacMode::MM;
            } else if (mode == "CONV" || mode == "conv") {
                l.mode = MacMode::CONV;
            } else {
                throw ConfigError(ls.at("mode"), "expected MM or CONV");
            }
            ls.get("m", l.m);
            ls.get("k", l.k);
            ls.get("n", l.n);
            ls.get("h", l.h);
            ls.get("w", l.w);
            ls.get("c", l.c);
            ls.get("r", l.r);
            ls.get("s", l.s);
            ls.get("f", l.f);
            ls.get("stride", l.conv.stride);
            ls.get("pad", l.conv.pad);
            ls.get("repeat", l.repeat);
            ls.finish();
            if (l.name.empty()) {
                l.name = "layer" + std::to_string(i);
            }
            db.layers.push_back(l);
        }
    }
    s.get("conv_cycles_per_mac", db.baseline.conv_cycles_per_mac);
    s.get("mm_cycles_per_mac", db.baseline.mm_cycles_per_mac);
    s.get("cycles_per_output", db.baseline.cycles_per_output);
    s.get("setup_cycles", db.mac.setup_cycles);
    s.get("transfer_penalty", db.mac.transfer_penalty);
    double mhz = static_cast<double>(db.freq_hz) / 1e6;
    s.get("freq_mhz", mhz);
    db.freq_hz = mhz_to_hz(mhz);
}

void read_benchmark(Section s, SimConfig &c)
{
    auto &b = c.benchmark;
    std::string kind(to_string(b.kind));
    s.get("kind", kind);
    try {
        b.kind = parse_benchmark(kind);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(s.at("kind"), e.what());
    }
    switch (b.kind) {
    case BenchmarkKind::Idle:
        s.get("neurons_per_pe", b.idle.neurons_per_pe);
        break;
    case BenchmarkKind::Synfire:
        read_synfire(s, b.synfire);
        break;
    case BenchmarkKind::Nef:
        read_nef(s, b.nef);
        break;
    case BenchmarkKind::Dnn:
        read_dnn(s, b.dnn);
        break;
    }
    s.finish();
}

void read_output(Section s, SimConfig &c)
{
    s.get("dir", c.output.dir);
    s.get("trace", c.output.trace);
    s.get("trace_packets", c.output.trace_packets);
    s.get("pe_csv", c.output.pe_csv);
    s.get("raster", c.output.raster);
    s.get("energy_sample_interval", c.output.energy_sample_interval);
    s.finish();
}

} // namespace

SimConfig config_from_json(const json &j)
{
    SimConfig c;
    Section root(j, "");
    if (auto s = root.child("topology")) {
        read_topology(*s, c);
    }
    if (auto s = root.child("energy")) {
        read_energy(*s, c);
    }
    if (auto s = root.child("dvfs")) {
        read_dvfs(*s, c);
    }
    if (auto s = root.child("pe")) {
        read_pe(*s, c);
    }
    if (auto s = root.child("neuron")) {
        read_neuron(*s, c);
    }
    if (auto s = root.child("router")) {
        read_router(*s, c);
    }
    if (auto s = root.child("benchmark")) {
        read_benchmark(*s, c);
    }
    root.get("ticks", c.ticks);
    std::string mode(to_string(c.mode));
    root.get("mode", mode);
    try {
        c.mode = parse_mode(mode);
    } catch (const std::invalid_argument &e) {
        throw ConfigError("mode", e.what());
    }
    root.get("rng_seed", c.rng_seed);
    if (auto s = root.child("output")) {
        read_output(*s, c);
    }
    root.finish();
    validate(c);
    return c;
}

namespace {

void require(bool ok, const std::string &path, const std::string &what)
{
    if (!ok) {
        throw ConfigError(path, what);
    }
}

} // namespace

void validate(const SimConfig &c)
{
    const auto &t = c.topology;
    require(t.mesh_x >= 1 && t.mesh_x <= 16, "topology.mesh_x", "must be in [1, 16]");
    require(t.mesh_y >= 1 && t.mesh_y <= 16, "topology.mesh_y", "must be in [1, 16]");
    require(t.pes_per_qpe == kPesPerQpe, "topology.pes_per_qpe", "must be 4");
    require(t.n_pes >= 1 && t.n_pes <= t.mesh_x * t.mesh_y * kPesPerQpe, "topology.n_pes",
            "must be in [1, 4 * mesh nodes]");
    require(t.noc.fifo_depth >= 1, "topology.fifo_depth", "must be positive");
    require(t.noc.hop_latency >= 1, "topology.hop_latency", "must be positive");
    require(t.spinn_router_qpe >= 0 && t.spinn_router_qpe < t.mesh_x * t.mesh_y, "topology.spinn_router_qpe",
            "must name a QPE of the mesh");

    for (std::size_t i = 0; i < kNumPls; ++i) {
        const auto &e = c.energy.pl[i];
        const std::string idx = "[" + std::to_string(i) + "]";
        require(e.p_bl_mw > 0.0, "energy.p_bl_mw" + idx, "must be positive");
        require(e.e_neur_nj > 0.0, "energy.e_neur_nj" + idx, "must be positive");
        require(e.e_syn_nj > 0.0, "energy.e_syn_nj" + idx, "must be positive");
        require(c.levels[i].freq_hz > 0, "dvfs.levels" + idx + ".freq_mhz", "must be positive");
        require(c.levels[i].vdd > 0.0, "dvfs.levels" + idx + ".vdd", "must be positive");
    }
    require(c.energy.t_sys_ms > 0.0, "energy.t_sys_ms", "must be positive");
    require(c.energy.noc_hop_energy_pj >= 0.0, "energy.noc_hop_energy_pj", "must be non-negative");
    require(c.mac_energy.e_mac_pj > 0.0, "energy.e_mac_pj", "must be positive");
    require(c.dvfs.l_th1 >= 0, "dvfs.l_th1", "must be non-negative");
    require(c.dvfs.l_th2 > c.dvfs.l_th1, "dvfs.l_th2", "thresholds must be strictly increasing (l_th1 < l_th2)");

    require(c.pe.cycles_tick_overhead >= 1, "pe.cycles_tick_overhead", "must be >= 1");
    require(c.pe.cycles_per_neuron >= 1, "pe.cycles_per_neuron", "must be >= 1");
    require(c.pe.cycles_per_syn_event >= 1, "pe.cycles_per_syn_event", "must be >= 1");
    require(c.fifo_capacity >= 1, "pe.fifo_capacity", "must be positive");

    require(c.neuron.tau_m_ms > 0.0, "neuron.tau_m_ms", "must be positive");
    require(c.neuron.v_th > c.neuron.v_reset, "neuron.v_th", "must exceed v_reset");
    require(c.neuron.r > 0.0, "neuron.r", "must be positive");
    require(c.neuron.refractory_ticks >= 0, "neuron.refractory_ticks", "must be non-negative");
    require(c.neuron.tau_syn_ms >= 0.0, "neuron.tau_syn_ms", "must be non-negative");

    require(c.router.drop_timeout >= 1, "router.drop_timeout", "must be positive");
    require(c.router.table_capacity >= 1, "router.table_capacity", "must be positive");
    require(c.router.default_link >= 0 && c.router.default_link < kNumLinks, "router.default_link",
            "must be in [0, 5]");
    require(c.router.link_cycles_per_packet >= 1, "router.link_cycles_per_packet", "must be positive");

    require(c.ticks >= 0, "ticks", "must be non-negative");
    require(c.output.energy_sample_interval >= 1, "output.energy_sample_interval", "must be positive");

    const auto &b = c.benchmark;
    try {
        switch (b.kind) {
        case BenchmarkKind::Idle:
            require(b.idle.neurons_per_pe >= 0, "benchmark.neurons_per_pe", "must be non-negative");
            break;
        case BenchmarkKind::Synfire: {
            SynfireSpec s = b.synfire;
            s.n_pes = t.n_pes;
            validate(s);
            break;
        }
        case BenchmarkKind::Nef:
            validate(b.nef.spec);
            require(b.nef.signal.duration_ms > 0.0, "benchmark.signal.duration_ms", "must be positive");
            break;
        case BenchmarkKind::Dnn:
            require(b.dnn.freq_hz > 0, "benchmark.freq_mhz", "must be positive");
            require(b.dnn.mac.setup_cycles >= 0, "benchmark.setup_cycles", "must be non-negative");
            for (std::size_t i = 0; i < b.dnn.layers.size(); ++i) {
                const auto &l = b.dnn.layers[i];
                const std::string p = "benchmark.layers[" + std::to_string(i) + "]";
                require(l.repeat >= 1, p + ".repeat", "must be >= 1");
                try {
                    check_sram(l);
                    if (l.mode == MacMode::MM) {
                        (void)mm_timing(l.m, l.k, l.n);
                    } else {
                        (void)conv_timing(ConvShape{l.h, l.w, l.c, l.r, l.s, l.f, l.conv});
                    }
                } catch (const MacError &e) {
                    throw ConfigError(p, e.what());
                }
            }
            break;
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError("benchmark", e.what());
    }
}

namespace {

// Shortest decimal that round-trips the float, so 1.2F is written as 1.2.
double float_json(float v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    double d = 0.0;
    std::from_chars(buf, r.ptr, d);
    return d;
}

} // namespace

json config_to_json(const SimConfig &c)
{
    json j;
    const auto &t = c.topology;
    j["topology"] = {{"mesh_x", t.mesh_x},
                     {"mesh_y", t.mesh_y},
                     {"n_pes", t.n_pes},
                     {"pes_per_qpe", t.pes_per_qpe},
                     {"fifo_depth", t.noc.fifo_depth},
                     {"hop_latency", t.noc.hop_latency},
                     {"spinn_router_qpe", t.spinn_router_qpe}};
    json p = json::array(), en = json::array(), es = json::array(), lv = json::array();
    for (std::size_t i = 0; i < kNumPls; ++i) {
        p.push_back(c.energy.pl[i].p_bl_mw);
        en.push_back(c.energy.pl[i].e_neur_nj);
        es.push_back(c.energy.pl[i].e_syn_nj);
        lv.push_back({{"vdd", c.levels[i].vdd}, {"freq_mhz", static_cast<double>(c.levels[i].freq_hz) / 1e6}});
    }
    j["energy"] = {{"p_bl_mw", p},
                   {"e_neur_nj", en},
                   {"e_syn_nj", es},
                   {"t_sys_ms", c.energy.t_sys_ms},
                   {"noc_hop_energy_pj", c.energy.noc_hop_energy_pj},
                   {"e_mac_pj", c.mac_energy.e_mac_pj}};
    j["dvfs"] = {{"l_th1", c.dvfs.l_th1}, {"l_th2", c.dvfs.l_th2}, {"levels", lv}};
    j["pe"] = {{"cycles_tick_overhead", c.pe.cycles_tick_overhead},
               {"cycles_per_neuron", c.pe.cycles_per_neuron},
               {"cycles_per_syn_event", c.pe.cycles_per_syn_event},
               {"fifo_capacity", c.fifo_capacity}};
    j["neuron"] = {{"tau_m_ms", c.neuron.tau_m_ms}, {"v_rest", c.neuron.v_rest},
                   {"v_th", c.neuron.v_th},         {"v_reset", c.neuron.v_reset},
                   {"r", c.neuron.r},               {"refractory_ticks", c.neuron.refractory_ticks},
                   {"tau_syn_ms", c.neuron.tau_syn_ms}};
    j["router"] = {{"drop_timeout", c.router.drop_timeout},
                   {"table_capacity", c.router.table_capacity},
                   {"default_route", c.router.default_route == DefaultRoutePolicy::Fixed ? "fixed" : "opposite"},
                   {"default_link", c.router.default_link},
                   {"link_cycles_per_packet", c.router.link_cycles_per_packet}};

    const auto &b = c.benchmark;
    json bj = {{"kind", std::string(to_string(b.kind))}};
    switch (b.kind) {
    case BenchmarkKind::Idle:
        bj["neurons_per_pe"] = b.idle.neurons_per_pe;
        break;
    case BenchmarkKind::Synfire: {
        const auto &s = b.synfire;
        bj.update({{"exc_per_layer", s.exc_per_layer},
                   {"inh_per_layer", s.inh_per_layer},
                   {"fanin_exc", s.fanin_exc},
                   {"fanin_inh", s.fanin_inh},
                   {"delay_inh_to_exc", s.delay_inh_to_exc},
                   {"delay_exc_to_next", s.delay_exc_to_next},
                   {"w_exc", float_json(s.w_exc)},
                   {"w_inh", float_json(s.w_inh)},
                   {"noise_mu", s.noise_mu},
                   {"noise_sigma", s.noise_sigma},
                   {"stimulus",
                    {{"spikes", s.stimulus.spikes},
                     {"jitter_ms", s.stimulus.jitter_ms},
                     {"center_tick", s.stimulus.center_tick},
                     {"weight", float_json(s.stimulus.weight)}}}});
        break;
    }
    case BenchmarkKind::Nef: {
        const auto &s = b.nef.spec;
        const char *kinds[] = {"ramp", "constant", "sine"};
        bj.update({{"n_neurons", s.n_neurons},
                   {"dims", s.dims},
                   {"tau_rc_ms", s.tau_rc_ms},
                   {"refractory_ticks", s.refractory_ticks},
                   {"max_rate_lo", s.max_rate_lo},
                   {"max_rate_hi", s.max_rate_hi},
                   {"intercept_lo", s.intercept_lo},
                   {"intercept_hi", s.intercept_hi},
                   {"tau_syn_ms", s.tau_syn_ms},
                   {"reg", s.reg},
                   {"eval_points", s.eval_points},
                   {"e_cycle_pj", s.energy.e_cycle_pj},
                   {"cycles_per_neuron", s.energy.cycles_per_neuron},
                   {"cycles_per_decode_add", s.energy.cycles_per_decode_add},
                   {"cycles_tick_overhead", s.energy.cycles_tick_overhead},
                   {"freq_mhz", static_cast<double>(s.energy.freq_hz) / 1e6},
                   {"signal",
                    {{"kind", kinds[static_cast<int>(b.nef.signal.kind)]},
                     {"from", b.nef.signal.from},
                     {"to", b.nef.signal.to},
                     {"duration_ms", b.nef.signal.duration_ms}}}});
        break;
    }
    case BenchmarkKind::Dnn: {
        json layers = json::array();
        for (const auto &l : b.dnn.layers) {
            json lj = {{"name", l.name}, {"mode", std::string(to_string(l.mode))}, {"repeat", l.repeat}};
            if (l.mode == MacMode::MM) {
                lj.update({{"m", l.m}, {"k", l.k}, {"n", l.n}});
            } else {
                lj.update({{"h", l.h},
                           {"w", l.w},
                           {"c", l.c},
                           {"r", l.r},
                           {"s", l.s},
                           {"f", l.f},
                           {"stride", l.conv.stride},
                           {"pad", l.conv.pad}});
            }
            layers.push_back(lj);
        }
        bj.update({{"layers", layers},
                   {"conv_cycles_per_mac", b.dnn.baseline.conv_cycles_per_mac},
                   {"mm_cycles_per_mac", b.dnn.baseline.mm_cycles_per_mac},
                   {"cycles_per_output", b.dnn.baseline.cycles_per_output},
                   {"setup_cycles", b.dnn.mac.setup_cycles},
                   {"transfer_penalty", b.dnn.mac.transfer_penalty},
                   {"freq_mhz", static_cast<double>(b.dnn.freq_hz) / 1e6}});
        break;
    }
    }
    j["benchmark"] = bj;
    j["ticks"] = c.ticks;
    j["mode"] = std::string(to_string(c.mode));
    j["rng_seed"] = c.rng_seed;
    j["output"] = {{"dir", c.output.dir},
                   {"trace", c.output.trace},
                   {"trace_packets", c.output.trace_packets},
                   {"pe_csv", c.output.pe_csv},
                   {"raster", c.output.raster},
                   {"energy_sample_interval", c.output.energy_sample_interval}};
    return j;
}

SimConfig load_config(const std::filesystem::path &file)
{
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open config file " + file.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

void set_json_path(json &doc, const std::string &dotted, const std::string &value)
{
    if (dotted.empty()) {
        throw std::invalid_argument("empty parameter path");
    }
    json *node = &doc;
    std::stringstream ss(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            throw std::invalid_argument("bad parameter path '" + dotted + "'");
        }
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object() && !node->is_null()) {
            throw std::invalid_argument("parameter path '" + dotted + "' crosses a non-object");
        }
        node = &(*node)[parts[i]];
    }
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error &) {
        v = value;
    }
    (*node)[parts.back()] = v;
}

SimConfig synfire_config()
{
    SimConfig c;
    c.benchmark.kind = BenchmarkKind::Synfire;
    // Per-level capacity lines up with the FIFO thresholds: 17 spikes fit in
    // one tick at PL1 and 59 at PL2 for the synfire fan-out mix.
    c.pe.cycles_per_neuron = 200;
    c.pe.cycles_per_syn_event = 30;
    c.neuron = c.benchmark.synfire.lif;
    c.ticks = 10000;
    return c;
}

} // namespace s2sim
