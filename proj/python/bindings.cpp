// Python module s2sim._core. Configs and reports cross the boundary as
// JSON text; the package __init__ converts them to dicts.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "s2sim/bench/synfire.hpp"
#include "s2sim/cli.hpp"
#include "s2sim/config.hpp"
#include "s2sim/energy.hpp"
#include "s2sim/engine.hpp"
#include "s2sim/mac.hpp"
#include "s2sim/packets.hpp"
#include "s2sim/verify.hpp"

namespace py = pybind11;
using namespace s2sim;
using nlohmann::json;

namespace {

json metrics_json(const MetricTable &m)
{
    json j = json::object();
    for (const auto &row : m.rows()) {
        j[row.name] = row.value;
    }
    return j;
}

SimConfig parse_config(const std::string &text) { return config_from_json(json::parse(text)); }

std::string run_config(const std::string &config_json, const std::string &out_dir)
{
    const SimConfig c = parse_config(config_json);
    SimReport rep;
    {
        py::gil_scoped_release release;
        rep = out_dir.empty() ? run_simulation(c) : run_to_directory(c, out_dir);
    }
    json j;
    j["metrics"] = metrics_json(rep.metrics);
    j["pl_ticks"] = rep.pl_ticks;
    j["spikes"] = rep.raster.size();
    return j.dump();
}

std::string compare(const std::string &config_json)
{
    const SimConfig c = parse_config(config_json);
    Comparison cmp;
    {
        py::gil_scoped_release release;
        cmp = compare_modes(c);
    }
    json j;
    j["dvfs"] = metrics_json(cmp.dvfs.metrics);
    j["pl3"] = metrics_json(cmp.pl3.metrics);
    j["reductions"] = {{"baseline_pct", cmp.reductions.baseline_pct},
                       {"neuron_pct", cmp.reductions.neuron_pct},
                       {"synapse_pct", cmp.reductions.synapse_pct},
                       {"total_pct", cmp.reductions.total_pct}};
    return j.dump();
}

py::dict energy(int pl, double t_sp_s, std::int64_t n_neur, std::int64_t n_syn, bool stay_at_level)
{
    if (pl < 1 || pl > kNumPls) {
        throw py::value_error("pl must be 1, 2 or 3");
    }
    const auto e = energy_cycle(static_cast<PlId>(pl), t_sp_s, n_neur, n_syn, EnergyParams{},
                                stay_at_level ? SleepMode::StayAtLevel : SleepMode::ReturnToPl1);
    py::dict d;
    d["baseline_j"] = e.components.baseline_j;
    d["neuron_j"] = e.components.neuron_j;
    d["synapse_j"] = e.components.synapse_j;
    d["total_j"] = e.components.total_j();
    d["clamped"] = e.clamped;
    return d;
}

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Mat8 to_mat(const U8Array &a)
{
    if (a.ndim() != 2) {
        throw py::value_error("expected a 2-D uint8 array");
    }
    Mat8 m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

py::array_t<std::uint32_t> matmul(const U8Array &a, const U8Array &b)
{
    const Mat32 c = mm_execute(to_mat(a), to_mat(b));
    py::array_t<std::uint32_t> out({c.rows, c.cols});
    std::copy(c.data.begin(), c.data.end(), out.mutable_data());
    return out;
}

py::array_t<std::uint32_t> conv2d(const U8Array &ifmap, const U8Array &kernel, std::size_t stride, std::size_t pad)
{
    if (ifmap.ndim() != 3 || kernel.ndim() != 4) {
        throw py::value_error("expected ifmap H x W x C and kernel R x S x C x F");
    }
    Tensor8 in(static_cast<std::size_t>(ifmap.shape(0)), static_cast<std::size_t>(ifmap.shape(1)),
               static_cast<std::size_t>(ifmap.shape(2)));
    std::copy(ifmap.data(), ifmap.data() + ifmap.size(), in.data.begin());
    Kernel8 k(static_cast<std::size_t>(kernel.shape(0)), static_cast<std::size_t>(kernel.shape(1)),
              static_cast<std::size_t>(kernel.shape(2)), static_cast<std::size_t>(kernel.shape(3)));
    std::copy(kernel.data(), kernel.data() + kernel.size(), k.data.begin());
    const Tensor32 t = conv_execute(in, k, ConvParams{stride, pad});
    py::array_t<std::uint32_t> out({t.h, t.w, t.c});
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

py::dict dnoc_to_dict(const DNocPacket &p)
{
    py::dict d;
    d["dest_x"] = p.dest_x;
    d["dest_y"] = p.dest_y;
    d["dest_pe_mask"] = p.dest_pe_mask;
    d["packet_class"] = static_cast<int>(p.packet_class);
    d["cmd"] = p.cmd;
    d["tag"] = p.tag;
    d["address"] = p.address;
    d["payload"] = std::vector<std::uint32_t>(p.payload.begin(), p.payload.begin() + p.payload_len);
    return d;
}

DNocPacket dnoc_from_dict(const py::dict &d)
{
    DNocPacket p;
    auto get = [&d](const char *k, auto dflt) {
        return d.contains(k) ? d[k].cast<decltype(dflt)>() : dflt;
    };
    p.dest_x = static_cast<std::uint8_t>(get("dest_x", 0));
    p.dest_y = static_cast<std::uint8_t>(get("dest_y", 0));
    p.dest_pe_mask = static_cast<std::uint8_t>(get("dest_pe_mask", 0));
    p.packet_class = static_cast<PacketClass>(get("packet_class", 0));
    p.cmd = static_cast<std::uint8_t>(get("cmd", 0));
    p.tag = static_cast<std::uint8_t>(get("tag", 0));
    p.address = get("address", std::uint32_t{0});
    const auto payload = get("payload", std::vector<std::uint32_t>{});
    if (payload.size() > kMaxPayloadWords) {
        throw py::value_error("payload holds at most 4 words");
    }
    p.payload_len = static_cast<std::uint8_t>(payload.size());
    std::copy(payload.begin(), payload.end(), p.payload.begin());
    return p;
}

py::dict spinn_to_dict(const SpinnPacket &p)
{
    py::dict d;
    d["kind"] = static_cast<int>(p.kind);
    d["timestamp"] = p.timestamp;
    d["emergency"] = p.emergency;
    d["key"] = p.key_or_addr;
    d["payload"] = p.payload ? py::object(py::int_(*p.payload)) : py::object(py::none());
    return d;
}

SpinnPacket spinn_from_dict(const py::dict &d)
{
    SpinnPacket p;
    p.kind = static_cast<SpinnKind>(d.contains("kind") ? d["kind"].cast<int>() : 0);
    p.timestamp = static_cast<std::uint8_t>(d.contains("timestamp") ? d["timestamp"].cast<int>() : 0);
    p.emergency = static_cast<std::uint8_t>(d.contains("emergency") ? d["emergency"].cast<int>() : 0);
    p.key_or_addr = d.contains("key") ? d["key"].cast<std::uint32_t>() : 0U;
    if (d.contains("payload") && !d["payload"].is_none()) {
        p.payload = d["payload"].cast<std::uint32_t>();
    }
    return p;
}

py::tuple cli(const std::vector<std::string> &args)
{
    std::vector<std::string> argv_s{"s2sim"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : argv_s) {
        argv.push_back(a.data());
    }
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "SpiNNaker2 prototype simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PacketError>(m, "PacketError", PyExc_ValueError);
    py::register_exception<MacError>(m, "MacError", PyExc_ValueError);

    m.def("default_config_json", [] { return config_to_json(SimConfig{}).dump(); });
    m.def("synfire_config_json", [] { return config_to_json(synfire_config()).dump(); });
    m.def("normalize_config_json", [](const std::string &j) { return config_to_json(parse_config(j)).dump(); });
    m.def("run_json", &run_config, py::arg("config_json"), py::arg("out_dir") = "");
    m.def("compare_modes_json", &compare, py::arg("config_json"));

    m.def("energy_cycle", &energy, py::arg("pl"), py::arg("t_sp_s"), py::arg("n_neur"), py::arg("n_syn"),
          py::arg("stay_at_level") = false);
    m.def(
        "nef_synops",
        [](std::uint64_t n, std::uint64_t d, std::uint64_t spikes, bool equivalent) {
            return nef_synops(n, d, spikes, equivalent ? SynopMode::Equivalent : SynopMode::Hardware);
        },
        py::arg("n"), py::arg("d"), py::arg("spikes"), py::arg("equivalent") = false);

    m.def("matmul", &matmul, py::arg("a"), py::arg("b"));
    m.def("conv2d", &conv2d, py::arg("ifmap"), py::arg("kernel"), py::arg("stride") = 1, py::arg("pad") = 0);
    m.def("peak_gops", [](std::int64_t hz) { return mac_peak_throughput(hz).ops_per_s * 1e-9; }, py::arg("freq_hz"));

    m.def("encode_dnoc", [](const py::dict &d) { return encode_dnoc(dnoc_from_dict(d)).to_hex(); });
    m.def("decode_dnoc", [](const std::string &hex) { return dnoc_to_dict(decode_dnoc(BitVector::from_hex(hex))); });
    m.def("encode_spinn", [](const py::dict &d) { return encode_spinn(spinn_from_dict(d)).to_hex(); });
    m.def("decode_spinn",
          [](const std::string &hex) { return spinn_to_dict(decode_spinn(BitVector::from_hex(hex))); });

    m.def(
        "synfire_structure",
        [](std::uint64_t seed) {
            const auto net = build_synfire(SynfireSpec{}, seed);
            return py::make_tuple(net.ring_synapses, net.average_fanout());
        },
        py::arg("seed"));

    m.def("cli", &cli, py::arg("args"));
}
