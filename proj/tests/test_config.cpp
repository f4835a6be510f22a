#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>


#include "s2sim/config.hpp"

using namespace s2sim;
using nlohmann::json;

namespace {

std::string error_path(const json &j)
{
    try {
        (void)config_from_json(j);
    } catch (const ConfigError &e) {
        return e.path();
    }
    return "<none>";
}

} // namespace

TEST_CASE("defaults and empty document", "[config]")
{
    const auto c = config_from_json(json::object());
    REQUIRE(c.energy.at(PlId::PL1).p_bl_mw == 22.38);
    REQUIRE(c.dvfs.l_th1 == 17);
    REQUIRE(c.dvfs.l_th2 == 59);
    REQUIRE(c.levels[2].freq_hz == 400'000'000);
    REQUIRE(c.mode == PlMode::Dvfs);
    REQUIRE_NOTHROW(validate(c));
}

TEST_CASE("JSON round trip", "[config]")
{
    for (const SimConfig &c : {SimConfig{}, synfire_config()}) {
        const json j = config_to_json(c);
        const SimConfig back = config_from_json(j);
        REQUIRE(config_to_json(back) == j);
    }
    SimConfig n;
    n.benchmark.kind = BenchmarkKind::Nef;
    n.benchmark.nef.signal.kind = NefSignal::Kind::Sine;
    REQUIRE(config_to_json(config_from_json(config_to_json(n))) == config_to_json(n));
    SimConfig d;
    d.benchmark.kind = BenchmarkKind::Dnn;
    REQUIRE(config_to_json(config_from_json(config_to_json(d))) == config_to_json(d));
}

TEST_CASE("shipped configs load", "[config]")
{
    const std::filesystem::path dir = std::filesystem::path(S2SIM_SOURCE_DIR) / "configs";
    for (const char *name : {"synfire.json", "nef.json", "dnn.json", "idle.json"}) {
        INFO(name);
        REQUIRE_NOTHROW(load_config(dir / name));
    }
    const auto s = load_config(dir / "synfire.json");
    REQUIRE(config_to_json(s) == config_to_json(synfire_config()));
}

TEST_CASE("errors name the offending field", "[config][errors]")
{
    REQUIRE(error_path(json{{"dvfs", {{"l_th1", 60}, {"l_th2", 59}}}}) == "dvfs.l_th2");
    REQUIRE(error_path(json{{"dvfs", {{"l_th1", -1}}}}) == "dvfs.l_th1");
    REQUIRE(error_path(json{{"bogus", 1}}) == "bogus");
    REQUIRE(error_path(json{{"pe", {{"cycles_per_neuron", "many"}}}}) == "pe.cycles_per_neuron");
    REQUIRE(error_path(json{{"energy", {{"p_bl_mw", {1.0, 2.0}}}}}) == "energy.p_bl_mw");
    REQUIRE(error_path(json{{"energy", {{"p_bl_mw", {1.0, -2.0, 3.0}}}}}) == "energy.p_bl_mw[1]");
    REQUIRE(error_path(json{{"mode", "turbo"}}) == "mode");
    REQUIRE(error_path(json{{"benchmark", {{"kind", "synfire"}, {"w_exc", "x"}}}}) == "benchmark.w_exc");
    REQUIRE(error_path(json{{"benchmark", {{"kind", "idle"}, {"w_exc", 1.0}}}}) == "benchmark.w_exc");
    REQUIRE(error_path(json{{"topology", {{"n_pes", 99}}}}) == "topology.n_pes");
    REQUIRE(error_path(json{{"ticks", -5}}) == "ticks");
    REQUIRE(error_path(json::array()) == "<root>");
    REQUIRE(error_path(json{{"benchmark",
                             {{"kind", "dnn"}, {"layers", {{{"mode", "MM"}, {"m", 1000}, {"k", 1000}, {"n", 1000}}}}}}}) ==
            "benchmark.layers[0]");
}

TEST_CASE("malformed and missing files", "[config][errors]")
{
    const auto tmp = std::filesystem::temp_directory_path() / "s2sim_cfg_bad.json";
    std::ofstream(tmp) << "{ \"ticks\": ";
    try {
        (void)load_config(tmp);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        REQUIRE(e.path() == "<root>");
    }
    std::filesystem::remove(tmp);
    REQUIRE_THROWS(load_config("/nonexistent/s2sim.json"));
}

TEST_CASE("dotted parameter overrides", "[config]")
{
    json doc = json::object();
    set_json_path(doc, "benchmark.w_exc", "1.5");
    set_json_path(doc, "benchmark.kind", "synfire");
    set_json_path(doc, "output.trace", "false");
    set_json_path(doc, "ticks", "20");
    REQUIRE(doc["benchmark"]["w_exc"] == 1.5);
    REQUIRE(doc["benchmark"]["kind"] == "synfire");
    REQUIRE(doc["output"]["trace"] == false);
    REQUIRE(doc["ticks"] == 20);
    const auto c = config_from_json(doc);
    REQUIRE(c.benchmark.synfire.w_exc == 1.5F);
    REQUIRE_THROWS(set_json_path(doc, "", "1"));
    REQUIRE_THROWS(set_json_path(doc, "a..b", "1"));
    REQUIRE_THROWS(set_json_path(doc, "ticks.x", "1"));
}

TEST_CASE("mode and benchmark names", "[config]")
{
    REQUIRE(parse_mode("pl3") == PlMode::OnlyPl3);
    REQUIRE(parse_benchmark("nef") == BenchmarkKind::Nef);
    REQUIRE_THROWS(parse_mode("PL3"));
    REQUIRE_THROWS(parse_benchmark("vgg"));
}
