#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "s2sim/cli.hpp"
#include "s2sim/report.hpp"

using namespace s2sim;
namespace fs = std::filesystem;

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "s2sim");
    std::vector<char *> argv;
    for (auto &a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp(const std::string &name)
{
    const auto p = fs::temp_directory_path() / ("s2sim_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string source_dir = S2SIM_SOURCE_DIR;

} // namespace

TEST_CASE("run writes a report with total power", "[cli]")
{
    const auto out = tmp("run");
    const auto r = cli({"run", "--benchmark", "synfire", "--mode", "dvfs", "--ticks", "300", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    REQUIRE(fs::exists(out / "trace.csv"));
    std::ifstream in(out / "report.csv");
    const auto m = MetricTable::read_csv(in);
    REQUIRE(m.find("total_power_mW").has_value());
    REQUIRE(m.at("ticks") == 300);
    REQUIRE(r.out.find("total_power_mW") != std::string::npos);

    const auto again = tmp("run2");
    REQUIRE(cli({"run", "--benchmark", "synfire", "--mode", "dvfs", "--ticks", "300", "--out", again.string()}).code ==
            kExitOk);
    for (const char *f : {"trace.csv", "report.csv", "raster.csv", "pe_ticks.csv"}) {
        REQUIRE(slurp(out / f) == slurp(again / f));
    }
    fs::remove_all(out);
    fs::remove_all(again);
}

TEST_CASE("baseline report compares the two modes", "[cli]")
{
    const auto out = tmp("baseline");
    const auto r = cli({"run", source_dir + "/configs/synfire.json", "--ticks", "200", "--no-trace", "--out",
                        out.string(), "--baseline-report", (out / "power.csv").string()});
    REQUIRE(r.code == kExitOk);
    REQUIRE_FALSE(fs::exists(out / "trace.csv"));
    const auto power = slurp(out / "power.csv");
    REQUIRE(power.rfind("component,only_pl3_mW,dvfs_mW,reduction_pct\nbaseline,", 0) == 0);
    const auto value = power.find("baseline,") + 9;
    REQUIRE(std::stod(power.substr(value, power.find(',', value) - value)) == Catch::Approx(66.44).epsilon(1e-9));
    REQUIRE(fs::exists(out / "table3_reference.csv"));
    REQUIRE(cli({"run", "--mode", "pl1", "--ticks", "2", "--out", out.string(), "--baseline-report",
                 (out / "p.csv").string()})
                .code == kExitBadConfig);
    fs::remove_all(out);
}

TEST_CASE("exit codes", "[cli][errors]")
{
    REQUIRE(cli({"run", "/nonexistent/config.json"}).code == kExitMissingFile);

    const auto dir = tmp("bad");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"dvfs": {"l_th1": 70, "l_th2": 59}})";
    const auto bad = cli({"run", (dir / "bad.json").string(), "--out", (dir / "o").string()});
    REQUIRE(bad.code == kExitBadConfig);
    REQUIRE(bad.err.find("dvfs.l_th2") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{";
    REQUIRE(cli({"run", (dir / "broken.json").string()}).code == kExitBadConfig);
    REQUIRE(cli({"run", "--mode", "turbo"}).code == kExitBadConfig);
    REQUIRE(cli({}).code == kExitFailure);
    REQUIRE(cli({"frobnicate"}).code == kExitFailure);
    REQUIRE(cli({"--help"}).code == kExitOk);
    fs::remove_all(dir);
}

TEST_CASE("output directory from the environment", "[cli]")
{
    const auto dir = tmp("env");
    ::setenv("S2SIM_OUT_DIR", dir.string().c_str(), 1);
    const auto r = cli({"run", "--ticks", "3"});
    ::unsetenv("S2SIM_OUT_DIR");
    REQUIRE(r.code == kExitOk);
    REQUIRE(fs::exists(dir / "report.csv"));
    fs::remove_all(dir);
}

TEST_CASE("verify passes on the committed vectors and names corruption", "[cli][verify]")
{
    const auto ok = cli({"verify", source_dir + "/golden"});
    REQUIRE(ok.code == kExitOk);

    const auto dir = tmp("golden");
    fs::create_directories(dir);
    std::string text = slurp(source_dir + "/golden/packets.csv");
    // Flip the last hex digit of the first vector.
    const auto eol = text.find('\n', text.find('\n') + 1);
    text[eol - 1] = text[eol - 1] == '0' ? '1' : '0';
    std::ofstream(dir / "packets.csv", std::ios::binary) << text;
    const auto bad = cli({"verify", dir.string()});
    REQUIRE(bad.code == kExitFailure);
    REQUIRE(bad.out.find("FAIL golden: ") != std::string::npos);

    REQUIRE(cli({"verify", (dir / "missing").string()}).code == kExitMissingFile);
    REQUIRE(cli({"verify", (dir / "regen").string(), "--write-golden"}).code == kExitOk);
    REQUIRE(slurp(dir / "regen" / "packets.csv") == slurp(source_dir + "/golden/packets.csv"));
    fs::remove_all(dir);
}

TEST_CASE("tables print the model parameters", "[cli]")
{
    const auto r = cli({"tables"});
    REQUIRE(r.code == kExitOk);
    REQUIRE(r.out.find("22.38") != std::string::npos);
    REQUIRE(r.out.find("66.44") != std::string::npos);
    REQUIRE(r.out.find("synapses per core        20000") != std::string::npos);
    REQUIRE(r.out.find("avg. fan-out             80") != std::string::npos);
}

TEST_CASE("sweep writes a summary row per grid point", "[cli][sweep]")
{
    const auto out = tmp("sweep");
    const auto r = cli({"sweep", "--set", "ticks=5,6", "--set", "benchmark.neurons_per_pe=0,10", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(out / "sweep_summary.csv");
    std::string header;
    std::getline(in, header);
    REQUIRE(header.rfind("run,ticks,benchmark.neurons_per_pe,", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
    }
    REQUIRE(rows == 4);
    REQUIRE(fs::exists(out / "run_003" / "report.csv"));
    fs::remove_all(out);
}
