#include <catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "s2sim/pe.hpp"
#include "s2sim/rng.hpp"

using namespace s2sim;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

// Nearest s16.15 value of a high-precision real, or nullopt when it does not fit.
std::optional<std::int32_t> nearest_fixed(const Big &v)
{
    const Big scaled = v * 32768;
    const Big r = boost::multiprecision::round(scaled);
    if (r > Big(2147483647) || r < Big(-2147483648.0)) {
        return std::nullopt;
    }
    return static_cast<std::int32_t>(r.convert_to<long long>());
}

PeProgram one_neuron_program(std::uint32_t n = 1)
{
    PeProgram p;
    p.n_neurons = n;
    for (std::uint32_t i = 0; i < n; ++i) {
        p.neuron_keys.push_back(0x100 + i);
    }
    return p;
}

} // namespace

TEST_CASE("PL selection follows the FIFO thresholds", "[pe][dvfs]")
{
    const DvfsThresholds th;
    REQUIRE(select_pl(10, th) == PlId::PL1);
    REQUIRE(select_pl(17, th) == PlId::PL1);
    REQUIRE(select_pl(18, th) == PlId::PL2);
    REQUIRE(select_pl(30, th) == PlId::PL2);
    REQUIRE(select_pl(59, th) == PlId::PL2);
    REQUIRE(select_pl(60, th) == PlId::PL3);
    REQUIRE(select_pl(100, th) == PlId::PL3);

    PlPolicy pol;
    pol.mode = PlMode::OnlyPl3;
    REQUIRE(pol.choose(0) == PlId::PL3);
    pol.mode = PlMode::OnlyPl1;
    REQUIRE(pol.choose(1000) == PlId::PL1);
    REQUIRE_THROWS(validate(DvfsThresholds{20, 20}));
}

TEST_CASE("LIF rest is a fixed point", "[pe][lif]")
{
    const LifParams p;
    NeuronState n{p.v_rest, 0};
    for (int i = 0; i < 100; ++i) {
        const auto s = lif_step(n, 0.0, p, 1.0);
        REQUIRE_FALSE(s.fired);
        n = s.state;
    }
    REQUIRE(n.v == p.v_rest);
}

TEST_CASE("LIF first spike matches the closed form", "[pe][lif]")
{
    const LifParams p;
    const double gap = p.v_th - p.v_rest;
    for (double current : {15.5, 16.0, 18.3, 25.0, 40.0, 77.7, 150.0}) {
        const double ri = p.r * current;
        const auto expected = static_cast<int>(std::ceil(p.tau_m_ms * std::log(ri / (ri - gap))));
        const LifKernel k(p, 1.0);
        NeuronState n{p.v_rest, 0};
        int tick = 0;
        while (true) {
            ++tick;
            const auto s = k.step(n, current);
            n = s.state;
            if (s.fired) {
                break;
            }
            REQUIRE(tick < 1000);
        }
        INFO("current " << current);
        REQUIRE(tick == expected);
    }
}

TEST_CASE("LIF ignores input while refractory", "[pe][lif]")
{
    const LifParams p;
    const LifKernel k(p, 1.0);
    auto s = k.step(NeuronState{p.v_th - 0.01, 0}, 1000.0);
    REQUIRE(s.fired);
    for (int i = 0; i < p.refractory_ticks; ++i) {
        s = k.step(s.state, 1e6);
        REQUIRE_FALSE(s.fired);
        REQUIRE(s.state.v == p.v_reset);
    }
    REQUIRE(k.step(s.state, 1e6).fired);
}

TEST_CASE("spike FIFO ordering and overflow", "[pe][fifo]")
{
    SpikeFifo f(3);
    REQUIRE(f.push(1, 0));
    REQUIRE(f.push(2, 1));
    REQUIRE(f.push(3, 1));
    REQUIRE_FALSE(f.push(4, 2));
    REQUIRE(f.overflows() == 1);
    REQUIRE(f.count_before(1) == 1);
    REQUIRE(f.count_before(2) == 3);
    const auto d = f.drain_before(1);
    REQUIRE(d.size() == 1);
    REQUIRE(d[0].key == 1);
    REQUIRE_THROWS_AS(f.push(5, 0), std::logic_error);
}

TEST_CASE("exp/log accelerator against 50-digit reference", "[pe][accel]")
{
    REQUIRE(exp_accel(Fixed16_15{0}).value.raw == 32768);
    REQUIRE(log_accel(Fixed16_15{32768}).value.raw == 0);
    REQUIRE(exp_accel(Fixed16_15{32768}).value.raw == 89073);  // e * 2^15 = 89072.6

    RngStream r(3, 3);
    for (int i = 0; i < 5000; ++i) {
        // exp arguments up to about ln(65536)
        const auto raw = static_cast<std::int32_t>(r.below(2 * 11 * 32768)) - 11 * 32768;
        const auto e = exp_accel(Fixed16_15{raw});
        const auto ref = nearest_fixed(boost::multiprecision::exp(Big(raw) / 32768));
        REQUIRE(ref.has_value());
        REQUIRE_FALSE(e.saturated);
        REQUIRE(e.value.raw == *ref);

        const auto lraw = static_cast<std::int32_t>(1 + r.below(0x7FFFFFFF));
        const auto l = log_accel(Fixed16_15{lraw});
        REQUIRE(l.value.raw == *nearest_fixed(boost::multiprecision::log(Big(lraw) / 32768)));
    }
    REQUIRE(exp_accel(Fixed16_15::from_double(12.0)).saturated);
    REQUIRE(log_accel(Fixed16_15{0}).saturated);
    REQUIRE(exp_accel(Fixed16_15{0}).cycles == kDefaultExpLogCycles);
}

TEST_CASE("tick budget with the generic defaults", "[pe][budget]")
{
    PeProgram prog = one_neuron_program(250);
    ProcessingElement pe(0, prog, PeCycleBudget{}, 1);
    PlPolicy pol;
    pol.mode = PlMode::OnlyPl1;
    const auto r1 = pe.tick(0, pol);
    REQUIRE(r1.cycles == 2000 + 250 * 400);
    REQUIRE(r1.t_sp_s == Catch::Approx(1.02e-3).epsilon(1e-12));
    REQUIRE(r1.realtime_violation);
    ProcessingElement pe2(0, prog, PeCycleBudget{}, 1);
    PlPolicy pl2;
    pl2.thresholds = {-1, 1000};  // any FIFO length selects PL2
    const auto r2 = pe2.tick(0, pl2);
    REQUIRE(r2.pl == PlId::PL2);
    REQUIRE(r2.t_sp_s == Catch::Approx(0.51e-3).epsilon(1e-12));
    REQUIRE_FALSE(r2.realtime_violation);

    ProcessingElement empty(1, one_neuron_program(0), PeCycleBudget{}, 1);
    const auto r3 = empty.tick(0, PlPolicy{});
    REQUIRE(r3.t_sp_s == Catch::Approx(2000.0 / 100e6));
    REQUIRE(r3.fired.empty());
    REQUIRE_THROWS_AS(empty.tick(0, PlPolicy{}), std::logic_error);
}

TEST_CASE("spikes are processed in the next tick and counted per row", "[pe]")
{
    PeProgram prog = one_neuron_program(4);
    prog.rows[0xA] = {{0, 1000.0F, 1}, {1, 1.0F, 1}, {2, 1.0F, 3}};
    prog.rows[0xB] = {{3, 1.0F, 2}};
    ProcessingElement pe(0, prog, PeCycleBudget{}, 1);
    PlPolicy pol;

    // Arrived during tick 5: invisible to tick 5 itself.
    pe.tick(4, pol);
    pe.receive(0xA, 5);
    pe.receive(0xB, 5);
    pe.receive(0xC, 5);  // no row: ignored
    const auto t5 = pe.tick(5, pol);
    REQUIRE(t5.fifo_len == 0);
    REQUIRE(t5.n_syn == 0);
    const auto t6 = pe.tick(6, pol);
    REQUIRE(t6.fifo_len == 3);
    REQUIRE(t6.n_syn == 4);
    REQUIRE(t6.cycles == 2000 + 4 * 400 + 4 * 40);
    REQUIRE(t6.fired == std::vector<std::uint32_t>{0});
}

TEST_CASE("synaptic current filter spreads input over ticks", "[pe]")
{
    auto run = [](double tau_syn) {
        PeProgram prog = one_neuron_program(1);
        prog.lif.tau_syn_ms = tau_syn;
        prog.rows[1] = {{0, 10.0F, 1}};
        ProcessingElement pe(0, prog, PeCycleBudget{}, 1);
        pe.receive(1, 0);
        std::vector<double> v;
        for (int t = 1; t < 6; ++t) {
            pe.tick(t, PlPolicy{});
            v.push_back(pe.neurons()[0].v);
        }
        return v;
    };
    const auto sharp = run(0.0);
    const auto smooth = run(5.0);
    REQUIRE(sharp[1] < sharp[0]);    // decays right after the kick
    REQUIRE(smooth[1] > smooth[0]);  // still charging from the filtered current
    REQUIRE(smooth[0] == Catch::Approx(sharp[0]));
}
