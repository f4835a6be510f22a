#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>

#include "s2sim/noc.hpp"
#include "s2sim/rng.hpp"

using namespace s2sim;

namespace {

DNocPacket to(int x, int y, std::uint8_t mask = 0b0001)
{
    DNocPacket p;
    p.dest_x = static_cast<std::uint8_t>(x);
    p.dest_y = static_cast<std::uint8_t>(y);
    p.dest_pe_mask = mask;
    return p;
}

// Next output by dimension order, written out independently.
Output expected_output(QpeCoord at, QpeCoord dest)
{
    if (dest.x > at.x) {
        return Output::East;
    }
    if (dest.x < at.x) {
        return Output::West;
    }
    if (dest.y > at.y) {
        return Output::North;
    }
    if (dest.y < at.y) {
        return Output::South;
    }
    return Output::Local;
}

} // namespace

TEST_CASE("XY routing decisions", "[noc][route]")
{
    const MeshDims dims{4, 4};
    auto d = route_xy(dims, {2, 1}, to(2, 1, 0b0101));
    REQUIRE(d.kind == RouteDecision::Kind::Local);
    REQUIRE(d.pe_ports == std::vector<Port>{Port::Pe0, Port::Pe2});

    d = route_xy(dims, {0, 0}, to(2, 1));
    REQUIRE(d.kind == RouteDecision::Kind::Forward);
    REQUIRE(d.output == Output::East);

    d = route_xy(dims, {2, 3}, to(2, 1));
    REQUIRE(d.output == Output::South);

    d = route_xy(dims, {1, 1}, to(5, 1));
    REQUIRE(d.kind == RouteDecision::Kind::Invalid);

    d = route_xy(dims, {1, 1}, to(1, 1, 0));
    REQUIRE(d.kind == RouteDecision::Kind::Local);
    REQUIRE(d.pe_ports.empty());  // SpiNNaker router port
}

TEST_CASE("XY routing agrees with dimension-order oracle", "[noc][route][property]")
{
    const MeshDims dims{8, 6};
    RngStream r(9, stream::traffic);
    for (int i = 0; i < 5000; ++i) {
        const QpeCoord at{static_cast<int>(r.below(8)), static_cast<int>(r.below(6))};
        const QpeCoord dest{static_cast<int>(r.below(8)), static_cast<int>(r.below(6))};
        const auto d = route_xy(dims, at, to(dest.x, dest.y));
        const Output want = expected_output(at, dest);
        if (want == Output::Local) {
            REQUIRE(d.kind == RouteDecision::Kind::Local);
        } else {
            REQUIRE(d.kind == RouteDecision::Kind::Forward);
            REQUIRE(d.output == want);
        }
    }
}

TEST_CASE("round-robin arbiter", "[noc][arbiter]")
{
    RoundRobinArbiter arb(3);
    std::array<bool, 3> req{false, true, false};
    REQUIRE(arb.arbitrate(req) == 1);

    std::array<bool, 3> ab{true, true, false};
    std::array<int, 3> grants{};
    for (int i = 0; i < 100; ++i) {
        ++grants[static_cast<std::size_t>(arb.arbitrate(ab))];
    }
    REQUIRE(grants[0] == 50);
    REQUIRE(grants[1] == 50);

    arb.set_pointer(1);
    std::array<bool, 3> ac{true, false, true};
    REQUIRE(arb.arbitrate(ac) == 2);
    std::array<bool, 3> none{};
    REQUIRE(arb.arbitrate(none) == -1);
}

TEST_CASE("uncontended latency is 5 cycles per hop", "[noc][latency][property]")
{
    const MeshDims dims{8, 8};
    RngStream r(10, stream::traffic + 2);
    for (int i = 0; i < 1000; ++i) {
        DnocFabric fab(dims, NocParams{});
        const QpeCoord src{static_cast<int>(r.below(8)), static_cast<int>(r.below(8))};
        const QpeCoord dst{static_cast<int>(r.below(8)), static_cast<int>(r.below(8))};
        const auto port = pe_port(static_cast<int>(r.below(4)));
        const std::int64_t t0 = static_cast<std::int64_t>(r.below(1000));
        fab.inject(src, port, to(dst.x, dst.y), t0);
        fab.run_until_idle(100000);
        const auto del = fab.take_deliveries();
        REQUIRE(del.size() == 1);
        const int h = manhattan(src, dst);
        REQUIRE(del[0].hops == h);
        REQUIRE(del[0].inject_cycle == t0);
        REQUIRE(del[0].deliver_cycle - del[0].inject_cycle == 5 * h);
    }
}

TEST_CASE("one hop is 12.5 ns", "[noc][latency]")
{
    DnocFabric fab({2, 1}, NocParams{});
    fab.inject({0, 0}, Port::Pe0, to(1, 0), 0);
    fab.run_until_idle(1000);
    const auto d = fab.take_deliveries();
    REQUIRE(d.size() == 1);
    REQUIRE(static_cast<double>(d[0].deliver_cycle) / 400e6 == Catch::Approx(12.5e-9));
}

TEST_CASE("output contention delays the loser", "[noc][arbiter]")
{
    DnocFabric fab({3, 1}, NocParams{});
    fab.inject({0, 0}, Port::Pe0, to(2, 0), 0);
    fab.inject({0, 0}, Port::Pe1, to(2, 0), 0);
    fab.run_until_idle(1000);
    auto d = fab.take_deliveries();
    REQUIRE(d.size() == 2);
    std::sort(d.begin(), d.end(), [](const auto &a, const auto &b) { return a.deliver_cycle < b.deliver_cycle; });
    REQUIRE(d[0].deliver_cycle == 10);
    REQUIRE(d[1].deliver_cycle >= d[0].deliver_cycle + 1);
}

TEST_CASE("multicast mask replicates at the destination", "[noc]")
{
    DnocFabric fab({2, 2}, NocParams{});
    fab.inject({0, 0}, Port::Pe0, to(1, 1, 0b1011), 0);
    fab.run_until_idle(1000);
    const auto d = fab.take_deliveries();
    REQUIRE(d.size() == 3);
    REQUIRE(fab.delivered_packets() == 1);
    REQUIRE(fab.delivered_copies() == 3);
}

TEST_CASE("blocked sink backpressures without loss", "[noc][congestion]")
{
    DnocFabric fab({3, 1}, NocParams{});
    fab.set_sink_blocked({2, 0}, Port::Pe0, true);
    for (int i = 0; i < 20; ++i) {
        fab.inject({0, 0}, pe_port(i % 4), to(2, 0), 0);
    }
    for (int i = 0; i < 2000; ++i) {
        fab.step();
    }
    REQUIRE(fab.take_deliveries().empty());
    REQUIRE(fab.drops().empty());
    REQUIRE(fab.stats({1, 0}).stall_cycles + fab.stats({2, 0}).stall_cycles + fab.stats({0, 0}).stall_cycles > 0);
    REQUIRE(fab.occupancy({2, 0}, Port::West) <= 4);
    fab.set_sink_blocked({2, 0}, Port::Pe0, false);
    fab.run_until_idle(100000);
    REQUIRE(fab.take_deliveries().size() == 20);
}

TEST_CASE("destinations outside the mesh are dropped", "[noc]")
{
    DnocFabric fab({2, 2}, NocParams{});
    fab.inject({0, 0}, Port::Pe0, to(3, 0), 0);
    REQUIRE(fab.drops().size() == 1);
    REQUIRE(fab.idle());
}

TEST_CASE("uniform random traffic drains and conserves packets", "[noc][property]")
{
    const MeshDims dims{4, 4};
    DnocFabric fab(dims, NocParams{});
    RngStream r(2025, stream::traffic + 3);
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) {
        const QpeCoord src{static_cast<int>(r.below(4)), static_cast<int>(r.below(4))};
        // A few destinations fall outside the mesh and must be dropped.
        const int dx = static_cast<int>(r.below(5));
        const int dy = static_cast<int>(r.below(4));
        fab.inject(src, pe_port(static_cast<int>(r.below(4))), to(dx, dy), i / 8);
    }
    fab.run_until_idle(50'000'000);
    REQUIRE(fab.idle());
    REQUIRE(fab.injected() == n);
    REQUIRE(fab.delivered_packets() + fab.drops().size() == fab.injected());
    REQUIRE(fab.drops().size() > 0);
}

TEST_CASE("configuration NoC flits and independence", "[noc][cnoc]")
{
    DNocPacket hdr = to(3, 0);
    REQUIRE(cnoc_flits(hdr) == 2);
    DNocPacket full = hdr;
    full.payload_len = 4;
    REQUIRE(cnoc_flits(full) == 6);

    // DNoC saturated by a blocked sink; configuration writes still get through.
    DnocFabric fab({4, 1}, NocParams{});
    fab.set_sink_blocked({3, 0}, Port::Pe0, true);
    for (int i = 0; i < 50; ++i) {
        fab.inject({0, 0}, Port::Pe0, to(3, 0), 0);
    }
    for (int i = 0; i < 500; ++i) {
        fab.step();
    }
    CnocChannel cnoc({4, 1});
    DNocPacket cfg = to(3, 0);
    cfg.packet_class = PacketClass::Config;
    const auto d = cnoc.cnoc_send({0, 0}, cfg, 0);
    REQUIRE(d.hops == 3);
    REQUIRE(d.deliver_cycle == 3 * 1 + 2);
    const auto d2 = cnoc.cnoc_send({0, 0}, cfg, 0);
    REQUIRE(d2.deliver_cycle > d.deliver_cycle);
}
