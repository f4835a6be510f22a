// noc.hpp - 2D-mesh data NoC of QPE routers and the wormhole configuration NoC
//
// Each QPE router has nine input ports (N, E, S, W, PE0-PE3 and the
// SpiNNaker-router attachment port) and six outputs (N, E, S, W, the
// local PE ejection and the SpiNNaker-router port). Routing is X first,
// then Y. Every router-to-router traversal costs hop_latency cycles of the
// 400 MHz NoC clock; contention adds whole cycles of waiting. The fabric
// is lossless: packets wait on full FIFOs and are only dropped when the
// destination lies outside the mesh.
#ifndef S2SIM_NOC_HPP
#define S2SIM_NOC_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "s2sim/packets.hpp"

namespace s2sim {

struct MeshDims
{
    int x{1};
    int y{1};

    int nodes() const noexcept { return x * y; }
    bool operator==(const MeshDims &) const = default;
};

struct QpeCoord
{
    int x{0};
    int y{0};

    auto operator<=>(const QpeCoord &) const = default;
};

std::string to_string(QpeCoord c);
bool in_mesh(MeshDims dims, QpeCoord c) noexcept;
int manhattan(QpeCoord a, QpeCoord b) noexcept;

constexpr int kPesPerQpe = 4;

// North is +y, East is +x.
enum class Port : std::uint8_t
{
    North,
    East,
    South,
    West,
    Pe0,
    Pe1,
    Pe2,
    Pe3,
    Spinn,
};

constexpr int kNumInputPorts = 9;
std::string_view to_string(Port p);
Port pe_port(int local_pe);
bool is_pe_port(Port p) noexcept;
int local_pe_index(Port p);

// Output side of a router. Local replicates to every PE in dest_pe_mask.
enum class Output : std::uint8_t
{
    North,
    East,
    South,
    West,
    Local,
    Spinn,
};

constexpr int kNumOutputs = 6;
std::string_view to_string(Output o);

struct RouteDecision
{
    enum class Kind : std::uint8_t
    {
        Forward,
        Local,
        Invalid,
    };
    Kind kind{Kind::Invalid};
    Output output{Output::Local};
    // PE ports selected on local delivery; empty means the SpiNNaker port.
    std::vector<Port> pe_ports;
};

RouteDecision route_xy(MeshDims dims, QpeCoord current, const DNocPacket &pkt);

// Cyclic grant starting at the pointer; the pointer moves past each grant.
class RoundRobinArbiter
{
public:
    explicit RoundRobinArbiter(int inputs = kNumInputPorts);

    int inputs() const noexcept { return inputs_; }
    int pointer() const noexcept { return pointer_; }
    void set_pointer(int p);

    // requests[i] true if input i requests. Returns the granted input or -1.
    int arbitrate(std::span<const bool> requests);

private:
    int inputs_;
    int pointer_{0};
};

struct NocParams
{
    int fifo_depth{4};
    int hop_latency{5};
};

struct Delivery
{
    std::uint64_t id{0};
    DNocPacket packet;
    QpeCoord node;
    Port port{Port::Pe0};
    std::int64_t inject_cycle{0};
    std::int64_t deliver_cycle{0};
    int hops{0};
};

struct NocDrop
{
    std::uint64_t id{0};
    DNocPacket packet;
    std::int64_t cycle{0};
    std::string reason;
};

struct RouterStats
{
    std::array<std::uint64_t, kNumOutputs> grants{};
    std::array<int, kNumInputPorts> max_occupancy{};
    std::uint64_t stall_cycles{0};
};

class DnocFabric
{
public:
    DnocFabric(MeshDims dims, NocParams params, std::optional<QpeCoord> spinn_node = std::nullopt);

    MeshDims dims() const noexcept { return dims_; }
    const NocParams &params() const noexcept { return params_; }
    std::optional<QpeCoord> spinn_node() const noexcept { return spinn_node_; }
    std::int64_t now() const noexcept { return now_; }

    // Queues a packet at a source interface (a PE port or the SpiNNaker port
    // of `src`). It enters the router input FIFO at or after `cycle` once
    // there is room. Returns the packet id; unroutable packets are dropped
    // immediately and recorded in drops().
    std::uint64_t inject(QpeCoord src, Port src_port, const DNocPacket &pkt, std::int64_t cycle);
    // Places a packet straight into an input FIFO this cycle if it has room.
    std::optional<std::uint64_t> try_inject_now(QpeCoord src, Port src_port, const DNocPacket &pkt);

    // Sinks never refuse unless blocked here (used to build congestion).
    void set_sink_blocked(QpeCoord node, Port port, bool blocked);

    // Advances one NoC cycle.
    void step();
    bool idle() const noexcept;
    // Steps until idle, skipping idle gaps. Returns cycles advanced.
    // Throws std::runtime_error if max_cycles is exceeded.
    std::int64_t run_until_idle(std::int64_t max_cycles);
    // Moves to `cycle` if the fabric is idle until then.
    void advance_to(std::int64_t cycle);
    std::optional<std::int64_t> next_pending_cycle() const noexcept;

    std::vector<Delivery> take_deliveries();
    const std::vector<NocDrop> &drops() const noexcept { return drops_; }

    std::uint64_t injected() const noexcept { return injected_; }
    std::uint64_t delivered_packets() const noexcept { return delivered_packets_; }
    std::uint64_t delivered_copies() const noexcept { return delivered_copies_; }
    std::uint64_t total_hops() const noexcept { return total_hops_; }
    std::size_t in_flight() const noexcept;

    const RouterStats &stats(QpeCoord node) const;
    int occupancy(QpeCoord node, Port port) const;
    const RoundRobinArbiter &arbiter(QpeCoord node, Output out) const;

private:
    struct Flight
    {
        std::uint64_t id{0};
        DNocPacket packet;
        std::int64_t inject_cycle{0};
        std::int64_t ready_cycle{0};
        int hops{0};
    };

    struct Router
    {
        QpeCoord coord;
        std::array<std::deque<Flight>, kNumInputPorts> in;
        std::array<std::deque<Flight>, kNumInputPorts> source;  // PE/Spinn injection queues
        std::array<RoundRobinArbiter, kNumOutputs> arb;
        std::array<bool, kNumInputPorts> sink_blocked{};
        RouterStats stats;
    };

    int index(QpeCoord c) const noexcept { return c.y * dims_.x + c.x; }
    Router &router(QpeCoord c) { return routers_.at(static_cast<std::size_t>(index(c))); }
    const Router &router(QpeCoord c) const { return routers_.at(static_cast<std::size_t>(index(c))); }
    std::optional<std::string> check_routable(const DNocPacket &pkt) const;
    bool sink_accepts(const Router &r, const RouteDecision &d) const;
    void record_drop(std::uint64_t id, const DNocPacket &pkt, std::int64_t cycle, std::string reason);

    MeshDims dims_;
    NocParams params_;
    std::optional<QpeCoord> spinn_node_;
    std::vector<Router> routers_;
    std::int64_t now_{0};
    std::uint64_t next_id_{1};
    std::uint64_t injected_{0};
    std::uint64_t delivered_packets_{0};
    std::uint64_t delivered_copies_{0};
    std::uint64_t total_hops_{0};
    std::size_t queued_{0};
    std::vector<Delivery> deliveries_;
    std::vector<NocDrop> drops_;
};

// Configuration NoC: same X/Y path, 32-bit flits, wormhole switching on the
// reference clock. Independent of DNoC state.
struct CnocDelivery
{
    std::int64_t send_cycle{0};
    std::int64_t deliver_cycle{0};
    int flits{0};
    int hops{0};
    DNocPacket packet;
    QpeCoord dest;
};

int cnoc_flits(const DNocPacket &pkt);

class CnocChannel
{
public:
    explicit CnocChannel(MeshDims dims, int router_delay = 1);

    // Returns the delivery record; the path's links are held for one
    // flit-cycle per flit, so back-to-back packets queue behind each other.
    CnocDelivery cnoc_send(QpeCoord src, const DNocPacket &pkt, std::int64_t cycle);

private:
    MeshDims dims_;
    int router_delay_;
    std::map<std::pair<int, int>, std::int64_t> link_free_;
};

} // namespace s2sim

#endif
