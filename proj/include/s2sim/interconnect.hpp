// interconnect.hpp - PE spike traffic over the DNoC and the SpiNNaker router
//
// A PE sends each spike as a multicast SpinnPacket wrapped in a DNoC Spike
// packet addressed to the QPE that hosts the SpiNNaker router (empty PE
// mask = router port). The router looks up the key and sends one DNoC copy
// per destination QPE with the PE mask set; the fabric replicates it on
// delivery.
//
// The functional arrival tick of a spike is the tick it was sent in. The
// NoC still runs cycle by cycle; deliveries that land after the next tick
// boundary are counted as late.
#ifndef S2SIM_INTERCONNECT_HPP
#define S2SIM_INTERCONNECT_HPP

#include <cstdint>
#include <vector>

#include "s2sim/noc.hpp"
#include "s2sim/spinn_router.hpp"
#include "s2sim/trace.hpp"

namespace s2sim {

DNocPacket wrap_spinn(const SpinnPacket &sp, QpeCoord dest, std::uint8_t pe_mask);
SpinnPacket unwrap_spinn(const DNocPacket &pkt);

QpeCoord qpe_coord(MeshDims dims, int qpe);
int qpe_index(MeshDims dims, QpeCoord c);

struct InterconnectParams
{
    MeshDims dims{2, 1};
    NocParams noc;
    QpeCoord spinn_node{0, 0};
    SpinnRouterParams router;
    std::int64_t cycles_per_tick{400'000};
    double hop_energy_pj{0.0};
    bool trace_packets{false};
    std::int64_t max_drain_cycles{50'000'000};
};

struct SpikeDelivery
{
    int pe{0};
    std::uint32_t key{0};
    std::int64_t deliver_cycle{0};
};

struct InterconnectStats
{
    std::uint64_t spikes_sent{0};
    std::uint64_t copies_delivered{0};
    std::uint64_t late_deliveries{0};
    std::uint64_t router_drops{0};
    std::uint64_t noc_hops{0};
    std::int64_t max_latency_cycles{0};
};

class Interconnect
{
public:
    Interconnect(InterconnectParams params, RoutingTable table, int n_pes, TraceWriter *trace = nullptr);

    // cycle is absolute in the NoC domain.
    void send_spike(int src_pe, std::uint32_t key, std::int64_t cycle);
    // Runs the NoC and router until all traffic issued so far is delivered
    // or dropped. Deliveries are returned in delivery order.
    std::vector<SpikeDelivery> drain(std::int64_t tick);

    const InterconnectStats &stats() const noexcept { return stats_; }
    const DnocFabric &fabric() const noexcept { return fabric_; }
    const SpinnRouter &router() const noexcept { return router_; }
    double noc_energy_j() const noexcept;

private:
    InterconnectParams params_;
    int n_pes_;
    TraceWriter *trace_;
    DnocFabric fabric_;
    SpinnRouter router_;
    InterconnectStats stats_;
    std::size_t drops_seen_{0};
    std::size_t noc_drops_seen_{0};
};

} // namespace s2sim

#endif
