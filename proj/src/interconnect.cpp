#include "s2sim/interconnect.hpp"

#include <stdexcept>
#include <string>

namespace s2sim {

DNocPacket wrap_spinn(const SpinnPacket &sp, QpeCoord dest, std::uint8_t pe_mask)
{
    DNocPacket p;
    p.dest_x = static_cast<std::uint8_t>(dest.x);
    p.dest_y = static_cast<std::uint8_t>(dest.y);
    p.dest_pe_mask = pe_mask;
    p.packet_class = PacketClass::Spike;
    p.cmd = static_cast<std::uint8_t>(sp.kind);
    p.tag = static_cast<std::uint8_t>((sp.timestamp << 2U) | sp.emergency);
    p.address = sp.key_or_addr;
    if (sp.payload) {
        p.payload_len = 1;
        p.payload[0] = *sp.payload;
    }
    return p;
}

SpinnPacket unwrap_spinn(const DNocPacket &pkt)
{
    if (pkt.packet_class != PacketClass::Spike || pkt.cmd > 2 || pkt.payload_len > 1) {
        throw PacketError("DNoC packet does not carry a SpiNNaker packet");
    }
    SpinnPacket sp;
    sp.kind = static_cast<SpinnKind>(pkt.cmd);
    sp.timestamp = static_cast<std::uint8_t>((pkt.tag >> 2U) & 3U);
    sp.emergency = static_cast<std::uint8_t>(pkt.tag & 3U);
    sp.key_or_addr = pkt.address;
    if (pkt.payload_len == 1) {
        sp.payload = pkt.payload[0];
    }
    return sp;
}

QpeCoord qpe_coord(MeshDims dims, int qpe)
{
    return QpeCoord{qpe % dims.x, qpe / dims.x};
}

int qpe_index(MeshDims dims, QpeCoord c)
{
    return c.y * dims.x + c.x;
}

Interconnect::Interconnect(InterconnectParams params, RoutingTable table, int n_pes, TraceWriter *trace)
    : params_(params), n_pes_(n_pes), trace_(trace), fabric_(params.dims, params.noc, params.spinn_node),
      router_(std::move(table), params.router)
{
    if (n_pes < 1 || n_pes > params.dims.nodes() * kPesPerQpe) {
        throw std::invalid_argument("interconnect: " + std::to_string(n_pes) + " PEs do not fit a " +
                                    std::to_string(params.dims.x) + "x" + std::to_string(params.dims.y) + " mesh");
    }
    if (!in_mesh(params.dims, params.spinn_node)) {
        throw std::invalid_argument("interconnect: SpiNNaker router QPE outside the mesh");
    }
    if (params.cycles_per_tick < 1) {
        throw std::invalid_argument("interconnect: cycles_per_tick must be positive");
    }
}

void Interconnect::send_spike(int src_pe, std::uint32_t key, std::int64_t cycle)
{
    if (src_pe < 0 || src_pe >= n_pes_) {
        throw std::out_of_range("interconnect: bad source PE " + std::to_string(src_pe));
    }
    const SpinnPacket sp{SpinnKind::Multicast, 0, 0, key, std::nullopt};
    const QpeCoord src = qpe_coord(params_.dims, src_pe / kPesPerQpe);
    fabric_.inject(src, pe_port(src_pe % kPesPerQpe), wrap_spinn(sp, params_.spinn_node, 0), cycle);
    ++stats_.spikes_sent;
    if (params_.trace_packets && trace_ != nullptr) {
        trace_->emit(SimTime::from_cycles(cycle, params_.cycles_per_tick), TraceKind::PacketSent,
                     "noc.pe" + std::to_string(src_pe) + ".tx", "key=" + std::to_string(key));
    }
}

std::vector<SpikeDelivery> Interconnect::drain(std::int64_t tick)
{
    std::vector<SpikeDelivery> out;
    const std::int64_t boundary = (tick + 1) * params_.cycles_per_tick;
    // Budget counts from the later of the tick start and the fabric clock; a
    // long quiet gap before this tick is not a stall.
    const std::int64_t start = std::max(fabric_.now(), tick * params_.cycles_per_tick);
    const QpeCoord hub = params_.spinn_node;

    const SpinnRouter::NocEmit emit = [&](const QpeTarget &t, const SpinnPacket &sp) {
        return fabric_.try_inject_now(hub, Port::Spinn, wrap_spinn(sp, qpe_coord(params_.dims, t.qpe), t.pe_mask))
            .has_value();
    };

    while (!fabric_.idle() || !router_.idle()) {
        if (router_.idle() && fabric_.in_flight() == 0) {
            if (auto next = fabric_.next_pending_cycle(); next && *next > fabric_.now()) {
                fabric_.advance_to(*next);
            }
        }
        fabric_.step();
        const std::int64_t now = fabric_.now();
        for (auto &d : fabric_.take_deliveries()) {
            if (d.port == Port::Spinn) {
                router_.accept(unwrap_spinn(d.packet));
                continue;
            }
            const int pe = qpe_index(params_.dims, d.node) * kPesPerQpe + local_pe_index(d.port);
            ++stats_.copies_delivered;
            stats_.late_deliveries += d.deliver_cycle >= boundary ? 1U : 0U;
            stats_.max_latency_cycles = std::max(stats_.max_latency_cycles, d.deliver_cycle - d.inject_cycle);
            if (pe < n_pes_) {
                out.push_back(SpikeDelivery{pe, d.packet.address, d.deliver_cycle});
            }
            if (params_.trace_packets && trace_ != nullptr) {
                trace_->emit(SimTime::from_cycles(d.deliver_cycle, params_.cycles_per_tick),
                             TraceKind::PacketDelivered, "noc.pe" + std::to_string(pe) + ".rx",
                             "key=" + std::to_string(d.packet.address) + ";hops=" + std::to_string(d.hops));
            }
        }
        router_.step(now, emit);
        if (now - start > params_.max_drain_cycles) {
            throw std::runtime_error("interconnect: traffic did not drain within " +
                                     std::to_string(params_.max_drain_cycles) + " cycles");
        }
    }

    const auto &rdrops = router_.drop_log();
    for (; drops_seen_ < rdrops.size(); ++drops_seen_) {
        ++stats_.router_drops;
        if (trace_ != nullptr) {
            const auto &d = rdrops[drops_seen_];
            trace_->emit(SimTime::from_cycles(d.cycle, params_.cycles_per_tick), TraceKind::PacketDropped,
                         "spinn_router", "key=" + std::to_string(d.packet.key_or_addr) + ";reason=" + d.reason);
        }
    }
    const auto &ndrops = fabric_.drops();
    for (; noc_drops_seen_ < ndrops.size(); ++noc_drops_seen_) {
        if (trace_ != nullptr) {
            const auto &d = ndrops[noc_drops_seen_];
            trace_->emit(SimTime::from_cycles(d.cycle, params_.cycles_per_tick), TraceKind::PacketDropped, "noc",
                         "key=" + std::to_string(d.packet.address) + ";reason=" + d.reason);
        }
    }
    stats_.noc_hops = fabric_.total_hops();
    return out;
}

double Interconnect::noc_energy_j() const noexcept
{
    return static_cast<double>(fabric_.total_hops()) * params_.hop_energy_pj * 1e-12;
}

} // namespace s2sim
