#include "s2sim/noc.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace s2sim {

std::string to_string(QpeCoord c)
{
    return "(" + std::to_string(c.x) + ";" + std::to_string(c.y) + ")";
}

bool in_mesh(MeshDims dims, QpeCoord c) noexcept
{
    return c.x >= 0 && c.y >= 0 && c.x < dims.x && c.y < dims.y;
}

int manhattan(QpeCoord a, QpeCoord b) noexcept
{
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

std::string_view to_string(Port p)
{
    static constexpr std::array<std::string_view, kNumInputPorts> names{"N",   "E",   "S",   "W",    "PE0",
                                                                         "PE1", "PE2", "PE3", "SPINN"};
    return names.at(static_cast<std::size_t>(p));
}

std::string_view to_string(Output o)
{
    static constexpr std::array<std::string_view, kNumOutputs> names{"N", "E", "S", "W", "LOCAL", "SPINN"};
    return names.at(static_cast<std::size_t>(o));
}

Port pe_port(int local_pe)
{
    if (local_pe < 0 || local_pe >= kPesPerQpe) {
        throw std::out_of_range("pe_port: local PE index " + std::to_string(local_pe));
    }
    return static_cast<Port>(static_cast<int>(Port::Pe0) + local_pe);
}

bool is_pe_port(Port p) noexcept
{
    return p >= Port::Pe0 && p <= Port::Pe3;
}

int local_pe_index(Port p)
{
    if (!is_pe_port(p)) {
        throw std::invalid_argument("local_pe_index: not a PE port");
    }
    return static_cast<int>(p) - static_cast<int>(Port::Pe0);
}

RouteDecision route_xy(MeshDims dims, QpeCoord current, const DNocPacket &pkt)
{
    const QpeCoord dest{pkt.dest_x, pkt.dest_y};
    RouteDecision d;
    if (!in_mesh(dims, dest) || !in_mesh(dims, current)) {
        d.kind = RouteDecision::Kind::Invalid;
        return d;
    }
    if (dest.x != current.x) {
        d.kind = RouteDecision::Kind::Forward;
        d.output = dest.x > current.x ? Output::East : Output::West;
        return d;
    }
    if (dest.y != current.y) {
        d.kind = RouteDecision::Kind::Forward;
        d.output = dest.y > current.y ? Output::North : Output::South;
        return d;
    }
    d.kind = RouteDecision::Kind::Local;
    if (pkt.dest_pe_mask == 0) {
        d.output = Output::Spinn;
        return d;
    }
    d.output = Output::Local;
    for (int pe = 0; pe < kPesPerQpe; ++pe) {
        if ((pkt.dest_pe_mask >> pe) & 1U) {
            d.pe_ports.push_back(pe_port(pe));
        }
    }
    return d;
}

RoundRobinArbiter::RoundRobinArbiter(int inputs) : inputs_(inputs)
{
    if (inputs <= 0) {
        throw std::invalid_argument("RoundRobinArbiter needs at least one input");
    }
}

void RoundRobinArbiter::set_pointer(int p)
{
    if (p < 0 || p >= inputs_) {
        throw std::out_of_range("RoundRobinArbiter pointer out of range");
    }
    pointer_ = p;
}

int RoundRobinArbiter::arbitrate(std::span<const bool> requests)
{
    if (static_cast<int>(requests.size()) != inputs_) {
        throw std::invalid_argument("RoundRobinArbiter: request vector size mismatch");
    }
    for (int k = 0; k < inputs_; ++k) {
        const int i = (pointer_ + k) % inputs_;
        if (requests[static_cast<std::size_t>(i)]) {
            pointer_ = (i + 1) % inputs_;
            return i;
        }
    }
    return -1;
}

namespace {

Port opposite_input(Output o)
{
    switch (o) {
    case Output::North:
        return Port::South;
    case Output::South:
        return Port::North;
    case Output::East:
        return Port::West;
    case Output::West:
        return Port::East;
    default:
        throw std::logic_error("opposite_input: not a mesh output");
    }
}

QpeCoord neighbour(QpeCoord c, Output o)
{
    switch (o) {
    case Output::North:
        return {c.x, c.y + 1};
    case Output::South:
        return {c.x, c.y - 1};
    case Output::East:
        return {c.x + 1, c.y};
    case Output::West:
        return {c.x - 1, c.y};
    default:
        throw std::logic_error("neighbour: not a mesh output");
    }
}

bool is_mesh_output(Output o)
{
    return o <= Output::West;
}

} // namespace

DnocFabric::DnocFabric(MeshDims dims, NocParams params, std::optional<QpeCoord> spinn_node)
    : dims_(dims), params_(params), spinn_node_(spinn_node)
{
    if (dims.x <= 0 || dims.y <= 0 || dims.x > 16 || dims.y > 16) {
        throw std::invalid_argument("DnocFabric: mesh dimensions must be in 1..16");
    }
    if (params.fifo_depth <= 0 || params.hop_latency <= 0) {
        throw std::invalid_argument("DnocFabric: FIFO depth and hop latency must be positive");
    }
    if (spinn_node && !in_mesh(dims, *spinn_node)) {
        throw std::invalid_argument("DnocFabric: SpiNNaker router node outside mesh");
    }
    routers_.resize(static_cast<std::size_t>(dims.nodes()));
    for (int y = 0; y < dims.y; ++y) {
        for (int x = 0; x < dims.x; ++x) {
            router({x, y}).coord = {x, y};
        }
    }
}

std::optional<std::string> DnocFabric::check_routable(const DNocPacket &pkt) const
{
    const QpeCoord dest{pkt.dest_x, pkt.dest_y};
    if (!in_mesh(dims_, dest)) {
        return "destination " + to_string(dest) + " outside mesh";
    }
    if (pkt.dest_pe_mask == 0 && spinn_node_ != dest) {
        return "empty PE mask and no SpiNNaker router at " + to_string(dest);
    }
    return std::nullopt;
}

void DnocFabric::record_drop(std::uint64_t id, const DNocPacket &pkt, std::int64_t cycle, std::string reason)
{
    drops_.push_back(NocDrop{id, pkt, cycle, std::move(reason)});
}

std::uint64_t DnocFabric::inject(QpeCoord src, Port src_port, const DNocPacket &pkt, std::int64_t cycle)
{
    if (!in_mesh(dims_, src)) {
        throw std::invalid_argument("DnocFabric::inject: source outside mesh");
    }
    if (!is_pe_port(src_port) && src_port != Port::Spinn) {
        throw std::invalid_argument("DnocFabric::inject: packets enter through a PE or SpiNNaker port");
    }
    const std::uint64_t id = next_id_++;
    ++injected_;
    if (auto why = check_routable(pkt)) {
        record_drop(id, pkt, std::max(cycle, now_), *why);
        return id;
    }
    const std::int64_t at = std::max(cycle, now_);
    auto &q = router(src).source[static_cast<std::size_t>(src_port)];
    if (!q.empty() && q.back().ready_cycle > at) {
        throw std::invalid_argument("DnocFabric::inject: injections per port must be in time order");
    }
    q.push_back(Flight{id, pkt, at, at, 0});
    ++queued_;
    return id;
}

std::optional<std::uint64_t> DnocFabric::try_inject_now(QpeCoord src, Port src_port, const DNocPacket &pkt)
{
    auto &r = router(src);
    const auto p = static_cast<std::size_t>(src_port);
    if (!r.source[p].empty() || static_cast<int>(r.in[p].size()) >= params_.fifo_depth) {
        return std::nullopt;
    }
    const std::uint64_t id = next_id_++;
    ++injected_;
    if (auto why = check_routable(pkt)) {
        record_drop(id, pkt, now_, *why);
        return id;
    }
    r.in[p].push_back(Flight{id, pkt, now_, now_, 0});
    r.stats.max_occupancy[p] = std::max(r.stats.max_occupancy[p], static_cast<int>(r.in[p].size()));
    return id;
}

void DnocFabric::set_sink_blocked(QpeCoord node, Port port, bool blocked)
{
    router(node).sink_blocked[static_cast<std::size_t>(port)] = blocked;
}

bool DnocFabric::sink_accepts(const Router &r, const RouteDecision &d) const
{
    if (d.output == Output::Spinn) {
        return !r.sink_blocked[static_cast<std::size_t>(Port::Spinn)];
    }
    return std::none_of(d.pe_ports.begin(), d.pe_ports.end(),
                        [&](Port p) { return r.sink_blocked[static_cast<std::size_t>(p)]; });
}

void DnocFabric::step()
{
    const int depth = params_.fifo_depth;

    for (auto &r : routers_) {
        for (std::size_t p = 0; p < kNumInputPorts; ++p) {
            auto &src = r.source[p];
            if (!src.empty() && src.front().ready_cycle <= now_ && static_cast<int>(r.in[p].size()) < depth) {
                Flight f = std::move(src.front());
                src.pop_front();
                --queued_;
                f.ready_cycle = now_;
                r.in[p].push_back(std::move(f));
                r.stats.max_occupancy[p] = std::max(r.stats.max_occupancy[p], static_cast<int>(r.in[p].size()));
            }
        }
    }

    for (auto &r : routers_) {
        std::array<bool, kNumInputPorts> moved{};
        std::array<std::optional<RouteDecision>, kNumInputPorts> heads{};
        for (std::size_t i = 0; i < kNumInputPorts; ++i) {
            if (!r.in[i].empty() && r.in[i].front().ready_cycle <= now_) {
                heads[i] = route_xy(dims_, r.coord, r.in[i].front().packet);
            }
        }
        for (int o = 0; o < kNumOutputs; ++o) {
            const auto out = static_cast<Output>(o);
            std::array<bool, kNumInputPorts> requests{};
            bool any = false;
            Router *down = nullptr;
            Port down_port = Port::North;
            if (is_mesh_output(out)) {
                const QpeCoord n = neighbour(r.coord, out);
                if (in_mesh(dims_, n)) {
                    down = &router(n);
                    down_port = opposite_input(out);
                }
            }
            for (std::size_t i = 0; i < kNumInputPorts; ++i) {
                if (moved[i] || !heads[i] || heads[i]->output != out) {
                    continue;
                }
                bool ok = false;
                if (is_mesh_output(out)) {
                    ok = down != nullptr &&
                         static_cast<int>(down->in[static_cast<std::size_t>(down_port)].size()) < depth;
                } else {
                    ok = sink_accepts(r, *heads[i]);
                }
                requests[i] = ok;
                any = any || ok;
            }
            if (!any) {
                continue;
            }
            const int g = r.arb[static_cast<std::size_t>(o)].arbitrate(requests);
            const auto gi = static_cast<std::size_t>(g);
            moved[gi] = true;
            ++r.stats.grants[static_cast<std::size_t>(o)];
            Flight f = std::move(r.in[gi].front());
            r.in[gi].pop_front();
            if (down != nullptr) {
                f.ready_cycle = now_ + params_.hop_latency;
                ++f.hops;
                ++total_hops_;
                auto &q = down->in[static_cast<std::size_t>(down_port)];
                q.push_back(std::move(f));
                auto &occ = down->stats.max_occupancy[static_cast<std::size_t>(down_port)];
                occ = std::max(occ, static_cast<int>(q.size()));
            } else {
                ++delivered_packets_;
                if (out == Output::Spinn) {
                    ++delivered_copies_;
                    deliveries_.push_back(Delivery{f.id, f.packet, r.coord, Port::Spinn, f.inject_cycle, now_, f.hops});
                } else {
                    for (Port p : heads[gi]->pe_ports) {
                        ++delivered_copies_;
                        deliveries_.push_back(Delivery{f.id, f.packet, r.coord, p, f.inject_cycle, now_, f.hops});
                    }
                }
            }
        }
        for (std::size_t i = 0; i < kNumInputPorts; ++i) {
            if (heads[i] && !moved[i]) {
                ++r.stats.stall_cycles;
            }
        }
    }
    ++now_;
}

std::size_t DnocFabric::in_flight() const noexcept
{
    std::size_t n = 0;
    for (const auto &r : routers_) {
        for (const auto &q : r.in) {
            n += q.size();
        }
    }
    return n;
}

bool DnocFabric::idle() const noexcept
{
    return queued_ == 0 && in_flight() == 0;
}

std::optional<std::int64_t> DnocFabric::next_pending_cycle() const noexcept
{
    std::optional<std::int64_t> best;
    for (const auto &r : routers_) {
        for (const auto &q : r.source) {
            if (!q.empty() && (!best || q.front().ready_cycle < *best)) {
                best = q.front().ready_cycle;
            }
        }
    }
    return best;
}

std::int64_t DnocFabric::run_until_idle(std::int64_t max_cycles)
{
    const std::int64_t start = now_;
    while (!idle()) {
        if (in_flight() == 0) {
            if (auto next = next_pending_cycle(); next && *next > now_) {
                now_ = *next;
            }
        }
        step();
        if (now_ - start > max_cycles) {
            throw std::runtime_error("DnocFabric: traffic did not drain within " + std::to_string(max_cycles) +
                                     " cycles");
        }
    }
    return now_ - start;
}

void DnocFabric::advance_to(std::int64_t cycle)
{
    while (now_ < cycle) {
        if (in_flight() == 0) {
            const auto next = next_pending_cycle();
            if (!next || *next >= cycle) {
                now_ = cycle;
                return;
            }
            now_ = std::max(now_, *next);
        }
        step();
    }
}

std::vector<Delivery> DnocFabric::take_deliveries()
{
    std::vector<Delivery> out;
    out.swap(deliveries_);
    return out;
}

const RouterStats &DnocFabric::stats(QpeCoord node) const
{
    return router(node).stats;
}

int DnocFabric::occupancy(QpeCoord node, Port port) const
{
    return static_cast<int>(router(node).in[static_cast<std::size_t>(port)].size());
}

const RoundRobinArbiter &DnocFabric::arbiter(QpeCoord node, Output out) const
{
    return router(node).arb[static_cast<std::size_t>(out)];
}

int cnoc_flits(const DNocPacket &pkt)
{
    return static_cast<int>((pkt.width_bits() + 31) / 32);
}

CnocChannel::CnocChannel(MeshDims dims, int router_delay) : dims_(dims), router_delay_(router_delay)
{
    if (router_delay < 0) {
        throw std::invalid_argument("CnocChannel: negative router delay");
    }
}

CnocDelivery CnocChannel::cnoc_send(QpeCoord src, const DNocPacket &pkt, std::int64_t cycle)
{
    validate(pkt);
    const QpeCoord dest{pkt.dest_x, pkt.dest_y};
    if (!in_mesh(dims_, src) || !in_mesh(dims_, dest)) {
        throw std::invalid_argument("cnoc_send: endpoint outside mesh");
    }
    const int flits = cnoc_flits(pkt);
    std::int64_t t = cycle;
    int hops = 0;
    QpeCoord at = src;
    while (at != dest) {
        const auto d = route_xy(dims_, at, pkt);
        const auto key = std::make_pair(at.y * dims_.x + at.x, static_cast<int>(d.output));
        auto &free_at = link_free_[key];
        const std::int64_t start = std::max(t, free_at);
        free_at = start + flits;
        t = start + router_delay_;
        at = neighbour(at, d.output);
        ++hops;
    }
    return CnocDelivery{cycle, t + flits, flits, hops, pkt, dest};
}

} // namespace s2sim
