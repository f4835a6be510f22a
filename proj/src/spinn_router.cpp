#include "s2sim/spinn_router.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace s2sim {

void RouteSet::add_pe(int pe)
{
    if (pe < 0 || pe >= kMaxPes) {
        throw std::out_of_range("RouteSet: PE id " + std::to_string(pe) + " out of range");
    }
    pes_.set(static_cast<std::size_t>(pe));
}

void RouteSet::add_link(int link)
{
    if (link < 0 || link >= kNumLinks) {
        throw std::out_of_range("RouteSet: link id " + std::to_string(link) + " out of range");
    }
    links_ = static_cast<std::uint8_t>(links_ | (1U << static_cast<unsigned>(link)));
}

std::vector<int> RouteSet::pes() const
{
    std::vector<int> out;
    for (int i = 0; i < kMaxPes; ++i) {
        if (pes_.test(static_cast<std::size_t>(i))) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<int> RouteSet::links() const
{
    std::vector<int> out;
    for (int l = 0; l < kNumLinks; ++l) {
        if (has_link(l)) {
            out.push_back(l);
        }
    }
    return out;
}

std::string RouteSet::to_string() const
{
    std::string s;
    for (int pe : pes()) {
        s += (s.empty() ? "" : ";") + std::string("PE") + std::to_string(pe);
    }
    for (int l : links()) {
        s += (s.empty() ? "" : ";") + std::string("L") + std::to_string(l);
    }
    return s;
}

RouteSet RouteSet::parse(const std::string &text)
{
    RouteSet r;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ';')) {
        int v = -1;
        const char *first = nullptr;
        bool is_pe = false;
        if (tok.rfind("PE", 0) == 0) {
            first = tok.data() + 2;
            is_pe = true;
        } else if (tok.rfind('L', 0) == 0) {
            first = tok.data() + 1;
        } else {
            throw std::invalid_argument("route list: bad token '" + tok + "'");
        }
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw std::invalid_argument("route list: bad token '" + tok + "'");
        }
        if (is_pe) {
            r.add_pe(v);
        } else {
            r.add_link(v);
        }
    }
    return r;
}

void validate(const RoutingEntry &e)
{
    if ((e.key & ~e.mask) != 0) {
        throw std::invalid_argument("routing entry: key has bits outside mask");
    }
    if (e.route.empty()) {
        throw std::invalid_argument("routing entry: empty route");
    }
}

RoutingTable::RoutingTable(std::size_t capacity, int default_link, DefaultRoutePolicy policy)
    : capacity_(capacity), default_link_(default_link), policy_(policy)
{
    if (default_link < 0 || default_link >= kNumLinks) {
        throw std::invalid_argument("RoutingTable: default link out of range");
    }
}

void RoutingTable::add(const RoutingEntry &e)
{
    validate(e);
    if (entries_.size() >= capacity_) {
        throw std::length_error("RoutingTable: capacity " + std::to_string(capacity_) + " exceeded");
    }
    entries_.push_back(e);
}

std::optional<std::size_t> RoutingTable::match(std::uint32_t key) const
{
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if ((key & entries_[i].mask) == entries_[i].key) {
            return i;
        }
    }
    return std::nullopt;
}

RouteSet route_multicast(const RoutingTable &table, std::uint32_t key, std::optional<int> arrival_link)
{
    if (auto i = table.match(key)) {
        return table.entries()[*i].route;
    }
    RouteSet r;
    if (table.policy() == DefaultRoutePolicy::OppositeOfArrival && arrival_link) {
        r.add_link((*arrival_link + kNumLinks / 2) % kNumLinks);
    } else {
        r.add_link(table.default_link());
    }
    return r;
}

namespace {

std::string hex32(std::uint32_t v)
{
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) {
        s.push_back(digits[(v >> static_cast<unsigned>(shift)) & 0xFU]);
    }
    return s;
}

std::uint32_t parse_hex32(const std::string &s)
{
    std::string_view v = s;
    if (v.rfind("0x", 0) == 0 || v.rfind("0X", 0) == 0) {
        v.remove_prefix(2);
    }
    std::uint32_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw std::invalid_argument("routing CSV: bad hex value '" + s + "'");
    }
    return out;
}

} // namespace

void RoutingTable::write_csv(std::ostream &out) const
{
    out << "key,mask,route_list\n";
    for (const auto &e : entries_) {
        out << hex32(e.key) << ',' << hex32(e.mask) << ',' << e.route.to_string() << '\n';
    }
}

RoutingTable RoutingTable::read_csv(std::istream &in, std::size_t capacity, int default_link)
{
    RoutingTable t(capacity, default_link);
    std::string line;
    if (!std::getline(in, line) || line != "key,mask,route_list") {
        throw std::invalid_argument("routing CSV: missing header 'key,mask,route_list'");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw std::invalid_argument("routing CSV line " + std::to_string(lineno) + ": expected 3 columns");
        }
        RoutingEntry e;
        e.key = parse_hex32(line.substr(0, c1));
        e.mask = parse_hex32(line.substr(c1 + 1, c2 - c1 - 1));
        e.route = RouteSet::parse(line.substr(c2 + 1));
        t.add(e);
    }
    return t;
}

RouteOutcome route_core_to_core(const SpinnPacket &pkt, const ChipContext &chip)
{
    if (pkt.kind != SpinnKind::CoreToCore) {
        throw std::invalid_argument("route_core_to_core: not a core-to-core packet");
    }
    const auto addr = CoreAddress::unpack(pkt.key_or_addr);
    RouteOutcome out;
    if (addr.chip_x == chip.chip_x && addr.chip_y == chip.chip_y) {
        if (addr.pe_id >= chip.n_pes) {
            out.drop_reason = "unknown PE " + std::to_string(addr.pe_id);
        } else {
            out.route.add_pe(addr.pe_id);
        }
        return out;
    }
    if (addr.chip_x != chip.chip_x) {
        out.route.add_link(addr.chip_x > chip.chip_x ? 0 : 3);
    } else {
        out.route.add_link(addr.chip_y > chip.chip_y ? 2 : 5);
    }
    return out;
}

RouteOutcome route_nearest_neighbour(const SpinnPacket &pkt)
{
    if (pkt.kind != SpinnKind::NearestNeighbour) {
        throw std::invalid_argument("route_nearest_neighbour: not a nearest-neighbour packet");
    }
    RouteOutcome out;
    const unsigned ports = pkt.key_or_addr & 0x3FU;
    if (ports == 0) {
        out.drop_reason = "no destination port";
        return out;
    }
    for (int l = 0; l < kNumLinks; ++l) {
        if ((ports >> static_cast<unsigned>(l)) & 1U) {
            out.route.add_link(l);
        }
    }
    return out;
}

DropDecision congestion_drop(std::int64_t stall_cycles, std::int64_t timeout)
{
    return stall_cycles > timeout ? DropDecision::Drop : DropDecision::Keep;
}

SpinnRouter::SpinnRouter(RoutingTable table, SpinnRouterParams params)
    : table_(std::move(table)), params_(params)
{
    if (params.drop_timeout < 0 || params.link_cycles_per_packet < 1) {
        throw std::invalid_argument("SpinnRouter: bad timing parameters");
    }
}

void SpinnRouter::accept(const SpinnPacket &pkt, std::optional<int> arrival_link)
{
    ++counters_.at(static_cast<std::size_t>(pkt.kind)).injected;
    queue_.push_back(Pending{pkt, arrival_link, false, 0, {}, {}});
}

void SpinnRouter::set_link_blocked(int link, bool blocked)
{
    link_blocked_.at(static_cast<std::size_t>(link)) = blocked;
}

RouteOutcome SpinnRouter::route(const Pending &p) const
{
    switch (p.packet.kind) {
    case SpinnKind::Multicast: {
        RouteOutcome out{route_multicast(table_, p.packet.key_or_addr, p.arrival_link), std::nullopt};
        for (int pe : out.route.pes()) {
            if (pe >= params_.chip.n_pes) {
                out.drop_reason = "route to nonexistent PE " + std::to_string(pe);
            }
        }
        return out;
    }
    case SpinnKind::CoreToCore:
        return route_core_to_core(p.packet, params_.chip);
    case SpinnKind::NearestNeighbour:
        return route_nearest_neighbour(p.packet);
    }
    return RouteOutcome{{}, "invalid packet kind"};
}

void SpinnRouter::finish(bool dropped, std::int64_t now, const std::string &reason)
{
    auto &head = queue_.front();
    auto &c = counters_.at(static_cast<std::size_t>(head.packet.kind));
    if (dropped) {
        ++c.dropped;
        drops_.push_back(RouterDrop{now, head.packet, reason});
    } else {
        ++c.delivered;
    }
    queue_.pop_front();
}

void SpinnRouter::step(std::int64_t now, const NocEmit &emit)
{
    if (queue_.empty()) {
        return;
    }
    auto &h = queue_.front();
    if (!h.routed) {
        h.routed = true;
        h.head_since = now;
        const RouteOutcome r = route(h);
        if (r.drop_reason) {
            finish(true, now, *r.drop_reason);
            return;
        }
        for (int pe : r.route.pes()) {
            const int qpe = pe / 4;
            const auto bit = static_cast<std::uint8_t>(1U << static_cast<unsigned>(pe % 4));
            if (!h.qpes.empty() && h.qpes.back().qpe == qpe) {
                h.qpes.back().pe_mask = static_cast<std::uint8_t>(h.qpes.back().pe_mask | bit);
            } else {
                h.qpes.push_back(QpeTarget{qpe, bit});
            }
        }
        h.links = r.route.links();
    }

    std::erase_if(h.qpes, [&](const QpeTarget &t) { return emit(t, h.packet); });
    std::erase_if(h.links, [&](int l) {
        const auto i = static_cast<std::size_t>(l);
        if (link_blocked_[i] || now < link_free_[i]) {
            return false;
        }
        link_free_[i] = now + params_.link_cycles_per_packet;
        ++link_sent_[i];
        return true;
    });

    if (h.qpes.empty() && h.links.empty()) {
        finish(false, now, {});
        return;
    }
    if (congestion_drop(now - h.head_since, params_.drop_timeout) == DropDecision::Drop) {
        noc_drops_ += h.qpes.size();
        for (int l : h.links) {
            ++link_drops_.at(static_cast<std::size_t>(l));
        }
        finish(true, now, "timeout after " + std::to_string(now - h.head_since) + " cycles");
    }
}

} // namespace s2sim
