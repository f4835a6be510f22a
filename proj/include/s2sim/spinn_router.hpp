// spinn_router.hpp - chip-level SpiNNaker2 packet router
//
// Multicast packets are routed by key through a masked table (lowest
// index wins), core-to-core packets by destination address and nearest
// neighbour packets by a 6-bit port mask. A packet blocked at an output
// for more than drop_timeout cycles is dropped and logged.
#ifndef S2SIM_SPINN_ROUTER_HPP
#define S2SIM_SPINN_ROUTER_HPP

#include <array>
#include <bitset>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "s2sim/packets.hpp"

namespace s2sim {

constexpr int kNumLinks = 6;
constexpr int kMaxPes = 256;

class RouteSet
{
public:
    void add_pe(int pe);
    void add_link(int link);
    bool has_pe(int pe) const { return pes_.test(static_cast<std::size_t>(pe)); }
    bool has_link(int link) const { return ((links_ >> link) & 1U) != 0; }
    bool empty() const noexcept { return pes_.none() && links_ == 0; }
    std::size_t size() const noexcept { return pes_.count() + std::bitset<8>(links_).count(); }
    std::vector<int> pes() const;
    std::vector<int> links() const;
    std::uint8_t link_bits() const noexcept { return links_; }

    // "PE2;PE5;L0"
    std::string to_string() const;
    static RouteSet parse(const std::string &text);

    bool operator==(const RouteSet &) const = default;

private:
    std::bitset<kMaxPes> pes_;
    std::uint8_t links_{0};
};

struct RoutingEntry
{
    std::uint32_t key{0};
    std::uint32_t mask{0};
    RouteSet route;
};

// Throws std::invalid_argument unless (key & ~mask) == 0 and route is nonempty.
void validate(const RoutingEntry &e);

enum class DefaultRoutePolicy : std::uint8_t
{
    Fixed,              // always default_link
    OppositeOfArrival,  // link opposite the arrival link, else default_link
};

class RoutingTable
{
public:
    explicit RoutingTable(std::size_t capacity = 1024, int default_link = 0,
                          DefaultRoutePolicy policy = DefaultRoutePolicy::OppositeOfArrival);

    void add(const RoutingEntry &e);
    void clear() { entries_.clear(); }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    int default_link() const noexcept { return default_link_; }
    DefaultRoutePolicy policy() const noexcept { return policy_; }
    const std::vector<RoutingEntry> &entries() const noexcept { return entries_; }

    std::optional<std::size_t> match(std::uint32_t key) const;

    // CSV: key,mask,route_list with hex key/mask.
    void write_csv(std::ostream &out) const;
    static RoutingTable read_csv(std::istream &in, std::size_t capacity = 1024, int default_link = 0);

private:
    std::size_t capacity_;
    int default_link_;
    DefaultRoutePolicy policy_;
    std::vector<RoutingEntry> entries_;
};

// First matching entry wins; a miss yields the default route.
RouteSet route_multicast(const RoutingTable &table, std::uint32_t key, std::optional<int> arrival_link = std::nullopt);

struct ChipContext
{
    std::uint8_t chip_x{0};
    std::uint8_t chip_y{0};
    int n_pes{8};
};

struct RouteOutcome
{
    RouteSet route;
    std::optional<std::string> drop_reason;  // set when the packet must be dropped
};

// Off-chip addresses leave by dimension order: E(0)/W(3) first, then N(2)/S(5).
RouteOutcome route_core_to_core(const SpinnPacket &pkt, const ChipContext &chip);
RouteOutcome route_nearest_neighbour(const SpinnPacket &pkt);

enum class DropDecision : std::uint8_t
{
    Keep,
    Drop,
};

constexpr int kDefaultDropTimeout = 128;

DropDecision congestion_drop(std::int64_t stall_cycles, std::int64_t timeout = kDefaultDropTimeout);

struct SpinnRouterParams
{
    ChipContext chip;
    std::int64_t drop_timeout{kDefaultDropTimeout};
    // Cycles an external link is busy per packet sent on it.
    std::int64_t link_cycles_per_packet{1};
};

struct RouterDrop
{
    std::int64_t cycle{0};
    SpinnPacket packet;
    std::string reason;
};

struct ClassCounters
{
    std::uint64_t injected{0};
    std::uint64_t delivered{0};
    std::uint64_t dropped{0};
};

// A group of PEs in one QPE receives one DNoC packet with a PE mask.
struct QpeTarget
{
    int qpe{0};
    std::uint8_t pe_mask{0};
};

class SpinnRouter
{
public:
    // Returns true if the NoC accepted the copy for this QPE this cycle.
    using NocEmit = std::function<bool(const QpeTarget &, const SpinnPacket &)>;

    SpinnRouter(RoutingTable table, SpinnRouterParams params);

    RoutingTable &table() noexcept { return table_; }
    const RoutingTable &table() const noexcept { return table_; }
    const SpinnRouterParams &params() const noexcept { return params_; }

    void accept(const SpinnPacket &pkt, std::optional<int> arrival_link = std::nullopt);
    // Processes the head packet for one router cycle.
    void step(std::int64_t now, const NocEmit &emit);
    bool idle() const noexcept { return queue_.empty(); }
    std::size_t queued() const noexcept { return queue_.size(); }

    void set_link_blocked(int link, bool blocked);

    const ClassCounters &counters(SpinnKind k) const { return counters_.at(static_cast<std::size_t>(k)); }
    const std::vector<RouterDrop> &drop_log() const noexcept { return drops_; }
    std::uint64_t drops_on_link(int link) const { return link_drops_.at(static_cast<std::size_t>(link)); }
    std::uint64_t drops_on_noc() const noexcept { return noc_drops_; }
    std::uint64_t link_packets(int link) const { return link_sent_.at(static_cast<std::size_t>(link)); }

private:
    struct Pending
    {
        SpinnPacket packet;
        std::optional<int> arrival_link;
        bool routed{false};
        std::int64_t head_since{0};
        std::vector<QpeTarget> qpes;
        std::vector<int> links;
    };

    RouteOutcome route(const Pending &p) const;
    void finish(bool dropped, std::int64_t now, const std::string &reason);

    RoutingTable table_;
    SpinnRouterParams params_;
    std::deque<Pending> queue_;
    std::array<ClassCounters, 3> counters_{};
    std::array<std::int64_t, kNumLinks> link_free_{};
    std::array<bool, kNumLinks> link_blocked_{};
    std::array<std::uint64_t, kNumLinks> link_drops_{};
    std::array<std::uint64_t, kNumLinks> link_sent_{};
    std::uint64_t noc_drops_{0};
    std::vector<RouterDrop> drops_;
};

} // namespace s2sim

#endif
