#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "s2sim/bench/synfire.hpp"

using namespace s2sim;

TEST_CASE("synapse count and fan-out for many seeds", "[synfire][property]")
{
    const SynfireSpec spec;
    REQUIRE(250 * 60 + 200 * 25 == 20000);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto net = build_synfire(spec, seed);
        REQUIRE(net.programs.size() == 8);
        for (std::size_t pe = 0; pe < 8; ++pe) {
            REQUIRE(net.ring_synapses[pe] == 20000);
        }
        REQUIRE(net.average_fanout() == 80.0);
    }
}

TEST_CASE("fan-in and fan-out agree row by row", "[synfire]")
{
    const SynfireSpec spec;
    const auto net = build_synfire(spec, 7);
    // Count, per target PE, incoming rows by source population.
    for (int pe = 0; pe < spec.n_pes; ++pe) {
        const auto &prog = net.programs[static_cast<std::size_t>(pe)];
        const int prev = (pe + spec.n_pes - 1) % spec.n_pes;
        std::map<std::uint32_t, std::size_t> fanin;
        std::size_t from_exc = 0;
        std::size_t from_inh = 0;
        for (const auto &[key, row] : prog.rows) {
            if (key >= kStimulusKeyBase) {
                continue;
            }
            const int src_pe = static_cast<int>(key >> 16U);
            const bool inh = ((key >> 15U) & 1U) != 0;
            for (const auto &s : row) {
                ++fanin[s.target];
                if (inh) {
                    REQUIRE(src_pe == pe);
                    REQUIRE(s.delay == spec.delay_inh_to_exc);
                    REQUIRE(s.target < static_cast<std::uint32_t>(spec.exc_per_layer));
                    REQUIRE(s.weight == spec.w_inh);
                    ++from_inh;
                } else {
                    REQUIRE(src_pe == prev);
                    REQUIRE(s.delay == spec.delay_exc_to_next);
                    REQUIRE(s.weight == spec.w_exc);
                    ++from_exc;
                }
            }
        }
        REQUIRE(from_exc == 250U * 60U);
        REQUIRE(from_inh == 200U * 25U);
        for (std::uint32_t n = 0; n < 250; ++n) {
            REQUIRE(fanin[n] == (n < 200 ? 85U : 60U));
        }
    }
}

TEST_CASE("last layer feeds the first", "[synfire][routing]")
{
    const SynfireSpec spec;
    const auto net = build_synfire(spec, 3);
    const auto last_exc = route_multicast(net.table, synfire_key(7, false, 123));
    REQUIRE(last_exc.pes() == std::vector<int>{0});
    const auto last_inh = route_multicast(net.table, synfire_key(7, true, 4));
    REQUIRE(last_inh.pes() == std::vector<int>{7});
    for (int pe = 0; pe < 7; ++pe) {
        REQUIRE(route_multicast(net.table, synfire_key(pe, false, 0)).pes() == std::vector<int>{pe + 1});
    }
    // PE0 holds rows for layer 7's excitatory keys.
    std::size_t rows_from_7 = 0;
    for (const auto &[key, row] : net.programs[0].rows) {
        if (key < kStimulusKeyBase && (key >> 16U) == 7U) {
            ++rows_from_7;
        }
    }
    REQUIRE(rows_from_7 > 0);
}

TEST_CASE("stimulus pulse targets PE0", "[synfire]")
{
    const SynfireSpec spec;
    const auto net = build_synfire(spec, 11);
    REQUIRE(net.stimulus.size() == static_cast<std::size_t>(spec.stimulus.spikes));
    std::set<std::uint32_t> keys;
    for (const auto &s : net.stimulus) {
        REQUIRE(s.key >= kStimulusKeyBase);
        REQUIRE(net.programs[0].rows.count(s.key) == 1);
        REQUIRE(std::abs(s.tick - spec.stimulus.center_tick) <= 3);
        keys.insert(s.key);
    }
    for (std::size_t pe = 1; pe < 8; ++pe) {
        for (const auto &[key, row] : net.programs[pe].rows) {
            REQUIRE(key < kStimulusKeyBase);
        }
    }
}

TEST_CASE("inconsistent specs are rejected", "[synfire][errors]")
{
    SynfireSpec s;
    s.fanin_exc = 201;
    REQUIRE_THROWS(build_synfire(s, 1));
    s = SynfireSpec{};
    s.fanin_inh = 51;
    REQUIRE_THROWS(build_synfire(s, 1));
    s = SynfireSpec{};
    s.n_pes = 0;
    REQUIRE_THROWS(build_synfire(s, 1));
}

TEST_CASE("build is deterministic per seed", "[synfire]")
{
    const SynfireSpec spec;
    const auto a = build_synfire(spec, 5);
    const auto b = build_synfire(spec, 5);
    const auto c = build_synfire(spec, 6);
    REQUIRE(a.programs[3].rows.at(synfire_key(2, false, 17)).size() ==
            b.programs[3].rows.at(synfire_key(2, false, 17)).size());
    bool differs = false;
    for (std::uint32_t i = 0; i < 200 && !differs; ++i) {
        const auto key = synfire_key(2, false, static_cast<int>(i));
        const auto ia = a.programs[3].rows.find(key);
        const auto ic = c.programs[3].rows.find(key);
        const bool ha = ia != a.programs[3].rows.end();
        const bool hc = ic != c.programs[3].rows.end();
        differs = ha != hc || (ha && ia->second.size() != ic->second.size());
    }
    REQUIRE(differs);
}
