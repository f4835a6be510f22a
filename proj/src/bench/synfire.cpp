#include "s2sim/bench/synfire.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "s2sim/rng.hpp"

namespace s2sim {

void validate(const SynfireSpec &s)
{
    auto fail = [](const std::string &what) { throw std::invalid_argument("synfire: " + what); };
    if (s.n_pes < 1 || s.n_pes > 0xFFFE) {
        fail("n_pes must be in [1, 65534]");
    }
    if (s.exc_per_layer < 1 || s.inh_per_layer < 1 || s.exc_per_layer > 0x7FFF || s.inh_per_layer > 0x7FFF) {
        fail("population sizes must be in [1, 32767]");
    }
    if (s.fanin_exc < 0 || s.fanin_exc > s.exc_per_layer) {
        fail("fanin_exc " + std::to_string(s.fanin_exc) + " exceeds excitatory population " +
             std::to_string(s.exc_per_layer));
    }
    if (s.fanin_inh < 0 || s.fanin_inh > s.inh_per_layer) {
        fail("fanin_inh " + std::to_string(s.fanin_inh) + " exceeds inhibitory population " +
             std::to_string(s.inh_per_layer));
    }
    if (s.delay_inh_to_exc < 1 || s.delay_exc_to_next < 1 || s.delay_inh_to_exc > 0xFFFF ||
        s.delay_exc_to_next > 0xFFFF) {
        fail("delays must be in [1, 65535] ticks");
    }
    if (s.stimulus.spikes < 0 || s.stimulus.jitter_ms < 0.0 || s.stimulus.center_tick < 0) {
        fail("stimulus spikes, jitter and tick must be non-negative");
    }
    if (s.noise_sigma < 0.0) {
        fail("noise_sigma must be non-negative");
    }
}

std::uint32_t synfire_key(int pe, bool inhibitory, int index)
{
    return (static_cast<std::uint32_t>(pe) << 16U) | (inhibitory ? 0x8000U : 0U) | static_cast<std::uint32_t>(index);
}

double SynfireNetwork::average_fanout() const
{
    const std::int64_t total = std::accumulate(ring_synapses.begin(), ring_synapses.end(), std::int64_t{0});
    const auto neurons = static_cast<std::int64_t>(spec.n_pes) * (spec.exc_per_layer + spec.inh_per_layer);
    return neurons == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(neurons);
}

namespace {

// k distinct indices from [0, n), partial Fisher-Yates.
std::vector<int> sample_without_replacement(RngStream &rng, int n, int k)
{
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

} // namespace

SynfireNetwork build_synfire(const SynfireSpec &spec, std::uint64_t seed)
{
    validate(spec);
    const int n_exc = spec.exc_per_layer;
    const int n_inh = spec.inh_per_layer;
    const int layer = n_exc + n_inh;

    SynfireNetwork net{spec, {}, RoutingTable(std::max<std::size_t>(1024, 2 * static_cast<std::size_t>(spec.n_pes))),
                       {}, {}};
    net.programs.resize(static_cast<std::size_t>(spec.n_pes));
    net.ring_synapses.assign(static_cast<std::size_t>(spec.n_pes), 0);

    RngStream rng = seeded_rng(seed, stream::build);
    for (int pe = 0; pe < spec.n_pes; ++pe) {
        auto &prog = net.programs[static_cast<std::size_t>(pe)];
        prog.n_neurons = static_cast<std::uint32_t>(layer);
        prog.lif = spec.lif;
        prog.noise_mu = spec.noise_mu;
        prog.noise_sigma = spec.noise_sigma;
        prog.neuron_keys.reserve(static_cast<std::size_t>(layer));
        for (int i = 0; i < n_exc; ++i) {
            prog.neuron_keys.push_back(synfire_key(pe, false, i));
        }
        for (int i = 0; i < n_inh; ++i) {
            prog.neuron_keys.push_back(synfire_key(pe, true, i));
        }

        const int prev = (pe + spec.n_pes - 1) % spec.n_pes;
        // Every neuron of this layer: fanin_exc sources from the previous layer.
        for (int target = 0; target < layer; ++target) {
            for (int src : sample_without_replacement(rng, n_exc, spec.fanin_exc)) {
                prog.rows[synfire_key(prev, false, src)].push_back(
                    Synapse{static_cast<std::uint32_t>(target), spec.w_exc,
                            static_cast<std::uint16_t>(spec.delay_exc_to_next)});
            }
        }
        // Excitatory neurons: fanin_inh sources from this layer's inhibitory population.
        for (int target = 0; target < n_exc; ++target) {
            for (int src : sample_without_replacement(rng, n_inh, spec.fanin_inh)) {
                prog.rows[synfire_key(pe, true, src)].push_back(
                    Synapse{static_cast<std::uint32_t>(target), spec.w_inh,
                            static_cast<std::uint16_t>(spec.delay_inh_to_exc)});
            }
        }
        std::int64_t count = 0;
        for (const auto &[key, row] : prog.rows) {
            count += static_cast<std::int64_t>(row.size());
        }
        net.ring_synapses[static_cast<std::size_t>(pe)] = count;

        // Excitatory spikes go to the next PE, inhibitory ones stay local.
        RouteSet next;
        next.add_pe((pe + 1) % spec.n_pes);
        net.table.add(RoutingEntry{synfire_key(pe, false, 0), kSynfirePopMask, next});
        RouteSet self;
        self.add_pe(pe);
        net.table.add(RoutingEntry{synfire_key(pe, true, 0), kSynfirePopMask, self});
    }

    // Stimulus pulse packet into PE0: each stimulus source contacts every
    // neuron of layer 0 with delay 1.
    RngStream srng = seeded_rng(seed, stream::stimulus);
    auto &p0 = net.programs.front();
    for (int s = 0; s < spec.stimulus.spikes; ++s) {
        const std::uint32_t key = kStimulusKeyBase + static_cast<std::uint32_t>(s);
        auto &row = p0.rows[key];
        for (int target = 0; target < layer; ++target) {
            row.push_back(Synapse{static_cast<std::uint32_t>(target), spec.stimulus.weight, 1});
        }
        const double t = static_cast<double>(spec.stimulus.center_tick) + srng.normal(0.0, spec.stimulus.jitter_ms);
        net.stimulus.push_back(StimulusSpike{key, std::max<std::int64_t>(0, std::llround(t))});
    }
    std::stable_sort(net.stimulus.begin(), net.stimulus.end(),
                     [](const StimulusSpike &a, const StimulusSpike &b) { return a.tick < b.tick; });
    return net;
}

} // namespace s2sim
