// synfire.hpp - synfire chain ring over n PEs
//
// Each PE holds one layer: 200 excitatory and 50 inhibitory neurons. Every
// neuron of a layer draws 60 excitatory inputs from the previous layer;
// every excitatory neuron draws 25 inputs from its own layer's inhibitory
// population. The last layer feeds the first.
//
// Multicast keys: bits 31..16 PE, bit 15 population (1 = inhibitory),
// bits 14..0 neuron index.
#ifndef S2SIM_BENCH_SYNFIRE_HPP
#define S2SIM_BENCH_SYNFIRE_HPP

#include <cstdint>
#include <vector>

#include "s2sim/pe.hpp"
#include "s2sim/spinn_router.hpp"

namespace s2sim {

struct SynfireStimulus
{
    int spikes{40};
    double jitter_ms{1.0};
    std::int64_t center_tick{3};
    float weight{3.0F};
};

struct SynfireSpec
{
    int n_pes{8};
    int exc_per_layer{200};
    int inh_per_layer{50};
    int fanin_exc{60};
    int fanin_inh{25};
    int delay_inh_to_exc{8};
    int delay_exc_to_next{10};
    // Calibrated: the pulse propagates around the ring as a doublet with
    // sparse noise-driven background (scripts/calibrate_synfire.sh).
    float w_exc{1.2F};
    float w_inh{-4.0F};
    double noise_mu{6.0};
    double noise_sigma{13.0};
    LifParams lif{10.0, -65.0, -50.0, -65.0, 1.0, 2, 5.0};
    SynfireStimulus stimulus;
};

void validate(const SynfireSpec &s);

constexpr std::uint32_t kStimulusKeyBase = 0xFFFF0000U;
constexpr std::uint32_t kSynfirePopMask = 0xFFFF8000U;

std::uint32_t synfire_key(int pe, bool inhibitory, int index);

struct StimulusSpike
{
    std::uint32_t key{0};
    std::int64_t tick{0};
};

struct SynfireNetwork
{
    SynfireSpec spec;
    std::vector<PeProgram> programs;
    RoutingTable table;
    std::vector<StimulusSpike> stimulus;      // delivered to PE0's FIFO
    std::vector<std::int64_t> ring_synapses;  // per PE, stimulus rows excluded

    // Mean outgoing ring synapses per neuron, over all neurons.
    double average_fanout() const;
};

SynfireNetwork build_synfire(const SynfireSpec &spec, std::uint64_t seed);

} // namespace s2sim

#endif
