#include "s2sim/verify.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "s2sim/energy.hpp"
#include "s2sim/mac.hpp"
#include "s2sim/rng.hpp"

namespace s2sim {

std::vector<GoldenPacket> golden_packets()
{
    std::vector<GoldenPacket> g;
    g.push_back({"dnoc_zero", DNocPacket{}});
    {
        DNocPacket p;
        p.dest_x = 2;
        p.dest_y = 1;
        p.dest_pe_mask = 0b0011;
        p.packet_class = PacketClass::Spike;
        p.payload_len = 1;
        p.payload[0] = 0xDEADBEEF;
        g.push_back({"dnoc_spike_x2y1", p});
    }
    {
        DNocPacket p;
        p.dest_x = 15;
        p.dest_y = 15;
        p.dest_pe_mask = 0xF;
        p.packet_class = PacketClass::Test;
        p.cmd = 31;
        p.tag = 0xFF;
        p.payload_len = 4;
        p.address = 0xFFFFFFFF;
        p.payload = {0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF};
        g.push_back({"dnoc_all_ones", p});
    }
    {
        DNocPacket p;
        p.dest_x = 1;
        p.dest_pe_mask = 0b0101;
        p.packet_class = PacketClass::Config;
        p.cmd = 3;
        p.tag = 0x5A;
        p.payload_len = 2;
        p.address = 0xF0000000;
        p.payload = {0x00000800, 0xFFFFFF00, 0, 0};
        g.push_back({"dnoc_config_write", p});
    }
    {
        DNocPacket p;
        p.dest_y = 3;
        p.dest_pe_mask = 0b1000;
        p.packet_class = PacketClass::Interrupt;
        p.cmd = 1;
        p.address = 0x12345678;
        g.push_back({"dnoc_interrupt", p});
    }
    g.push_back({"spinn_mc_zero", SpinnPacket{}});
    g.push_back({"spinn_mc_payload_bit", SpinnPacket{SpinnKind::Multicast, 0, 0, 0, 1U}});
    g.push_back({"spinn_mc_key800", SpinnPacket{SpinnKind::Multicast, 1, 0, 0x00000800, std::nullopt}});
    g.push_back({"spinn_c2c_pe3", SpinnPacket{SpinnKind::CoreToCore, 0, 0, CoreAddress{0, 0, 3}.pack(), 42U}});
    g.push_back({"spinn_nn_ports45", SpinnPacket{SpinnKind::NearestNeighbour, 2, 3, 0b110000, std::nullopt}});

    // The rest are drawn from a fixed stream.
    RngStream rng(0x5EED, stream::build + 99);
    int i = 0;
    while (g.size() < 21) {
        DNocPacket p;
        p.dest_x = static_cast<std::uint8_t>(rng.below(16));
        p.dest_y = static_cast<std::uint8_t>(rng.below(16));
        p.dest_pe_mask = static_cast<std::uint8_t>(rng.below(16));
        p.packet_class = static_cast<PacketClass>(rng.below(5));
        p.cmd = static_cast<std::uint8_t>(rng.below(32));
        p.tag = static_cast<std::uint8_t>(rng.below(256));
        p.payload_len = static_cast<std::uint8_t>(rng.below(5));
        p.address = static_cast<std::uint32_t>(rng.next_u64());
        for (unsigned w = 0; w < p.payload_len; ++w) {
            p.payload[w] = static_cast<std::uint32_t>(rng.next_u64());
        }
        g.push_back({"dnoc_random_" + std::to_string(i++), p});
    }
    i = 0;
    while (g.size() < 32) {
        SpinnPacket p;
        p.kind = static_cast<SpinnKind>(rng.below(3));
        p.timestamp = static_cast<std::uint8_t>(rng.below(4));
        p.emergency = static_cast<std::uint8_t>(rng.below(4));
        p.key_or_addr = static_cast<std::uint32_t>(rng.next_u64());
        if (p.kind == SpinnKind::NearestNeighbour) {
            p.key_or_addr &= 0x3FU;
        }
        if (rng.below(2) == 1) {
            p.payload = static_cast<std::uint32_t>(rng.next_u64());
        }
        g.push_back({"spinn_random_" + std::to_string(i++), p});
    }
    return g;
}

std::string encode_hex(const GoldenPacket &g)
{
    if (const auto *d = std::get_if<DNocPacket>(&g.packet)) {
        return encode_dnoc(*d).to_hex();
    }
    return encode_spinn(std::get<SpinnPacket>(g.packet)).to_hex();
}

void write_golden(std::ostream &out)
{
    out << "name,family,hex\n";
    for (const auto &g : golden_packets()) {
        out << g.name << ',' << (std::holds_alternative<DNocPacket>(g.packet) ? "dnoc" : "spinn") << ','
            << encode_hex(g) << '\n';
    }
}

CheckResult verify_golden(std::istream &in)
{
    CheckResult res;
    std::map<std::string, std::string> expected;
    std::string line;
    std::getline(in, line);
    res.expect(line == "name,family,hex", "golden: header");
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string name, family, hex;
        std::getline(ss, name, ',');
        std::getline(ss, family, ',');
        std::getline(ss, hex, ',');
        expected[name] = hex;
    }
    const auto packets = golden_packets();
    res.expect(expected.size() == packets.size(), "golden: expected " + std::to_string(packets.size()) + " vectors");
    for (const auto &g : packets) {
        auto it = expected.find(g.name);
        if (it == expected.end()) {
            res.expect(false, "golden: " + g.name + " missing");
            continue;
        }
        res.expect(encode_hex(g) == it->second, "golden: " + g.name + " encoding");
        bool decoded = false;
        try {
            const BitVector bits = BitVector::from_hex(it->second);
            if (const auto *d = std::get_if<DNocPacket>(&g.packet)) {
                decoded = decode_dnoc(bits) == *d;
            } else {
                decoded = decode_spinn(bits) == std::get<SpinnPacket>(g.packet);
            }
        } catch (const std::exception &) {
            decoded = false;
        }
        res.expect(decoded, "golden: " + g.name + " decode");
    }
    return res;
}

CheckResult verify_energy_cases()
{
    CheckResult res;
    const EnergyParams p;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const auto idle = energy_cycle(PlId::PL1, 0.0, 0, 0, p);
    res.expect(rel(idle.components.total_j(), 22.38e-6) < 1e-12, "energy: PL1 idle tick = 22.38 uJ");
    const auto busy = energy_cycle(PlId::PL3, 0.2e-3, 250, 1000, p);
    res.expect(rel(busy.components.total_j(), 31.9245e-6) < 1e-12, "energy: PL3/0.2ms/250/1000 = 31.9245 uJ");
    const auto pl3 = energy_cycle(PlId::PL3, 1e-3, 0, 0, p, SleepMode::StayAtLevel);
    res.expect(rel(pl3.components.total_j(), 66.44e-6) < 1e-12, "energy: only-PL3 idle tick = 66.44 uJ");
    return res;
}

CheckResult verify_mac_oracles(std::uint64_t seed, int mm_cases, int conv_cases)
{
    CheckResult res;
    RngStream rng(seed, stream::dnn + 7);
    auto fill = [&rng](std::vector<std::uint8_t> &v) {
        for (auto &x : v) {
            x = static_cast<std::uint8_t>(rng.below(256));
        }
    };
    for (int c = 0; c < mm_cases; ++c) {
        const std::size_t m = 1 + rng.below(32), k = 1 + rng.below(32), n = 1 + rng.below(32);
        Mat8 a(m, k), b(k, n);
        fill(a.data);
        fill(b.data);
        Mat32 ref(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t q = 0; q < k; ++q) {
                    acc += static_cast<std::uint64_t>(a(i, q)) * b(q, j);
                }
                ref(i, j) = static_cast<std::uint32_t>(acc);
            }
        }
        res.expect(mm_execute(a, b) == ref, "mac: MM case " + std::to_string(c));
    }
    for (int c = 0; c < conv_cases; ++c) {
        const std::size_t r = 1 + rng.below(3), s = 1 + rng.below(3);
        const std::size_t h = r + rng.below(6), w = s + rng.below(6);
        const std::size_t ch = 1 + rng.below(4), f = 1 + rng.below(20);
        const ConvParams cp{1 + rng.below(2), rng.below(2)};
        Tensor8 in(h, w, ch);
        Kernel8 ker(r, s, ch, f);
        fill(in.data);
        fill(ker.data);
        const ConvShape sh{h, w, ch, r, s, f, cp};
        Tensor32 ref(sh.h_out(), sh.w_out(), f);
        for (std::size_t oy = 0; oy < ref.h; ++oy) {
            for (std::size_t ox = 0; ox < ref.w; ++ox) {
                for (std::size_t o = 0; o < f; ++o) {
                    std::uint64_t acc = 0;
                    for (std::size_t dy = 0; dy < r; ++dy) {
                        for (std::size_t dx = 0; dx < s; ++dx) {
                            const long iy = static_cast<long>(oy * cp.stride + dy) - static_cast<long>(cp.pad);
                            const long ix = static_cast<long>(ox * cp.stride + dx) - static_cast<long>(cp.pad);
                            if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(w)) {
                                continue;
                            }
                            for (std::size_t q = 0; q < ch; ++q) {
                                acc += static_cast<std::uint64_t>(
                                           in.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), q)) *
                                       ker.at(dy, dx, q, o);
                            }
                        }
                    }
                    ref.at(oy, ox, o) = static_cast<std::uint32_t>(acc);
                }
            }
        }
        const Tensor32 out = conv_execute(in, ker, cp);
        res.expect(out == ref, "mac: CONV case " + std::to_string(c));
        res.expect(conv_via_im2col(in, ker, cp) == out, "mac: CONV im2col case " + std::to_string(c));
    }
    return res;
}

} // namespace s2sim
