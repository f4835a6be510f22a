#include <catch_amalgamated.hpp>

#include <fstream>

#include "oracles.hpp"
#include "s2sim/packets.hpp"
#include "s2sim/rng.hpp"
#include "s2sim/verify.hpp"

using namespace s2sim;

namespace {

DNocPacket random_dnoc(RngStream &r)
{
    DNocPacket p;
    p.dest_x = static_cast<std::uint8_t>(r.below(16));
    p.dest_y = static_cast<std::uint8_t>(r.below(16));
    p.dest_pe_mask = static_cast<std::uint8_t>(r.below(16));
    p.packet_class = static_cast<PacketClass>(r.below(5));
    p.cmd = static_cast<std::uint8_t>(r.below(32));
    p.tag = static_cast<std::uint8_t>(r.below(256));
    p.payload_len = static_cast<std::uint8_t>(r.below(5));
    p.address = static_cast<std::uint32_t>(r.next_u64());
    for (unsigned i = 0; i < p.payload_len; ++i) {
        p.payload[i] = static_cast<std::uint32_t>(r.next_u64());
    }
    return p;
}

SpinnPacket random_spinn(RngStream &r)
{
    SpinnPacket p;
    p.kind = static_cast<SpinnKind>(r.below(3));
    p.timestamp = static_cast<std::uint8_t>(r.below(4));
    p.emergency = static_cast<std::uint8_t>(r.below(4));
    p.key_or_addr = static_cast<std::uint32_t>(r.next_u64());
    if (r.below(2) == 1) {
        p.payload = static_cast<std::uint32_t>(r.next_u64());
    }
    return p;
}

} // namespace

TEST_CASE("all-zero DNoC packet", "[packets][dnoc]")
{
    const BitVector bits = encode_dnoc(DNocPacket{});
    REQUIRE(bits.size() == 64);
    REQUIRE(bits.popcount() == 0);
}

TEST_CASE("spike packet with one payload word", "[packets][dnoc]")
{
    DNocPacket p;
    p.dest_x = 2;
    p.dest_y = 1;
    p.dest_pe_mask = 0b0011;
    p.packet_class = PacketClass::Spike;
    p.payload_len = 1;
    p.payload[0] = 0xDEADBEEF;
    const BitVector bits = encode_dnoc(p);
    REQUIRE(bits.size() == 96);
    REQUIRE(bits.to_hex() == oracle::dnoc_hex(p));
    REQUIRE(decode_dnoc(bits) == p);
}

TEST_CASE("DNoC field bounds", "[packets][dnoc]")
{
    DNocPacket p;
    p.payload_len = 5;
    REQUIRE_THROWS_AS(encode_dnoc(p), PacketError);
    p.payload_len = 0;
    p.dest_x = 16;
    REQUIRE_THROWS_AS(encode_dnoc(p), PacketError);
    p.dest_x = 0;
    p.cmd = 32;
    REQUIRE_THROWS_AS(validate(p), PacketError);
}

TEST_CASE("DNoC malformed frames", "[packets][dnoc]")
{
    DNocPacket p;
    p.payload_len = 2;
    BitVector bits = encode_dnoc(p);
    BitVector truncated = bits;
    truncated.resize(bits.size() - 32);
    REQUIRE_THROWS_AS(decode_dnoc(truncated), PacketError);
    BitVector longer = bits;
    longer.resize(bits.size() + 32);
    REQUIRE_THROWS_AS(decode_dnoc(longer), PacketError);
    REQUIRE_THROWS_AS(decode_dnoc(BitVector(40)), PacketError);
}

TEST_CASE("DNoC random round trips match the shift oracle", "[packets][dnoc][property]")
{
    RngStream r(2024, stream::traffic);
    for (int i = 0; i < 10000; ++i) {
        const DNocPacket p = random_dnoc(r);
        const BitVector bits = encode_dnoc(p);
        REQUIRE(bits.size() == p.width_bits());
        REQUIRE(bits.to_hex() == oracle::dnoc_hex(p));
        REQUIRE(decode_dnoc(bits) == p);
        REQUIRE(decode_dnoc(BitVector::from_hex(bits.to_hex())) == p);
    }
}

TEST_CASE("SpiNNaker parity", "[packets][spinn]")
{
    SpinnPacket p;
    REQUIRE(spinn_parity(p) == 0);
    // The payload-present flag counts as a one.
    p.payload = 1;
    REQUIRE(spinn_parity(p) == 0);
    p.payload = 3;
    REQUIRE(spinn_parity(p) == 1);
    REQUIRE(encode_spinn(p).size() == 72);
    REQUIRE(encode_spinn(SpinnPacket{}).size() == 40);
}

TEST_CASE("SpiNNaker random round trips and single-bit flips", "[packets][spinn][property]")
{
    RngStream r(77, stream::traffic + 1);
    for (int i = 0; i < 10000; ++i) {
        const SpinnPacket p = random_spinn(r);
        const BitVector bits = encode_spinn(p);
        REQUIRE(bits.to_hex() == oracle::spinn_hex(p));
        REQUIRE(bits.popcount() % 2 == 0);
        REQUIRE(decode_spinn(bits) == p);
        for (std::size_t b = 0; b < bits.size(); ++b) {
            if (b == 7) {
                continue;
            }
            BitVector bad = bits;
            bad.flip(b);
            REQUIRE_FALSE(spinn_parity_ok(bad));
            REQUIRE_THROWS_AS(decode_spinn(bad), PacketError);
        }
    }
}

TEST_CASE("SpiNNaker bad lengths and kinds", "[packets][spinn]")
{
    REQUIRE_THROWS_AS(decode_spinn(BitVector(41)), PacketError);
    BitVector bits;
    bits.append(0b11000000, 8);  // kind 3, even number of ones so parity holds
    bits.append(0, 32);
    REQUIRE_THROWS_AS(decode_spinn(bits), PacketError);
}

TEST_CASE("core address packing", "[packets]")
{
    const CoreAddress a{3, 4, 7};
    REQUIRE(a.pack() == 0x03040007U);
    const CoreAddress b = CoreAddress::unpack(0x03040007U);
    REQUIRE(b.chip_x == 3);
    REQUIRE(b.chip_y == 4);
    REQUIRE(b.pe_id == 7);
}

TEST_CASE("golden vectors are stable", "[packets][golden]")
{
    const auto golden = golden_packets();
    REQUIRE(golden.size() == 32);
    std::ifstream in(std::string(S2SIM_SOURCE_DIR) + "/golden/packets.csv");
    REQUIRE(in.good());
    const CheckResult res = verify_golden(in);
    INFO((res.failures.empty() ? std::string() : res.failures.front()));
    REQUIRE(res.ok());
    for (const auto &g : golden) {
        const std::string hex = encode_hex(g);
        if (const auto *d = std::get_if<DNocPacket>(&g.packet)) {
            REQUIRE(hex == oracle::dnoc_hex(*d));
        } else {
            REQUIRE(hex == oracle::spinn_hex(std::get<SpinnPacket>(g.packet)));
        }
    }
}
