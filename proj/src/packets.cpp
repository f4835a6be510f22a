#include "s2sim/packets.hpp"

#include <cctype>

namespace s2sim {

void BitVector::append(std::uint64_t value, unsigned width)
{
    for (unsigned i = width; i-- > 0;) {
        bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
    }
}

std::uint64_t BitVector::read(std::size_t offset, unsigned width) const
{
    if (width > 64 || offset + width > bits_.size()) {
        throw PacketError("BitVector::read out of range");
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        v = (v << 1U) | bits_[offset + i];
    }
    return v;
}

std::size_t BitVector::popcount() const noexcept
{
    std::size_t n = 0;
    for (auto b : bits_) {
        n += b;
    }
    return n;
}

std::string BitVector::to_hex() const
{
    if (bits_.size() % 4 != 0) {
        throw PacketError("BitVector::to_hex: width not a multiple of 4");
    }
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(bits_.size() / 4);
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
        out.push_back(digits[read(i, 4)]);
    }
    return out;
}

BitVector BitVector::from_hex(std::string_view hex)
{
    BitVector v;
    for (char c : hex) {
        const auto u = static_cast<unsigned char>(c);
        if (!std::isxdigit(u)) {
            throw PacketError("BitVector::from_hex: invalid digit '" + std::string(1, c) + "'");
        }
        const unsigned nibble = std::isdigit(u) ? u - '0' : (std::toupper(u) - 'A' + 10);
        v.append(nibble, 4);
    }
    return v;
}

std::string_view to_string(PacketClass c)
{
    switch (c) {
    case PacketClass::Data:
        return "Data";
    case PacketClass::Spike:
        return "Spike";
    case PacketClass::Interrupt:
        return "Interrupt";
    case PacketClass::Config:
        return "Config";
    case PacketClass::Test:
        return "Test";
    }
    return "Invalid";
}

std::string_view to_string(SpinnKind k)
{
    switch (k) {
    case SpinnKind::Multicast:
        return "Multicast";
    case SpinnKind::CoreToCore:
        return "CoreToCore";
    case SpinnKind::NearestNeighbour:
        return "NearestNeighbour";
    }
    return "Invalid";
}

void validate(const DNocPacket &p)
{
    if (p.dest_x > 0xF || p.dest_y > 0xF || p.dest_pe_mask > 0xF) {
        throw PacketError("DNoC packet: destination field exceeds 4 bits");
    }
    if (static_cast<unsigned>(p.packet_class) > static_cast<unsigned>(PacketClass::Test)) {
        throw PacketError("DNoC packet: unknown packet class");
    }
    if (p.cmd > 0x1F) {
        throw PacketError("DNoC packet: cmd exceeds 5 bits");
    }
    if (p.payload_len > kMaxPayloadWords) {
        throw PacketError("DNoC packet: payload_len " + std::to_string(p.payload_len) + " > 4");
    }
}

BitVector encode_dnoc(const DNocPacket &p)
{
    validate(p);
    BitVector bits;
    bits.append(p.dest_x, 4);
    bits.append(p.dest_y, 4);
    bits.append(p.dest_pe_mask, 4);
    bits.append(static_cast<unsigned>(p.packet_class), 3);
    bits.append(p.cmd, 5);
    bits.append(p.tag, 8);
    bits.append(p.payload_len, 4);
    bits.append(p.address, 32);
    for (unsigned w = 0; w < p.payload_len; ++w) {
        bits.append(p.payload[w], 32);
    }
    return bits;
}

DNocPacket decode_dnoc(const BitVector &bits)
{
    if (bits.size() < kDnocHeaderBits) {
        throw PacketError("malformed DNoC frame: " + std::to_string(bits.size()) + " bits, header needs 64");
    }
    DNocPacket p;
    p.dest_x = static_cast<std::uint8_t>(bits.read(0, 4));
    p.dest_y = static_cast<std::uint8_t>(bits.read(4, 4));
    p.dest_pe_mask = static_cast<std::uint8_t>(bits.read(8, 4));
    const auto cls = bits.read(12, 3);
    if (cls > static_cast<unsigned>(PacketClass::Test)) {
        throw PacketError("malformed DNoC frame: packet class " + std::to_string(cls));
    }
    p.packet_class = static_cast<PacketClass>(cls);
    p.cmd = static_cast<std::uint8_t>(bits.read(15, 5));
    p.tag = static_cast<std::uint8_t>(bits.read(20, 8));
    p.payload_len = static_cast<std::uint8_t>(bits.read(28, 4));
    if (p.payload_len > kMaxPayloadWords) {
        throw PacketError("malformed DNoC frame: payload_len " + std::to_string(p.payload_len));
    }
    if (bits.size() != p.width_bits()) {
        throw PacketError("malformed DNoC frame: " + std::to_string(bits.size()) + " bits, header declares " +
                          std::to_string(p.width_bits()));
    }
    p.address = static_cast<std::uint32_t>(bits.read(32, 32));
    for (unsigned w = 0; w < p.payload_len; ++w) {
        p.payload[w] = static_cast<std::uint32_t>(bits.read(64 + 32U * w, 32));
    }
    return p;
}

namespace {

BitVector encode_spinn_with_parity(const SpinnPacket &p, unsigned parity)
{
    if (static_cast<unsigned>(p.kind) > static_cast<unsigned>(SpinnKind::NearestNeighbour)) {
        throw PacketError("SpiNNaker packet: invalid kind");
    }
    if (p.timestamp > 3 || p.emergency > 3) {
        throw PacketError("SpiNNaker packet: control field exceeds 2 bits");
    }
    BitVector bits;
    bits.append(static_cast<unsigned>(p.kind), 2);
    bits.append(p.payload.has_value() ? 1U : 0U, 1);
    bits.append(p.timestamp, 2);
    bits.append(p.emergency, 2);
    bits.append(parity, 1);
    bits.append(p.key_or_addr, 32);
    if (p.payload) {
        bits.append(*p.payload, 32);
    }
    return bits;
}

} // namespace

std::uint8_t spinn_parity(const SpinnPacket &p)
{
    const auto bits = encode_spinn_with_parity(p, 0);
    return static_cast<std::uint8_t>(bits.popcount() & 1U);
}

BitVector encode_spinn(const SpinnPacket &p)
{
    return encode_spinn_with_parity(p, spinn_parity(p));
}

bool spinn_parity_ok(const BitVector &bits)
{
    return (bits.popcount() & 1U) == 0;
}

SpinnPacket decode_spinn(const BitVector &bits)
{
    if (bits.size() != 40 && bits.size() != 72) {
        throw PacketError("malformed SpiNNaker frame: " + std::to_string(bits.size()) + " bits");
    }
    const auto kind = bits.read(0, 2);
    if (kind > static_cast<unsigned>(SpinnKind::NearestNeighbour)) {
        throw PacketError("malformed SpiNNaker frame: kind " + std::to_string(kind));
    }
    const bool has_payload = bits.read(2, 1) != 0;
    if (bits.size() != (has_payload ? 72U : 40U)) {
        throw PacketError("malformed SpiNNaker frame: payload flag disagrees with length");
    }
    if (!spinn_parity_ok(bits)) {
        throw PacketError("SpiNNaker frame parity error");
    }
    SpinnPacket p;
    p.kind = static_cast<SpinnKind>(kind);
    p.timestamp = static_cast<std::uint8_t>(bits.read(3, 2));
    p.emergency = static_cast<std::uint8_t>(bits.read(5, 2));
    p.key_or_addr = static_cast<std::uint32_t>(bits.read(8, 32));
    if (has_payload) {
        p.payload = static_cast<std::uint32_t>(bits.read(40, 32));
    }
    return p;
}

} // namespace s2sim
