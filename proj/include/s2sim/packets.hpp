// packets.hpp - wire formats of the two packet families
//
// Layouts are most-significant field first; see WIRE_FORMAT.md.
//
//   DNoC/CNoC frame (64 + 32*payload_len bits):
//     [ 0.. 3] dest_x        [ 4.. 7] dest_y      [ 8..11] dest_pe_mask
//     [12..14] packet_class  (15-bit NoC header ends)
//     [15..19] cmd           [20..27] tag         [28..31] payload_len
//     [32..63] address       [64.. ] payload words, word 0 first
//
//   SpiNNaker frame (40 or 72 bits):
//     [0..1] kind  [2] payload_present  [3..4] timestamp  [5..6] emergency
//     [7] parity   [8..39] key_or_addr  [40..71] payload (if present)
#ifndef S2SIM_PACKETS_HPP
#define S2SIM_PACKETS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace s2sim {

class PacketError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// MSB-first bit string of arbitrary width.
class BitVector
{
public:
    BitVector() = default;
    explicit BitVector(std::size_t width) : bits_(width, 0) {}

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_.at(i) != 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1U; }
    void resize(std::size_t width) { bits_.resize(width, 0); }

    // Appends the low `width` bits of value, most significant first.
    void append(std::uint64_t value, unsigned width);
    std::uint64_t read(std::size_t offset, unsigned width) const;
    std::size_t popcount() const noexcept;

    // Upper-case hex; width must be a multiple of 4.
    std::string to_hex() const;
    static BitVector from_hex(std::string_view hex);

    bool operator==(const BitVector &) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

enum class PacketClass : std::uint8_t
{
    Data = 0,
    Spike = 1,
    Interrupt = 2,
    Config = 3,
    Test = 4,
};

std::string_view to_string(PacketClass c);

constexpr unsigned kMaxPayloadWords = 4;
constexpr std::size_t kDnocHeaderBits = 64;
constexpr std::size_t kDnocMaxBits = 192;

struct DNocPacket
{
    std::uint8_t dest_x{0};        // 4 bit
    std::uint8_t dest_y{0};        // 4 bit
    std::uint8_t dest_pe_mask{0};  // 4 bit, PE0 = bit 0
    PacketClass packet_class{PacketClass::Data};
    std::uint8_t cmd{0};           // 5 bit
    std::uint8_t tag{0};           // 8 bit
    std::uint8_t payload_len{0};   // 32-bit words, 0..4
    std::uint32_t address{0};
    std::array<std::uint32_t, kMaxPayloadWords> payload{};

    std::size_t width_bits() const noexcept { return kDnocHeaderBits + 32U * payload_len; }
    bool operator==(const DNocPacket &) const = default;
};

// Throws PacketError if a field exceeds its width or payload_len > 4.
void validate(const DNocPacket &p);
BitVector encode_dnoc(const DNocPacket &p);
// Throws PacketError on truncated/oversized frames or invalid fields.
DNocPacket decode_dnoc(const BitVector &bits);

enum class SpinnKind : std::uint8_t
{
    Multicast = 0,
    CoreToCore = 1,
    NearestNeighbour = 2,
};

std::string_view to_string(SpinnKind k);

struct SpinnPacket
{
    SpinnKind kind{SpinnKind::Multicast};
    std::uint8_t timestamp{0};  // 2 bit
    std::uint8_t emergency{0};  // 2 bit
    std::uint32_t key_or_addr{0};
    std::optional<std::uint32_t> payload;

    bool operator==(const SpinnPacket &) const = default;
};

// XOR of every serialized bit except the parity bit.
std::uint8_t spinn_parity(const SpinnPacket &p);
BitVector encode_spinn(const SpinnPacket &p);
// Throws PacketError on bad length, bad kind or parity failure.
SpinnPacket decode_spinn(const BitVector &bits);
bool spinn_parity_ok(const BitVector &bits);

// Core-to-core destination address: chip_x[31:24] chip_y[23:16] pe_id[15:0]
struct CoreAddress
{
    std::uint8_t chip_x{0};
    std::uint8_t chip_y{0};
    std::uint16_t pe_id{0};

    std::uint32_t pack() const noexcept
    {
        return (static_cast<std::uint32_t>(chip_x) << 24U) | (static_cast<std::uint32_t>(chip_y) << 16U) | pe_id;
    }
    static CoreAddress unpack(std::uint32_t addr) noexcept
    {
        return CoreAddress{static_cast<std::uint8_t>(addr >> 24U), static_cast<std::uint8_t>(addr >> 16U),
                           static_cast<std::uint16_t>(addr & 0xFFFFU)};
    }
};

} // namespace s2sim

#endif
