// verify.hpp - self-checks behind `s2sim verify`
#ifndef S2SIM_VERIFY_HPP
#define S2SIM_VERIFY_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "s2sim/packets.hpp"

namespace s2sim {

struct GoldenPacket
{
    std::string name;
    std::variant<DNocPacket, SpinnPacket> packet;
};

// The 32 packets whose encodings are pinned in golden/packets.csv.
std::vector<GoldenPacket> golden_packets();
std::string encode_hex(const GoldenPacket &g);

// name,family,hex
void write_golden(std::ostream &out);

struct CheckResult
{
    int checks{0};
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
    void expect(bool cond, const std::string &name)
    {
        ++checks;
        if (!cond) {
            failures.push_back(name);
        }
    }
    void merge(const CheckResult &o)
    {
        checks += o.checks;
        failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    }
};

CheckResult verify_golden(std::istream &in);
CheckResult verify_energy_cases();
CheckResult verify_mac_oracles(std::uint64_t seed, int mm_cases = 200, int conv_cases = 100);

} // namespace s2sim

#endif
