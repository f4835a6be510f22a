// report.hpp - named scalar reports (metric,value,unit)
#ifndef S2SIM_REPORT_HPP
#define S2SIM_REPORT_HPP

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace s2sim {

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double v);

struct Metric
{
    std::string name;
    double value{0.0};
    std::string unit;
};

class MetricTable
{
public:
    void add(std::string name, double value, std::string unit = "");
    std::optional<double> find(std::string_view name) const;
    double at(std::string_view name) const;
    const std::vector<Metric> &rows() const noexcept { return rows_; }
    bool empty() const noexcept { return rows_.empty(); }

    void write_csv(std::ostream &out) const;
    static MetricTable read_csv(std::istream &in);

    static constexpr std::string_view header = "metric,value,unit";

private:
    std::vector<Metric> rows_;
};

} // namespace s2sim

#endif
