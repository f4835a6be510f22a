#include "s2sim/report.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <stdexcept>

namespace s2sim {

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

void MetricTable::add(std::string name, double value, std::string unit)
{
    rows_.push_back(Metric{std::move(name), value, std::move(unit)});
}

std::optional<double> MetricTable::find(std::string_view name) const
{
    for (const auto &m : rows_) {
        if (m.name == name) {
            return m.value;
        }
    }
    return std::nullopt;
}

double MetricTable::at(std::string_view name) const
{
    auto v = find(name);
    if (!v) {
        throw std::out_of_range("metric not found: " + std::string(name));
    }
    return *v;
}

void MetricTable::write_csv(std::ostream &out) const
{
    out << header << '\n';
    for (const auto &m : rows_) {
        out << m.name << ',' << format_double(m.value) << ',' << m.unit << '\n';
    }
}

MetricTable MetricTable::read_csv(std::istream &in)
{
    MetricTable table;
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::runtime_error("report CSV: missing header '" + std::string(header) + "'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::runtime_error("report CSV: malformed row '" + line + "'");
        }
        const std::string value = line.substr(c1 + 1, c2 - c1 - 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw std::runtime_error("report CSV: bad value in row '" + line + "'");
        }
        table.add(line.substr(0, c1), v, line.substr(c2 + 1));
    }
    return table;
}

} // namespace s2sim
