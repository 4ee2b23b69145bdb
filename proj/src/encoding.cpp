#include "fairprice/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {

namespace {

// Number of mesh steps spanning `width`; rejects meshes that do not divide it.
std::size_t steps_in(double width, double mesh, const char* what) {
    if (!(mesh > 0.0) || !std::isfinite(mesh)) {
        throw ConfigError(std::string(what) + ": mesh must be positive");
    }
    const double ratio = width / mesh;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * std::max(1.0, rounded)) {
        throw ConfigError(std::string(what) + ": mesh must divide the interval");
    }
    return static_cast<std::size_t>(rounded);
}

} // namespace

ActionGrid::ActionGrid(double min, double max, double step) : min_(min), max_(max), step_(step) {
    if (!std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
        throw ConfigError("grid: require finite min < max");
    }
    const std::size_t steps = steps_in(max - min, step, "grid.step");
    values_.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        values_[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(steps);
    }
    values_.back() = max;
}

FairnessPartition::FairnessPartition(double mesh, bool separate_unit_bin)
    : mesh_(mesh),
      intervals_(steps_in(1.0, mesh, "partition.mesh")),
      bins_(intervals_ + (separate_unit_bin ? 1 : 0)),
      separate_unit_bin_(separate_unit_bin) {}

std::vector<double> State::dense() const {
    std::vector<double> x(dimension(), 0.0);
    x[group_index()] = 1.0;
    x[bin_index()] = 1.0;
    return x;
}

std::size_t bin_of(double fairness, const FairnessPartition& partition) {
    const double f = std::clamp(fairness, 0.0, 1.0);
    const auto intervals = static_cast<double>(partition.bins() - (partition.separate_unit_bin() ? 1 : 0));
    // f * intervals rather than f / mesh: exact at the boundaries of meshes like 1/3.
    const auto k = static_cast<std::size_t>(std::floor(f * intervals));
    return std::min(k, partition.bins() - 1);
}

State encode_state(std::size_t group, std::size_t groups, double fairness, const FairnessPartition& partition,
                   std::size_t* clamp_counter) {
    if (group >= groups) {
        throw ConfigError("encode_state: group " + std::to_string(group) + " out of range");
    }
    if (clamp_counter != nullptr && !(fairness >= 0.0 && fairness <= 1.0)) {
        ++*clamp_counter;
    }
    return State{groups, partition.bins(), group, bin_of(fairness, partition)};
}

std::size_t nearest_action(double price, const ActionGrid& grid) {
    const auto& v = grid.values();
    const auto it = std::lower_bound(v.begin(), v.end(), price);
    if (it == v.begin()) {
        return 0;
    }
    if (it == v.end()) {
        return v.size() - 1;
    }
    const auto hi = static_cast<std::size_t>(it - v.begin());
    const auto lo = hi - 1;
    return (price - v[lo] <= v[hi] - price) ? lo : hi;
}

} // namespace fairprice
