#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairprice {

// Per-group running mean of allocated bid prices. A group with no bids has mean 0.
// Means are kept as sum / count so they match a batch recomputation exactly.
struct GroupAverages {
    std::vector<double> means;
    std::vector<std::size_t> counts;
    std::vector<double> sums;

    GroupAverages() = default;
    explicit GroupAverages(std::size_t groups) : means(groups, 0.0), counts(groups, 0), sums(groups, 0.0) {}

    std::size_t size() const { return means.size(); }
    void reset();
};

// Jain's index (sum x)^2 / (n * sum x^2). All-zero input is perfectly homogeneous and yields 1.
double jain_index(std::span<const double> values);

// Jain's index of (a_max - mean) per group, rewarding low homogeneous prices.
// Means above a_max are clamped to a_max; all means equal to a_max yields 1.
double rotated_jain(std::span<const double> means, double a_max);

// Running-mean update of one group. Throws std::out_of_range on a bad group id.
void update_average(GroupAverages& averages, std::size_t group, double price);

} // namespace fairprice
