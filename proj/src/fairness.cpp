#include "fairprice/fairness.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fairprice {

void GroupAverages::reset() {
    std::fill(means.begin(), means.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    std::fill(sums.begin(), sums.end(), 0.0);
}

double jain_index(std::span<const double> values) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : values) {
        sum += x;
        sum_sq += x * x;
    }
    if (values.empty() || sum_sq == 0.0) {
        return 1.0;
    }
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

double rotated_jain(std::span<const double> means, double a_max) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double g : means) {
        const double x = a_max - std::min(g, a_max);
        sum += x;
        sum_sq += x * x;
    }
    if (means.empty() || sum_sq == 0.0) {
        return 1.0;
    }
    return sum * sum / (static_cast<double>(means.size()) * sum_sq);
}

void update_average(GroupAverages& averages, std::size_t group, double price) {
    if (group >= averages.size()) {
        throw std::out_of_range("update_average: group " + std::to_string(group) + " out of range");
    }
    averages.counts[group] += 1;
    averages.sums[group] += price;
    averages.means[group] = averages.sums[group] / static_cast<double>(averages.counts[group]);
}

} // namespace fairprice
