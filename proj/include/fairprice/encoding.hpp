#pragma once

#include <cstddef>
#include <vector>

namespace fairprice {

// Discrete bid space min, min + step, ..., max.
class ActionGrid {
public:
    ActionGrid(double min, double max, double step);

    double min() const { return min_; }
    double max() const { return max_; }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

private:
    double min_;
    double max_;
    double step_;
    std::vector<double> values_;
};

// Partition of [0, 1] with mesh p. Bins are half-open [k p, (k + 1) p).
//
// With a separate unit bin (the default) there are 1/p + 1 bins and the last one holds
// exactly f = 1. Without it there are 1/p bins and the last interval [1 - p, 1] is closed.
class FairnessPartition {
public:
    explicit FairnessPartition(double mesh, bool separate_unit_bin = true);

    double mesh() const { return mesh_; }
    std::size_t bins() const { return bins_; }
    bool separate_unit_bin() const { return separate_unit_bin_; }

private:
    double mesh_;
    std::size_t intervals_;
    std::size_t bins_;
    bool separate_unit_bin_;
};

// Two-hot state: group one-hot followed by fairness-bin one-hot. Only the two active
// positions are stored; dense() expands to the full n-vector.
struct State {
    std::size_t groups = 0;
    std::size_t bins = 0;
    std::size_t group = 0;
    std::size_t bin = 0;

    std::size_t dimension() const { return groups + bins; }
    std::size_t group_index() const { return group; }
    std::size_t bin_index() const { return groups + bin; }
    std::vector<double> dense() const;

    friend bool operator==(const State&, const State&) = default;
};

std::size_t bin_of(double fairness, const FairnessPartition& partition);

// Fairness values outside [0, 1] are clamped; each clamp increments *clamp_counter when given.
State encode_state(std::size_t group, std::size_t groups, double fairness, const FairnessPartition& partition,
                   std::size_t* clamp_counter = nullptr);

// Index of the closest grid value; ties resolve to the lower index.
std::size_t nearest_action(double price, const ActionGrid& grid);

} // namespace fairprice
