#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fairprice {

struct EpochStats {
    std::size_t epoch = 0;
    double epsilon = 0.0;
    double cum_bid = 0.0;          // sum of max(price, 0) over the epoch, price units
    double run_avg_cum_bid = 0.0;  // mean of cum_bid over epochs 0..epoch
    double mean_fairness = 0.0;    // mean over iterations of the post-update fairness
    double run_avg_fairness = 0.0;
    std::size_t bids = 0;
    std::size_t rejects = 0;
    double reject_ratio = 0.0;
    double expected_revenue = 0.0;
    double mean_reward = 0.0;      // per-step reward, already scaled to [0, 1]
    double lr_metric = 0.0;
    std::vector<double> group_means;
};

double cumulative_bid(std::span<const double> price_outcomes);

// cum_bid * (1 - reject_ratio).
double expected_revenue(double cum_bid, double reject_ratio);

// Mean visit count over the supplied (distinct, visited) state-action pairs. Empty input gives 0.
double learning_rate_metric(std::span<const std::uint64_t> visit_counts);

enum class LrMetricMode {
    cumulative, // mean count over all pairs visited so far, counted since the start of the run
    per_epoch,  // mean count over pairs visited in the epoch, counted within the epoch
    step_size,  // mean of 1 / C(x) over the epoch's visits, C counted since the start
};

// Visit counts over (group, fairness bin, action) triples.
class VisitCounter {
public:
    VisitCounter(std::size_t groups, std::size_t bins, std::size_t actions);

    void visit(std::size_t group, std::size_t bin, std::size_t action);
    void start_epoch();

    double metric(LrMetricMode mode) const;

    std::uint64_t cumulative_count(std::size_t group, std::size_t bin, std::size_t action) const;
    std::size_t distinct_cumulative() const { return distinct_total_; }
    std::size_t distinct_epoch() const { return epoch_keys_.size(); }

private:
    std::size_t index(std::size_t group, std::size_t bin, std::size_t action) const;

    std::size_t bins_;
    std::size_t actions_;
    std::vector<std::uint64_t> total_;
    std::vector<std::uint64_t> epoch_;
    std::vector<std::size_t> epoch_keys_;
    std::uint64_t visits_total_ = 0;
    std::uint64_t visits_epoch_ = 0;
    std::size_t distinct_total_ = 0;
};

// Fills run_avg_cum_bid and run_avg_fairness from the per-epoch values.
void fill_running_averages(std::span<EpochStats> series);

// Affine map of the series onto [0, 1]; a constant series maps to all zeros.
std::vector<double> minmax_scale(std::span<const double> values);

// Spearman rank correlation with average ranks for ties. Returns 0 for constant inputs.
double spearman(std::span<const double> x, std::span<const double> y);

std::vector<std::string> csv_header(std::size_t groups);

// Header row then one row per epoch, floats with 6 significant digits.
// Throws IoError with the path on failure; std::invalid_argument on an empty series.
void emit_csv(std::span<const EpochStats> series, const std::filesystem::path& path);
std::string format_csv(std::span<const EpochStats> series);

// Parses a file written by emit_csv. Throws IoError on a missing or malformed file.
std::vector<EpochStats> read_csv(const std::filesystem::path& path);
std::vector<EpochStats> parse_csv(const std::string& text);

} // namespace fairprice
