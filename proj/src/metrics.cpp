#include "fairprice/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fairprice/errors.hpp"

namespace fairprice {

double cumulative_bid(std::span<const double> price_outcomes) {
    double total = 0.0;
    for (double p : price_outcomes) {
        total += std::max(p, 0.0);
    }
    return total;
}

double expected_revenue(double cum_bid, double reject_ratio) {
    return cum_bid * (1.0 - reject_ratio);
}

double learning_rate_metric(std::span<const std::uint64_t> visit_counts) {
    if (visit_counts.empty()) {
        return 0.0;
    }
    const double total = std::accumulate(visit_counts.begin(), visit_counts.end(), 0.0);
    return total / static_cast<double>(visit_counts.size());
}

VisitCounter::VisitCounter(std::size_t groups, std::size_t bins, std::size_t actions)
    : bins_(bins), actions_(actions), total_(groups * bins * actions, 0), epoch_(groups * bins * actions, 0) {}

std::size_t VisitCounter::index(std::size_t group, std::size_t bin, std::size_t action) const {
    if (bin >= bins_ || action >= actions_ || group >= total_.size() / (bins_ * actions_)) {
        throw std::out_of_range("visit counter: (group, bin, action) out of range");
    }
    return (group * bins_ + bin) * actions_ + action;
}

void VisitCounter::visit(std::size_t group, std::size_t bin, std::size_t action) {
    const auto k = index(group, bin, action);
    if (total_[k]++ == 0) {
        ++distinct_total_;
    }
    if (epoch_[k]++ == 0) {
        epoch_keys_.push_back(k);
    }
    ++visits_total_;
    ++visits_epoch_;
}

void VisitCounter::start_epoch() {
    for (auto k : epoch_keys_) {
        epoch_[k] = 0;
    }
    epoch_keys_.clear();
    visits_epoch_ = 0;
}

double VisitCounter::metric(LrMetricMode mode) const {
    // Mean count over distinct pairs is total visits over distinct pairs.
    switch (mode) {
    case LrMetricMode::cumulative:
        return distinct_total_ == 0 ? 0.0
                                    : static_cast<double>(visits_total_) / static_cast<double>(distinct_total_);
    case LrMetricMode::per_epoch:
        return epoch_keys_.empty() ? 0.0
                                   : static_cast<double>(visits_epoch_) / static_cast<double>(epoch_keys_.size());
    case LrMetricMode::step_size: {
        if (epoch_keys_.empty()) {
            return 0.0;
        }
        double sum = 0.0;
        for (auto k : epoch_keys_) {
            sum += static_cast<double>(epoch_[k]) / static_cast<double>(total_[k]);
        }
        return sum / static_cast<double>(visits_epoch_);
    }
    }
    return 0.0;
}

std::uint64_t VisitCounter::cumulative_count(std::size_t group, std::size_t bin, std::size_t action) const {
    return total_[index(group, bin, action)];
}

void fill_running_averages(std::span<EpochStats> series) {
    double bid_sum = 0.0;
    double fair_sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        bid_sum += series[i].cum_bid;
        fair_sum += series[i].mean_fairness;
        series[i].run_avg_cum_bid = bid_sum / static_cast<double>(i + 1);
        series[i].run_avg_fairness = fair_sum / static_cast<double>(i + 1);
    }
}

std::vector<double> minmax_scale(std::span<const double> values) {
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    if (range > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = (values[i] - *lo) / range;
        }
    }
    return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("spearman: length mismatch");
    }
    if (x.size() < 2) {
        return 0.0;
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<std::string> csv_header(std::size_t groups) {
    std::vector<std::string> h{"epoch",          "epsilon",     "cum_bid",          "run_avg_cum_bid",
                               "mean_fairness",  "run_avg_fairness", "reject_ratio", "expected_revenue",
                               "mean_reward_scaled", "lr_metric"};
    for (std::size_t g = 0; g < groups; ++g) {
        h.push_back("g" + std::to_string(g + 1) + "_mean");
    }
    return h;
}

std::string format_csv(std::span<const EpochStats> series) {
    if (series.empty()) {
        throw std::invalid_argument("emit_csv: empty series");
    }
    std::ostringstream out;
    const auto header = csv_header(series.front().group_means.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i == 0 ? "" : ",") << header[i];
    }
    out << '\n';
    for (const auto& s : series) {
        out << s.epoch;
        for (double v : {s.epsilon, s.cum_bid, s.run_avg_cum_bid, s.mean_fairness, s.run_avg_fairness,
                         s.reject_ratio, s.expected_revenue, s.mean_reward, s.lr_metric}) {
            out << ',' << format_number(v);
        }
        for (double g : s.group_means) {
            out << ',' << format_number(g);
        }
        out << '\n';
    }
    return out.str();
}

void emit_csv(std::span<const EpochStats> series, const std::filesystem::path& path) {
    const auto text = format_csv(series);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<EpochStats> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("metrics csv: missing header");
    }
    const auto split = [](const std::string& row) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };
    const auto header = split(line);
    constexpr std::size_t kFixed = 10;
    if (header.size() < kFixed || header != csv_header(header.size() - kFixed)) {
        throw IoError("metrics csv: unexpected header '" + line + "'");
    }
    std::vector<EpochStats> series;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw IoError("metrics csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                          " fields");
        }
        std::vector<double> v(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            char* end = nullptr;
            v[i] = std::strtod(cells[i].c_str(), &end);
            if (cells[i].empty() || *end != '\0') {
                throw IoError("metrics csv: row " + std::to_string(row) + " field '" + header[i] +
                              "' is not a number");
            }
        }
        EpochStats s;
        s.epoch = static_cast<std::size_t>(v[0]);
        s.epsilon = v[1];
        s.cum_bid = v[2];
        s.run_avg_cum_bid = v[3];
        s.mean_fairness = v[4];
        s.run_avg_fairness = v[5];
        s.reject_ratio = v[6];
        s.expected_revenue = v[7];
        s.mean_reward = v[8];
        s.lr_metric = v[9];
        s.group_means.assign(v.begin() + kFixed, v.end());
        series.push_back(std::move(s));
    }
    return series;
}

std::vector<EpochStats> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_csv(buf.str());
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

} // namespace fairprice
