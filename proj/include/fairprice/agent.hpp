#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fairprice/encoding.hpp"
#include "fairprice/environment.hpp"
#include "fairprice/fairness.hpp"
#include "fairprice/metrics.hpp"
#include "fairprice/qnet.hpp"
#include "fairprice/reward.hpp"

namespace fairprice {

// Which customer group the next state s' carries.
enum class NextStateMode {
    next_draw,     // the group of the customer sampled for the following iteration
    same_customer, // the group of the current customer
};

// Which bids enter the per-group averages.
enum class FairnessTracking {
    offered,  // every offered bid at its offered value
    accepted, // accepted bids only
};

// When the TD target is replaced by the rejection penalty.
enum class PenaltyTrigger {
    rejected,         // every rejected bid
    revenue_rejected, // rejected bids while the revenue objective is active (beta_p > 0)
};

struct AgentConfig {
    std::size_t epochs = 350;
    std::size_t bids_per_epoch = 1000;
    std::size_t customers_per_epoch = 100;
    double epsilon_decay = 20.0;                // epsilon(t) = exp(-t / decay)
    std::optional<double> epsilon_fixed;        // pins epsilon for every epoch
    double gamma = 0.9;
    bool learn = true;                          // false: act without gradient steps
    AdamConfig adam;
    double init_scale = 0.01;
    NextStateMode next_state = NextStateMode::next_draw;
    FairnessTracking tracking = FairnessTracking::offered;
    PenaltyTrigger penalty_trigger = PenaltyTrigger::revenue_rejected;
    LrMetricMode lr_metric = LrMetricMode::step_size;
};

// Everything one run needs besides the random stream.
struct Setup {
    AgentConfig agent;
    RewardParams reward;
    ActionGrid grid{0.0, 10.0, 0.1};
    FairnessPartition partition{0.01};
    std::vector<GroupSpec> groups = default_groups();
    std::vector<double> group_weights; // empty: uniform

    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct TransitionRecord {
    std::size_t epoch = 0;
    std::size_t iteration = 0; // 1-based
    State state;
    std::size_t action = 0;
    double bid = 0.0;
    bool explored = false;
    BidOutcome outcome;
    double fairness = 0.0; // after the averages update
    double reward = 0.0;
    double target = 0.0;
    double loss = 0.0;
};

using TransitionSink = std::function<void(const TransitionRecord&)>;

double epsilon(std::size_t epoch, double decay = 20.0);

// Uniform grid index with probability eps, greedy otherwise. *explored reports the branch.
std::size_t select_action(const QNet& net, const State& s, double eps, Rng& rng, bool* explored = nullptr);

// Mutable state of a run carried across epochs.
struct Learner {
    QNet net;
    AdamState adam;
    VisitCounter visits;

    Learner(const Setup& setup, Rng& rng);
    Learner(QNet net, AdamState adam, const Setup& setup);
};

// Runs `bids_per_epoch` iterations on a freshly drawn roster with group averages reset.
EpochStats run_epoch(const Setup& setup, std::size_t epoch, double eps, Learner& learner, Rng& rng,
                     const TransitionSink& sink = {});

struct ExperimentResult {
    std::vector<EpochStats> epochs;
    QNet net;
    AdamState adam;
};

// Seeds one generator, initializes the network from it and runs every epoch.
ExperimentResult run_experiment(const Setup& setup, std::uint64_t seed, const TransitionSink& sink = {});

// Greedy rollout (epsilon 0, no gradient steps) of a trained network.
ExperimentResult evaluate_policy(const Setup& setup, QNet net, std::uint64_t seed, std::size_t epochs);

} // namespace fairprice
