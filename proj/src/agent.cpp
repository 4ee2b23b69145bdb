#include "fairprice/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {

void Setup::validate() const {
    const auto require = [](bool ok, const std::string& field, const char* rule) {
        if (!ok) {
            throw ConfigError(field + ": " + rule);
        }
    };
    require(agent.epochs > 0, "agent.epochs", "must be positive");
    require(agent.bids_per_epoch > 0, "agent.bids_per_epoch", "must be positive");
    require(agent.customers_per_epoch > 0, "agent.customers_per_epoch", "must be positive");
    require(std::isfinite(agent.epsilon_decay) && agent.epsilon_decay > 0.0, "agent.epsilon_decay",
            "must be positive");
    if (agent.epsilon_fixed) {
        require(*agent.epsilon_fixed >= 0.0 && *agent.epsilon_fixed <= 1.0, "agent.epsilon_fixed",
                "must lie in [0, 1]");
    }
    require(agent.gamma >= 0.0 && agent.gamma < 1.0, "agent.gamma", "must lie in [0, 1)");
    require(agent.adam.learning_rate > 0.0, "agent.learning_rate", "must be positive");
    require(agent.adam.beta1 >= 0.0 && agent.adam.beta1 < 1.0, "agent.adam.beta1", "must lie in [0, 1)");
    require(agent.adam.beta2 >= 0.0 && agent.adam.beta2 < 1.0, "agent.adam.beta2", "must lie in [0, 1)");
    require(agent.adam.epsilon > 0.0, "agent.adam.epsilon", "must be positive");
    require(agent.init_scale >= 0.0, "agent.init_scale", "must be non-negative");
    fairprice::validate(reward);
    require(!groups.empty(), "groups", "must not be empty");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto field = "groups[" + std::to_string(g) + "]";
        require(groups[g].id == g, field + ".id", "must equal its position");
        require(std::isfinite(groups[g].b) && std::isfinite(groups[g].w), field, "b and w must be finite");
    }
    if (!group_weights.empty()) {
        require(group_weights.size() == groups.size(), "group_weights", "needs one entry per group");
        double total = 0.0;
        for (double w : group_weights) {
            require(std::isfinite(w) && w >= 0.0, "group_weights", "entries must be non-negative");
            total += w;
        }
        require(total > 0.0, "group_weights", "must not all be zero");
    }
}

double epsilon(std::size_t epoch, double decay) {
    return std::exp(-static_cast<double>(epoch) / decay);
}

std::size_t select_action(const QNet& net, const State& s, double eps, Rng& rng, bool* explored) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const bool explore = coin(rng) < eps;
    if (explored != nullptr) {
        *explored = explore;
    }
    if (explore) {
        std::uniform_int_distribution<std::size_t> pick(0, net.actions() - 1);
        return pick(rng);
    }
    return greedy_action(net, s);
}

Learner::Learner(const Setup& setup, Rng& rng)
    : net(QNet::random(setup.groups.size() + setup.partition.bins(), setup.grid.size(), rng,
                       setup.agent.init_scale)),
      adam(net, setup.agent.adam),
      visits(setup.groups.size(), setup.partition.bins(), setup.grid.size()) {}

Learner::Learner(QNet trained, AdamState state, const Setup& setup)
    : net(std::move(trained)),
      adam(std::move(state)),
      visits(setup.groups.size(), setup.partition.bins(), setup.grid.size()) {
    if (net.inputs() != setup.groups.size() + setup.partition.bins() || net.actions() != setup.grid.size()) {
        throw ConfigError("weights: network shape " + std::to_string(net.actions()) + "x" +
                          std::to_string(net.inputs()) + " does not match the configured grid and partition");
    }
}

EpochStats run_epoch(const Setup& setup, std::size_t epoch, double eps, Learner& learner, Rng& rng,
                     const TransitionSink& sink) {
    const auto& cfg = setup.agent;
    const auto& params = setup.reward;
    const std::size_t groups = setup.groups.size();
    const double a_max = setup.grid.max();
    const bool penalize_rejections =
        cfg.penalty_trigger == PenaltyTrigger::rejected || params.beta_p > 0.0;

    EpochStats stats;
    stats.epoch = epoch;
    stats.epsilon = eps;
    stats.bids = cfg.bids_per_epoch;

    GroupAverages averages(groups);
    learner.visits.start_epoch();
    double fairness = rotated_jain(averages.means, a_max);

    if (cfg.bids_per_epoch == 0) {
        stats.mean_fairness = fairness;
        stats.group_means = averages.means;
        return stats;
    }

    const Population roster = draw_roster(setup.groups, setup.group_weights, cfg.customers_per_epoch, rng);
    Customer customer = sample_customer(roster, rng);
    State state = encode_state(customer.group, groups, fairness, setup.partition);

    double fairness_sum = 0.0;
    double reward_sum = 0.0;
    for (std::size_t i = 1; i <= cfg.bids_per_epoch; ++i) {
        TransitionRecord rec;
        rec.epoch = epoch;
        rec.iteration = i;
        rec.state = state;
        rec.action = select_action(learner.net, state, eps, rng, &rec.explored);
        rec.bid = setup.grid[rec.action];
        rec.outcome = respond(rec.bid, setup.groups[customer.group], params.penalty, rng);

        if (cfg.tracking == FairnessTracking::offered || rec.outcome.accepted) {
            update_average(averages, customer.group, rec.bid);
        }
        fairness = rotated_jain(averages.means, a_max);
        rec.fairness = fairness;
        rec.reward = reward(price_outcome(rec.bid, rec.outcome, a_max, params.penalty), fairness, params);

        const Customer next_customer = sample_customer(roster, rng);
        const State next_state = encode_state(next_customer.group, groups, fairness, setup.partition);
        const State& bootstrap_state = cfg.next_state == NextStateMode::next_draw
                                           ? next_state
                                           : encode_state(customer.group, groups, fairness, setup.partition);
        rec.target = td_target(rec.reward, bootstrap_state, learner.net, cfg.gamma,
                               penalize_rejections && !rec.outcome.accepted, params.penalty);

        learner.visits.visit(state.group, state.bin, rec.action);
        try {
            rec.loss = cfg.learn ? train_step(learner.net, learner.adam, state, rec.action, rec.target)
                                 : squared_error(learner.net, state, rec.action, rec.target);
        } catch (const TrainingFault& fault) {
            std::ostringstream msg;
            msg << fault.what() << " (epoch " << epoch << ", iteration " << i << ", group " << state.group
                << ", fairness bin " << state.bin << ", action " << rec.action << ", target " << rec.target
                << ", reward " << rec.reward << ")";
            throw TrainingFault(msg.str());
        }

        stats.cum_bid += std::max(rec.outcome.price, 0.0);
        stats.rejects += rec.outcome.accepted ? 0 : 1;
        fairness_sum += fairness;
        reward_sum += rec.reward;
        if (sink) {
            sink(rec);
        }

        customer = next_customer;
        state = next_state;
    }

    const auto n = static_cast<double>(cfg.bids_per_epoch);
    stats.mean_fairness = fairness_sum / n;
    stats.mean_reward = reward_sum / n;
    stats.reject_ratio = static_cast<double>(stats.rejects) / n;
    stats.expected_revenue = expected_revenue(stats.cum_bid, stats.reject_ratio);
    stats.lr_metric = learner.visits.metric(cfg.lr_metric);
    stats.group_means = averages.means;
    return stats;
}

namespace {

ExperimentResult run_epochs(const Setup& setup, Learner& learner, Rng& rng, std::size_t epochs,
                            const TransitionSink& sink) {
    ExperimentResult result;
    result.epochs.reserve(epochs);
    for (std::size_t t = 0; t < epochs; ++t) {
        const double eps = setup.agent.epsilon_fixed.value_or(epsilon(t, setup.agent.epsilon_decay));
        result.epochs.push_back(run_epoch(setup, t, eps, learner, rng, sink));
    }
    fill_running_averages(result.epochs);
    result.net = learner.net;
    result.adam = learner.adam;
    return result;
}

} // namespace

ExperimentResult run_experiment(const Setup& setup, std::uint64_t seed, const TransitionSink& sink) {
    setup.validate();
    Rng rng(seed);
    Learner learner(setup, rng);
    return run_epochs(setup, learner, rng, setup.agent.epochs, sink);
}

ExperimentResult evaluate_policy(const Setup& setup, QNet net, std::uint64_t seed, std::size_t epochs) {
    Setup greedy = setup;
    greedy.agent.learn = false;
    greedy.agent.epsilon_fixed = 0.0;
    greedy.validate();
    AdamState adam(net, greedy.agent.adam);
    Learner learner(std::move(net), std::move(adam), greedy);
    Rng rng(seed);
    return run_epochs(greedy, learner, rng, epochs, {});
}

} // namespace fairprice
