#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "fairprice/agent.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/fairness.hpp"

using namespace fairprice;

namespace {

Setup small_setup(std::size_t epochs, std::size_t bids) {
    Setup setup;
    setup.agent.epochs = epochs;
    setup.agent.bids_per_epoch = bids;
    setup.reward.beta_p = 1.0;
    setup.reward.beta_f = 1.0;
    setup.reward.f_target = 0.9;
    return setup;
}

Setup null_setup(std::size_t epochs, std::size_t bids) {
    Setup setup;
    setup.agent.epochs = epochs;
    setup.agent.bids_per_epoch = bids;
    setup.agent.epsilon_fixed = 1.0;
    setup.agent.learn = false;
    setup.reward.beta_p = 0.0;
    setup.reward.beta_f = 0.0;
    return setup;
}

bool same_stats(const EpochStats& a, const EpochStats& b) {
    return a.epoch == b.epoch && a.epsilon == b.epsilon && a.cum_bid == b.cum_bid &&
           a.mean_fairness == b.mean_fairness && a.bids == b.bids && a.rejects == b.rejects &&
           a.reject_ratio == b.reject_ratio && a.expected_revenue == b.expected_revenue &&
           a.mean_reward == b.mean_reward && a.lr_metric == b.lr_metric && a.group_means == b.group_means &&
           a.run_avg_cum_bid == b.run_avg_cum_bid && a.run_avg_fairness == b.run_avg_fairness;
}

} // namespace

TEST_CASE("epsilon schedule") {
    CHECK(epsilon(0) == 1.0);
    CHECK(epsilon(20) == doctest::Approx(0.36787944117144233));
    CHECK(epsilon(349) == doctest::Approx(2.6397e-8).epsilon(1e-4));
    for (std::size_t t = 1; t < 350; ++t) {
        CHECK(epsilon(t) < epsilon(t - 1));
    }
}

TEST_CASE("full exploration is uniform over the grid") {
    const FairnessPartition p(0.01);
    Rng rng(99);
    auto net = QNet::random(4 + p.bins(), 101, rng);
    const auto s = encode_state(0, 4, 1.0, p);
    std::vector<double> counts(101, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        bool explored = false;
        counts[select_action(net, s, 1.0, rng, &explored)] += 1.0;
        REQUIRE(explored);
    }
    const double expected = draws / 101.0;
    double chi2 = 0.0;
    for (double c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // Upper 0.001 quantile of chi-squared with 100 degrees of freedom.
    CHECK(chi2 < 149.449);
}

TEST_CASE("no exploration always acts greedily") {
    const FairnessPartition p(0.01);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto net = QNet::random(4 + p.bins(), 101, rng, 1.0);
        const auto s = encode_state(i % 4, 4, (i % 100) / 100.0, p);
        bool explored = true;
        CHECK(select_action(net, s, 0.0, rng, &explored) == greedy_action(net, s));
        CHECK_FALSE(explored);
    }
}

TEST_CASE("half exploration mixes greedy and uniform") {
    const FairnessPartition p(0.01);
    QNet net(4 + p.bins(), 101);
    net.bias()[37] = 1.0;
    const auto s = encode_state(2, 4, 0.3, p);
    Rng rng(17);
    int hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        hits += select_action(net, s, 0.5, rng) == 37;
    }
    CHECK(std::abs(static_cast<double>(hits) / draws - (0.5 + 0.5 / 101.0)) <= 0.01);
}

TEST_CASE("null model epoch offers grid-midpoint bids to every group") {
    const auto setup = null_setup(1, 1000);
    Rng rng(1);
    Learner learner(setup, rng);
    const auto before = learner.net;
    const auto stats = run_epoch(setup, 0, 1.0, learner, rng);
    REQUIRE(stats.group_means.size() == 4);
    for (double m : stats.group_means) {
        CHECK(std::abs(m - 5.0) <= 0.3);
    }
    CHECK(learner.net == before);
}

TEST_CASE("an epoch without bids is a no-op") {
    auto setup = small_setup(1, 1);
    setup.agent.bids_per_epoch = 0;
    Rng rng(3);
    Learner learner(setup, rng);
    const auto net = learner.net;
    const auto adam = learner.adam;
    const auto stats = run_epoch(setup, 0, 1.0, learner, rng);
    CHECK(stats.bids == 0);
    CHECK(stats.rejects == 0);
    CHECK(stats.cum_bid == 0.0);
    CHECK(stats.reject_ratio == 0.0);
    CHECK(learner.net == net);
    CHECK(learner.adam == adam);
}

TEST_CASE("runs are deterministic for a fixed seed") {
    const auto setup = small_setup(4, 300);
    std::vector<TransitionRecord> log_a, log_b;
    const auto a = run_experiment(setup, 42, [&](const TransitionRecord& r) { log_a.push_back(r); });
    const auto b = run_experiment(setup, 42, [&](const TransitionRecord& r) { log_b.push_back(r); });
    REQUIRE(a.epochs.size() == b.epochs.size());
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
        CHECK(same_stats(a.epochs[e], b.epochs[e]));
    }
    CHECK(a.net == b.net);
    REQUIRE(log_a.size() == log_b.size());
    for (std::size_t i = 0; i < log_a.size(); ++i) {
        CHECK(log_a[i].state == log_b[i].state);
        CHECK(log_a[i].action == log_b[i].action);
        CHECK(log_a[i].outcome.accepted == log_b[i].outcome.accepted);
        CHECK(log_a[i].target == log_b[i].target);
    }
    const auto c = run_experiment(setup, 43);
    CHECK_FALSE(c.net == a.net);
}

TEST_CASE("minimal run emits one stats row") {
    const auto setup = small_setup(1, 10);
    std::size_t records = 0;
    const auto result = run_experiment(setup, 7, [&](const TransitionRecord&) { ++records; });
    REQUIRE(result.epochs.size() == 1);
    CHECK(result.epochs[0].bids == 10);
    CHECK(records == 10);
}

TEST_CASE("transition log is consistent with the epoch statistics") {
    const auto setup = small_setup(6, 1000);
    std::vector<TransitionRecord> log;
    const auto result = run_experiment(setup, 11, [&](const TransitionRecord& r) { log.push_back(r); });
    REQUIRE(log.size() == 6000);
    const std::size_t groups = setup.groups.size();

    for (std::size_t e = 0; e < result.epochs.size(); ++e) {
        const auto& stats = result.epochs[e];
        std::vector<double> sums(groups, 0.0);
        std::vector<std::size_t> counts(groups, 0);
        std::size_t rejects = 0;
        std::size_t explored = 0;
        double previous_fairness = 1.0;
        for (std::size_t i = 0; i < 1000; ++i) {
            const auto& r = log[e * 1000 + i];
            CHECK(r.epoch == e);
            CHECK(r.iteration == i + 1);
            // The state carries the fairness left by the previous iteration.
            CHECK(r.state.bin == bin_of(previous_fairness, setup.partition));
            sums[r.state.group] += r.bid;
            ++counts[r.state.group];
            std::vector<double> means(groups, 0.0);
            for (std::size_t g = 0; g < groups; ++g) {
                means[g] = counts[g] == 0 ? 0.0 : sums[g] / static_cast<double>(counts[g]);
            }
            CHECK(r.fairness == rotated_jain(means, setup.grid.max()));
            previous_fairness = r.fairness;
            rejects += r.outcome.accepted ? 0 : 1;
            explored += r.explored ? 1 : 0;
        }
        for (std::size_t g = 0; g < groups; ++g) {
            const double mean = counts[g] == 0 ? 0.0 : sums[g] / static_cast<double>(counts[g]);
            CHECK(stats.group_means[g] == mean);
        }
        CHECK(stats.rejects == rejects);
        CHECK(stats.reject_ratio * 1000.0 == doctest::Approx(static_cast<double>(rejects)));
        CHECK(stats.expected_revenue <= stats.cum_bid);
        const double eps = epsilon(e);
        CHECK(stats.epsilon == eps);
        const double sd = std::sqrt(eps * (1.0 - eps) / 1000.0);
        CHECK(std::abs(static_cast<double>(explored) / 1000.0 - eps) <= 4.0 * sd + 1e-12);
    }
}

TEST_CASE("diverging training reports the failing transition") {
    auto setup = small_setup(1, 1000);
    setup.agent.adam.learning_rate = 1e300;
    CHECK_THROWS_WITH_AS(run_experiment(setup, 1), doctest::Contains("epoch 0"), TrainingFault);
}

TEST_CASE("invalid setups are rejected by field") {
    auto setup = small_setup(1, 1);
    setup.agent.gamma = 1.0;
    CHECK_THROWS_WITH_AS(run_experiment(setup, 1), doctest::Contains("agent.gamma"), ConfigError);
    setup = small_setup(1, 1);
    setup.group_weights = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(setup.validate(), doctest::Contains("group_weights"), ConfigError);
    setup = small_setup(0, 1);
    CHECK_THROWS_WITH_AS(setup.validate(), doctest::Contains("agent.epochs"), ConfigError);
}

TEST_CASE("greedy evaluation leaves the network untouched") {
    const auto setup = small_setup(3, 200);
    const auto trained = run_experiment(setup, 5);
    const auto eval = evaluate_policy(setup, trained.net, 9, 2);
    CHECK(eval.epochs.size() == 2);
    CHECK(eval.net == trained.net);
    for (const auto& e : eval.epochs) {
        CHECK(e.epsilon == 0.0);
    }
}
