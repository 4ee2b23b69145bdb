#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fairprice/encoding.hpp"
#include "fairprice/environment.hpp"

namespace fairprice {

// Linear Q-value approximator Q(s) = W s + b with W of shape actions x inputs (row-major).
class QNet {
public:
    QNet() = default;
    QNet(std::size_t inputs, std::size_t actions);

    // Weights uniform in [-scale, scale], bias zero.
    static QNet random(std::size_t inputs, std::size_t actions, Rng& rng, double scale = 0.01);

    std::size_t inputs() const { return inputs_; }
    std::size_t actions() const { return actions_; }

    double& weight(std::size_t action, std::size_t input) { return weights_[action * inputs_ + input]; }
    double weight(std::size_t action, std::size_t input) const { return weights_[action * inputs_ + input]; }

    std::span<double> weights() { return weights_; }
    std::span<const double> weights() const { return weights_; }
    std::span<double> bias() { return bias_; }
    std::span<const double> bias() const { return bias_; }

    friend bool operator==(const QNet&, const QNet&) = default;

private:
    std::size_t inputs_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First and second moments shaped like the network, plus the step counter.
//
// Entries whose moments are both zero produce a zero update, so each action row keeps the
// list of input columns that ever received gradient and the update only visits those.
// The result is identical to a dense Adam step.
struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::vector<double> m_weights;
    std::vector<double> m_bias;
    std::vector<double> v_weights;
    std::vector<double> v_bias;
    std::vector<std::vector<std::uint32_t>> touched; // per action row, sorted input columns
    std::vector<bool> bias_touched;

    AdamState() = default;
    AdamState(const QNet& net, AdamConfig config);

    // Rebuilds the touched sets from nonzero moments (after deserialization).
    void rebuild_touched(std::size_t inputs, std::size_t actions);

    friend bool operator==(const AdamState& a, const AdamState& b) {
        return a.config.learning_rate == b.config.learning_rate && a.config.beta1 == b.config.beta1 &&
               a.config.beta2 == b.config.beta2 && a.config.epsilon == b.config.epsilon && a.step == b.step &&
               a.m_weights == b.m_weights && a.m_bias == b.m_bias && a.v_weights == b.v_weights &&
               a.v_bias == b.v_bias;
    }
};

// Dense gradient of the squared TD error with respect to (weights, bias).
struct QNetGradient {
    std::vector<double> weights;
    std::vector<double> bias;
};

std::vector<double> forward(const QNet& net, const State& s);
double q_value(const QNet& net, const State& s, std::size_t action);

// Lowest index among the maximal entries.
std::size_t argmax(std::span<const double> values);
std::size_t greedy_action(const QNet& net, const State& s);

// nu when the bid was rejected, otherwise reward + gamma * max_a Q_prev(next, a).
double td_target(double reward, const State& next, const QNet& net_prev, double gamma, bool rejected,
                 double penalty);

double squared_error(const QNet& net, const State& s, std::size_t action, double target);
QNetGradient loss_gradient(const QNet& net, const State& s, std::size_t action, double target);

// One Adam step on (target - Q(s, action))^2. Returns the loss before the update.
// Throws TrainingFault on a non-finite target, loss or updated parameter.
double train_step(QNet& net, AdamState& adam, const State& s, std::size_t action, double target);

// Versioned text format: magic, dimensions, row-major weights, bias, Adam constants, step, moments.
// Doubles are written with 17 significant digits so a round trip is bit-exact.
void save_qnet(const std::filesystem::path& path, const QNet& net, const AdamState& adam);

struct LoadedQNet {
    QNet net;
    AdamState adam;
};
LoadedQNet load_qnet(const std::filesystem::path& path);

} // namespace fairprice
