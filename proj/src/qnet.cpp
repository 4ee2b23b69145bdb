#include "fairprice/qnet.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {

namespace {

constexpr const char* kMagic = "FAIRPRICE-QNET";
constexpr int kFormatVersion = 1;

void check_state(const QNet& net, const State& s) {
    if (s.dimension() != net.inputs()) {
        throw ConfigError("qnet: state dimension " + std::to_string(s.dimension()) + " does not match input size " +
                          std::to_string(net.inputs()));
    }
}

// Moments below the normal range only contribute updates far under one ulp of the weights, and
// subnormal arithmetic is orders of magnitude slower.
double flush_subnormal(double x) {
    return std::abs(x) < std::numeric_limits<double>::min() ? 0.0 : x;
}

void insert_sorted(std::vector<std::uint32_t>& cols, std::uint32_t c) {
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) {
        cols.insert(it, c);
    }
}

} // namespace

QNet::QNet(std::size_t inputs, std::size_t actions)
    : inputs_(inputs), actions_(actions), weights_(inputs * actions, 0.0), bias_(actions, 0.0) {
    if (inputs == 0 || actions == 0) {
        throw ConfigError("qnet: dimensions must be positive");
    }
}

QNet QNet::random(std::size_t inputs, std::size_t actions, Rng& rng, double scale) {
    QNet net(inputs, actions);
    std::uniform_real_distribution<double> init(-scale, scale);
    for (double& w : net.weights_) {
        w = init(rng);
    }
    return net;
}

AdamState::AdamState(const QNet& net, AdamConfig cfg)
    : config(cfg),
      m_weights(net.weights().size(), 0.0),
      m_bias(net.actions(), 0.0),
      v_weights(net.weights().size(), 0.0),
      v_bias(net.actions(), 0.0),
      touched(net.actions()),
      bias_touched(net.actions(), false) {}

void AdamState::rebuild_touched(std::size_t inputs, std::size_t actions) {
    touched.assign(actions, {});
    bias_touched.assign(actions, false);
    for (std::size_t a = 0; a < actions; ++a) {
        for (std::size_t j = 0; j < inputs; ++j) {
            const auto k = a * inputs + j;
            if (m_weights[k] != 0.0 || v_weights[k] != 0.0) {
                touched[a].push_back(static_cast<std::uint32_t>(j));
            }
        }
        bias_touched[a] = m_bias[a] != 0.0 || v_bias[a] != 0.0;
    }
}

std::vector<double> forward(const QNet& net, const State& s) {
    check_state(net, s);
    std::vector<double> q(net.actions());
    const auto gi = s.group_index();
    const auto bi = s.bin_index();
    const auto w = net.weights();
    const auto b = net.bias();
    const auto n = net.inputs();
    for (std::size_t a = 0; a < q.size(); ++a) {
        q[a] = w[a * n + gi] + w[a * n + bi] + b[a];
    }
    return q;
}

double q_value(const QNet& net, const State& s, std::size_t action) {
    check_state(net, s);
    return net.weight(action, s.group_index()) + net.weight(action, s.bin_index()) + net.bias()[action];
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

std::size_t greedy_action(const QNet& net, const State& s) {
    return argmax(forward(net, s));
}

double td_target(double reward, const State& next, const QNet& net_prev, double gamma, bool rejected,
                 double penalty) {
    if (rejected) {
        return penalty;
    }
    if (gamma == 0.0) {
        return reward;
    }
    const auto q = forward(net_prev, next);
    return reward + gamma * *std::max_element(q.begin(), q.end());
}

double squared_error(const QNet& net, const State& s, std::size_t action, double target) {
    const double e = target - q_value(net, s, action);
    return e * e;
}

QNetGradient loss_gradient(const QNet& net, const State& s, std::size_t action, double target) {
    QNetGradient g{std::vector<double>(net.weights().size(), 0.0), std::vector<double>(net.actions(), 0.0)};
    const double d = -2.0 * (target - q_value(net, s, action));
    const auto n = net.inputs();
    g.weights[action * n + s.group_index()] += d;
    g.weights[action * n + s.bin_index()] += d;
    g.bias[action] = d;
    return g;
}

double train_step(QNet& net, AdamState& adam, const State& s, std::size_t action, double target) {
    check_state(net, s);
    if (action >= net.actions()) {
        throw ConfigError("train_step: action " + std::to_string(action) + " out of range");
    }
    if (!std::isfinite(target)) {
        throw TrainingFault("train_step: non-finite target at step " + std::to_string(adam.step + 1));
    }
    const double error = target - q_value(net, s, action);
    const double loss = error * error;
    if (!std::isfinite(loss)) {
        throw TrainingFault("train_step: non-finite loss at step " + std::to_string(adam.step + 1));
    }
    const double grad = -2.0 * error;
    const auto& cfg = adam.config;
    const auto n = net.inputs();

    adam.step += 1;
    const double t = static_cast<double>(adam.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    const double b1 = cfg.beta1;
    const double b2 = cfg.beta2;
    const double lr = cfg.learning_rate;
    const double eps = cfg.epsilon;

    if (grad != 0.0) {
        const auto gi = static_cast<std::uint32_t>(s.group_index());
        const auto bi = static_cast<std::uint32_t>(s.bin_index());
        insert_sorted(adam.touched[action], gi);
        insert_sorted(adam.touched[action], bi);
        adam.bias_touched[action] = true;
    }

    auto w = net.weights();
    auto b = net.bias();
    bool finite = true;
    const auto gi = s.group_index();
    const auto bi = s.bin_index();
    for (std::size_t a = 0; a < net.actions(); ++a) {
        auto& cols = adam.touched[a];
        std::size_t kept = 0;
        for (const auto j : cols) {
            const auto k = a * n + j;
            const double g = (a == action && (j == gi || j == bi)) ? grad : 0.0;
            double& m = adam.m_weights[k];
            double& v = adam.v_weights[k];
            m = flush_subnormal(b1 * m + (1.0 - b1) * g);
            v = flush_subnormal(b2 * v + (1.0 - b2) * g * g);
            if (m != 0.0) {
                w[k] -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
                finite = finite && std::isfinite(w[k]);
            }
            if (m != 0.0 || v != 0.0) {
                cols[kept++] = j;
            }
        }
        cols.resize(kept);
        if (adam.bias_touched[a]) {
            const double g = a == action ? grad : 0.0;
            double& m = adam.m_bias[a];
            double& v = adam.v_bias[a];
            m = flush_subnormal(b1 * m + (1.0 - b1) * g);
            v = flush_subnormal(b2 * v + (1.0 - b2) * g * g);
            b[a] -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
            finite = finite && std::isfinite(b[a]);
            adam.bias_touched[a] = m != 0.0 || v != 0.0;
        }
    }
    if (!finite) {
        throw TrainingFault("train_step: non-finite parameter after step " + std::to_string(adam.step));
    }
    return loss;
}

void save_qnet(const std::filesystem::path& path, const QNet& net, const AdamState& adam) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << std::setprecision(17);
    const auto write_row = [&out](std::span<const double> values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i == 0 ? "" : " ") << values[i];
        }
        out << '\n';
    };
    const auto n = net.inputs();
    const auto write_matrix = [&](std::span<const double> values) {
        for (std::size_t a = 0; a < net.actions(); ++a) {
            write_row(values.subspan(a * n, n));
        }
    };
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << n << ' ' << net.actions() << '\n';
    write_matrix(net.weights());
    write_row(net.bias());
    out << adam.step << ' ' << adam.config.learning_rate << ' ' << adam.config.beta1 << ' ' << adam.config.beta2
        << ' ' << adam.config.epsilon << '\n';
    write_matrix(adam.m_weights);
    write_row(adam.m_bias);
    write_matrix(adam.v_weights);
    write_row(adam.v_bias);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

LoadedQNet load_qnet(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    const auto fail = [&path](const std::string& what) {
        return IoError(path.string() + ": " + what);
    };
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) {
        throw fail("not a weights file");
    }
    if (version != kFormatVersion) {
        throw fail("unsupported format version " + std::to_string(version));
    }
    std::size_t n = 0;
    std::size_t m = 0;
    if (!(in >> n >> m) || n == 0 || m == 0) {
        throw fail("bad dimensions");
    }
    // strtod rather than operator>>: decayed moments can be subnormal, which streams reject.
    const auto read_double = [&](double& v, const char* what) {
        std::string token;
        if (!(in >> token)) {
            throw fail(std::string("truncated ") + what);
        }
        char* end = nullptr;
        v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            throw fail(std::string("malformed number in ") + what);
        }
    };
    const auto read = [&](std::span<double> values, const char* what) {
        for (double& v : values) {
            read_double(v, what);
        }
    };
    LoadedQNet loaded{QNet(n, m), {}};
    read(loaded.net.weights(), "weights");
    read(loaded.net.bias(), "bias");
    AdamConfig cfg;
    std::uint64_t step = 0;
    if (!(in >> step)) {
        throw fail("truncated optimizer header");
    }
    read_double(cfg.learning_rate, "optimizer header");
    read_double(cfg.beta1, "optimizer header");
    read_double(cfg.beta2, "optimizer header");
    read_double(cfg.epsilon, "optimizer header");
    loaded.adam = AdamState(loaded.net, cfg);
    loaded.adam.step = step;
    read(loaded.adam.m_weights, "first moments");
    read(loaded.adam.m_bias, "first moments");
    read(loaded.adam.v_weights, "second moments");
    read(loaded.adam.v_bias, "second moments");
    loaded.adam.rebuild_touched(n, m);
    return loaded;
}

} // namespace fairprice
