#include "fairprice/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fairprice/errors.hpp"
#include "fairprice/qnet.hpp"

namespace fairprice {

using nlohmann::json;

namespace {

template <typename Enum>
struct EnumName {
    Enum value;
    const char* name;
};

constexpr EnumName<NextStateMode> kNextStateNames[] = {
    {NextStateMode::next_draw, "next_draw"},
    {NextStateMode::same_customer, "same_customer"},
};
constexpr EnumName<FairnessTracking> kTrackingNames[] = {
    {FairnessTracking::offered, "offered"},
    {FairnessTracking::accepted, "accepted"},
};
constexpr EnumName<PenaltyTrigger> kTriggerNames[] = {
    {PenaltyTrigger::rejected, "rejected"},
    {PenaltyTrigger::revenue_rejected, "revenue_rejected"},
};
constexpr EnumName<LrMetricMode> kLrMetricNames[] = {
    {LrMetricMode::cumulative, "cumulative"},
    {LrMetricMode::per_epoch, "per_epoch"},
    {LrMetricMode::step_size, "step_size"},
};

template <typename Enum, std::size_t N>
const char* enum_name(const EnumName<Enum> (&names)[N], Enum value) {
    for (const auto& n : names) {
        if (n.value == value) {
            return n.name;
        }
    }
    return "?";
}

template <typename Enum, std::size_t N>
Enum enum_value(const EnumName<Enum> (&names)[N], const std::string& text, const std::string& field) {
    for (const auto& n : names) {
        if (text == n.name) {
            return n.value;
        }
    }
    std::string allowed;
    for (const auto& n : names) {
        allowed += (allowed.empty() ? "" : ", ") + std::string(n.name);
    }
    throw ConfigError(field + ": unknown value '" + text + "' (expected one of " + allowed + ")");
}

// Reads optional keys from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            return;
        }
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(field(key) + ": wrong type (" + std::string(it->type_name()) + ")");
        }
    }

    void read_number(const char* key, double& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            return;
        }
        if (!it->is_number()) {
            throw ConfigError(field(key) + ": expected a number");
        }
        out = it->get<double>();
    }

    void read_count(const char* key, std::size_t& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            return;
        }
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
            throw ConfigError(field(key) + ": expected a non-negative integer");
        }
        out = it->get<std::size_t>();
    }

    template <typename Enum, std::size_t N>
    void read_enum(const char* key, const EnumName<Enum> (&names)[N], Enum& out) {
        std::string text;
        read(key, text);
        if (obj_.contains(key)) {
            out = enum_value(names, text, field(key));
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(field(key.c_str()) + ": unknown key");
            }
        }
    }

    std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

SummaryStat mean_stddev(const std::vector<double>& values) {
    SummaryStat s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

json stat_json(const SummaryStat& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
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

json transition_json(const TransitionRecord& r) {
    return {{"epoch", r.epoch},
            {"iteration", r.iteration},
            {"group", r.state.group},
            {"fairness_bin", r.state.bin},
            {"action", r.action},
            {"bid", r.bid},
            {"explored", r.explored},
            {"accepted", r.outcome.accepted},
            {"price", r.outcome.price},
            {"fairness", r.fairness},
            {"reward", r.reward},
            {"target", r.target},
            {"loss", r.loss}};
}

std::string reward_curve_csv(const std::vector<EpochStats>& series) {
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& s : series) {
        total += s.mean_reward * static_cast<double>(s.bids);
        cumulative.push_back(total);
    }
    const auto scaled = minmax_scale(cumulative);
    std::ostringstream out;
    out << "epoch,mean_reward_scaled,cumulative_reward,cumulative_reward_minmax\n";
    char buf[128];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.6g,%.6g,%.6g\n", series[i].epoch, series[i].mean_reward,
                      cumulative[i], scaled[i]);
        out << buf;
    }
    return out.str();
}

} // namespace

std::vector<std::string> preset_names() {
    return {"exp1", "exp2", "exp3", "exp4", "exp5"};
}

bool is_preset(const std::string& name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    auto& r = c.setup.reward;
    if (name == "exp1") { // revenue only
        r.beta_p = 1.0;
        r.beta_f = 0.0;
        r.p_target = 1.0;
    } else if (name == "exp2") { // fairness only
        r.beta_p = 0.0;
        r.beta_f = 1.0;
        r.f_target = 1.0;
    } else if (name == "exp3") {
        r.beta_p = 1.0;
        r.beta_f = 1.0;
        r.p_target = 1.0;
        r.f_target = 0.90;
    } else if (name == "exp4") {
        r.beta_p = 1.0;
        r.beta_f = 1.0;
        r.p_target = 1.0;
        r.f_target = 0.75;
    } else if (name == "exp5") { // null model: uniform random bids, no learning
        r.beta_p = 0.0;
        r.beta_f = 0.0;
        c.setup.agent.epsilon_fixed = 1.0;
        c.setup.agent.learn = false;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

ExperimentConfig config_from_json(const json& doc) {
    Section root(doc, "");
    ExperimentConfig c;
    std::string base;
    root.read("preset", base);
    if (!base.empty()) {
        c = preset(base);
    }
    root.read("name", c.name);
    if (const auto it = doc.find("seeds"); it != doc.end() && it->is_array()) {
        for (const auto& seed : *it) {
            if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
                throw ConfigError("seeds: expected non-negative integers");
            }
        }
    }
    root.read("seeds", c.seeds);
    std::string out_dir = c.output_dir.string();
    root.read("output_dir", out_dir);
    c.output_dir = out_dir;

    auto& s = c.setup;
    if (const json* a = root.child("agent")) {
        Section agent(*a, "agent");
        agent.read_count("epochs", s.agent.epochs);
        agent.read_count("bids_per_epoch", s.agent.bids_per_epoch);
        agent.read_count("customers_per_epoch", s.agent.customers_per_epoch);
        agent.read_number("epsilon_decay", s.agent.epsilon_decay);
        if (const json* fixed = agent.child("epsilon_fixed")) {
            if (fixed->is_null()) {
                s.agent.epsilon_fixed.reset();
            } else if (fixed->is_number()) {
                s.agent.epsilon_fixed = fixed->get<double>();
            } else {
                throw ConfigError("agent.epsilon_fixed: expected a number or null");
            }
        }
        agent.read_number("gamma", s.agent.gamma);
        agent.read("learn", s.agent.learn);
        agent.read_number("learning_rate", s.agent.adam.learning_rate);
        agent.read_number("adam_beta1", s.agent.adam.beta1);
        agent.read_number("adam_beta2", s.agent.adam.beta2);
        agent.read_number("adam_epsilon", s.agent.adam.epsilon);
        agent.read_number("init_scale", s.agent.init_scale);
        agent.read_enum("next_state", kNextStateNames, s.agent.next_state);
        agent.read_enum("fairness_tracking", kTrackingNames, s.agent.tracking);
        agent.read_enum("penalty_trigger", kTriggerNames, s.agent.penalty_trigger);
        agent.read_enum("lr_metric", kLrMetricNames, s.agent.lr_metric);
        agent.finish();
    }
    if (const json* r = root.child("reward")) {
        Section reward(*r, "reward");
        reward.read_number("beta_p", s.reward.beta_p);
        reward.read_number("sigma_p", s.reward.sigma_p);
        reward.read_number("p_target", s.reward.p_target);
        reward.read_number("beta_f", s.reward.beta_f);
        reward.read_number("sigma_f", s.reward.sigma_f);
        reward.read_number("f_target", s.reward.f_target);
        reward.read_number("penalty", s.reward.penalty);
        reward.finish();
    }
    if (const json* g = root.child("grid")) {
        Section grid(*g, "grid");
        double min = s.grid.min();
        double max = s.grid.max();
        double step = s.grid.step();
        grid.read_number("min", min);
        grid.read_number("max", max);
        grid.read_number("step", step);
        grid.finish();
        s.grid = ActionGrid(min, max, step);
    }
    if (const json* p = root.child("partition")) {
        Section partition(*p, "partition");
        double mesh = s.partition.mesh();
        bool separate = s.partition.separate_unit_bin();
        partition.read_number("mesh", mesh);
        partition.read("separate_unit_bin", separate);
        partition.finish();
        s.partition = FairnessPartition(mesh, separate);
    }
    if (const json* groups = root.child("groups")) {
        if (!groups->is_array()) {
            throw ConfigError("groups: expected an array");
        }
        s.groups.clear();
        for (std::size_t i = 0; i < groups->size(); ++i) {
            Section group((*groups)[i], "groups[" + std::to_string(i) + "]");
            GroupSpec spec{i, 0.0, 0.0};
            group.read_number("b", spec.b);
            group.read_number("w", spec.w);
            group.finish();
            s.groups.push_back(spec);
        }
    }
    root.read("group_weights", s.group_weights);
    root.finish();

    if (c.name.empty()) {
        throw ConfigError("name: must not be empty");
    }
    if (c.seeds.empty()) {
        throw ConfigError("seeds: must not be empty");
    }
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
        throw ConfigError("seeds: duplicate seed");
    }
    s.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    const auto& s = c.setup;
    json groups = json::array();
    for (const auto& g : s.groups) {
        groups.push_back({{"b", g.b}, {"w", g.w}});
    }
    return {
        {"name", c.name},
        {"seeds", c.seeds},
        {"output_dir", c.output_dir.string()},
        {"agent",
         {{"epochs", s.agent.epochs},
          {"bids_per_epoch", s.agent.bids_per_epoch},
          {"customers_per_epoch", s.agent.customers_per_epoch},
          {"epsilon_decay", s.agent.epsilon_decay},
          {"epsilon_fixed", s.agent.epsilon_fixed ? json(*s.agent.epsilon_fixed) : json(nullptr)},
          {"gamma", s.agent.gamma},
          {"learn", s.agent.learn},
          {"learning_rate", s.agent.adam.learning_rate},
          {"adam_beta1", s.agent.adam.beta1},
          {"adam_beta2", s.agent.adam.beta2},
          {"adam_epsilon", s.agent.adam.epsilon},
          {"init_scale", s.agent.init_scale},
          {"next_state", enum_name(kNextStateNames, s.agent.next_state)},
          {"fairness_tracking", enum_name(kTrackingNames, s.agent.tracking)},
          {"penalty_trigger", enum_name(kTriggerNames, s.agent.penalty_trigger)},
          {"lr_metric", enum_name(kLrMetricNames, s.agent.lr_metric)}}},
        {"reward",
         {{"beta_p", s.reward.beta_p},
          {"sigma_p", s.reward.sigma_p},
          {"p_target", s.reward.p_target},
          {"beta_f", s.reward.beta_f},
          {"sigma_f", s.reward.sigma_f},
          {"f_target", s.reward.f_target},
          {"penalty", s.reward.penalty}}},
        {"grid", {{"min", s.grid.min()}, {"max", s.grid.max()}, {"step", s.grid.step()}}},
        {"partition", {{"mesh", s.partition.mesh()}, {"separate_unit_bin", s.partition.separate_unit_bin()}}},
        {"groups", groups},
        {"group_weights", s.group_weights},
    };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        auto config = config_from_json(doc);
        if (config.name.empty()) {
            config.name = path.stem().string();
        }
        return config;
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ExperimentConfig resolve_config(const std::string& preset_or_path) {
    if (is_preset(preset_or_path)) {
        auto config = preset(preset_or_path);
        config.setup.validate();
        return config;
    }
    return load_config(preset_or_path);
}

Summary summarize(const std::string& name, const std::vector<std::uint64_t>& seeds,
                  const std::vector<std::vector<EpochStats>>& series, std::size_t window) {
    Summary out;
    out.name = name;
    out.seeds = seeds;
    out.window = window;
    std::vector<double> bid;
    std::vector<double> fair;
    std::vector<double> rej;
    std::vector<double> rev;
    std::vector<std::vector<double>> groups;
    for (const auto& s : series) {
        if (s.empty()) {
            continue;
        }
        const std::size_t w = std::min(window, s.size());
        const auto first = s.end() - static_cast<std::ptrdiff_t>(w);
        const auto avg = [&](auto field) {
            double total = 0.0;
            for (auto it = first; it != s.end(); ++it) {
                total += field(*it);
            }
            return total / static_cast<double>(w);
        };
        bid.push_back(avg([](const EpochStats& e) { return e.cum_bid; }));
        fair.push_back(avg([](const EpochStats& e) { return e.mean_fairness; }));
        rej.push_back(avg([](const EpochStats& e) { return e.reject_ratio; }));
        rev.push_back(avg([](const EpochStats& e) { return e.expected_revenue; }));
        groups.resize(s.front().group_means.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            groups[g].push_back(avg([g](const EpochStats& e) { return e.group_means[g]; }));
        }
    }
    out.cum_bid = mean_stddev(bid);
    out.fairness = mean_stddev(fair);
    out.reject_ratio = mean_stddev(rej);
    out.expected_revenue = mean_stddev(rev);
    for (const auto& g : groups) {
        out.group_means.push_back(mean_stddev(g));
    }
    return out;
}

json summary_to_json(const Summary& s) {
    json groups = json::array();
    for (const auto& g : s.group_means) {
        groups.push_back(stat_json(g));
    }
    return {{"name", s.name},
            {"window", s.window},
            {"seeds", s.seeds},
            {"cum_bid", stat_json(s.cum_bid)},
            {"fairness", stat_json(s.fairness)},
            {"reject_ratio", stat_json(s.reject_ratio)},
            {"expected_revenue", stat_json(s.expected_revenue)},
            {"group_means", groups}};
}

RunArtifacts run(const ExperimentConfig& config, const RunOptions& options) {
    config.setup.validate();
    const auto& dir = config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "config.json", config_to_json(config).dump(2) + "\n");

    RunArtifacts artifacts;
    std::vector<std::vector<EpochStats>> emitted;
    for (const auto seed : config.seeds) {
        const auto tag = "seed" + std::to_string(seed);
        std::ofstream log;
        TransitionSink sink;
        if (options.log_transitions) {
            const auto log_path = dir / ("transitions_" + tag + ".ndjson");
            log.open(log_path, std::ios::binary);
            if (!log) {
                throw IoError("cannot open " + log_path.string() + " for writing");
            }
            sink = [&log](const TransitionRecord& r) { log << transition_json(r).dump() << '\n'; };
        }
        const auto result = run_experiment(config.setup, seed, sink);

        const auto csv = dir / ("metrics_" + tag + ".csv");
        emit_csv(result.epochs, csv);
        artifacts.csv_files.push_back(csv);

        const auto weights = dir / ("weights_" + tag + ".txt");
        save_qnet(weights, result.net, result.adam);
        artifacts.weight_files.push_back(weights);

        write_text(dir / ("reward_curve_" + tag + ".csv"), reward_curve_csv(result.epochs));
        emitted.push_back(read_csv(csv));
    }

    artifacts.summary = summarize(config.name, config.seeds, emitted);
    artifacts.summary_file = dir / "summary.json";
    write_text(artifacts.summary_file, summary_to_json(artifacts.summary).dump(2) + "\n");
    return artifacts;
}

} // namespace fairprice
