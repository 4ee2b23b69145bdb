// Command line entry point: run presets or config files, evaluate saved weights.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fairprice/agent.hpp"
#include "fairprice/errors.hpp"
#include "fairprice/qnet.hpp"
#include "fairprice/runner.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitTraining = 2;
constexpr int kExitIo = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> bids;
    std::string out;
};

std::filesystem::path output_root(const Overrides& o, const fairprice::ExperimentConfig& config) {
    if (!o.out.empty()) {
        return o.out;
    }
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    if (const char* env = std::getenv("FAIRPRICE_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

void apply(const Overrides& o, fairprice::ExperimentConfig& config) {
    if (o.seed) {
        config.seeds = {*o.seed};
    } else if (o.seeds) {
        if (*o.seeds == 0) {
            throw fairprice::ConfigError("--seeds: must be positive");
        }
        config.seeds.clear();
        for (std::uint64_t s = 1; s <= *o.seeds; ++s) {
            config.seeds.push_back(s);
        }
    }
    if (o.epochs) {
        config.setup.agent.epochs = *o.epochs;
    }
    if (o.bids) {
        config.setup.agent.bids_per_epoch = *o.bids;
    }
    config.setup.validate();
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Run a single seed");
    cmd->add_option("--seeds", o.seeds, "Run seeds 1..N");
    cmd->add_option("--epochs", o.epochs, "Override the number of epochs");
    cmd->add_option("--bids", o.bids, "Override bids per epoch");
}

int run_command(const std::string& target, const Overrides& o, bool log_transitions) {
    auto config = fairprice::resolve_config(target);
    apply(o, config);
    config.output_dir = output_root(o, config) / config.name;
    fairprice::RunOptions options;
    options.log_transitions = log_transitions;
    const auto artifacts = fairprice::run(config, options);
    std::cout << fairprice::summary_to_json(artifacts.summary).dump(2) << '\n';
    std::cerr << "wrote " << artifacts.csv_files.size() << " metric files and " << artifacts.summary_file.string()
              << '\n';
    return 0;
}

int evaluate_command(const std::string& weights, const std::string& target, const Overrides& o) {
    auto config = fairprice::resolve_config(target);
    apply(o, config);
    auto loaded = fairprice::load_qnet(weights);
    const auto seed = config.seeds.front();
    const auto result =
        fairprice::evaluate_policy(config.setup, std::move(loaded.net), seed, config.setup.agent.epochs);
    auto report = fairprice::summarize(config.name, {seed}, {result.epochs}, result.epochs.size());
    auto doc = fairprice::summary_to_json(report);
    doc["mode"] = "evaluate";
    doc["weights"] = weights;
    std::cout << doc.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair dynamic pricing with linear Q-learning"};
    app.require_subcommand(1);

    Overrides run_overrides;
    std::string run_target;
    bool log_transitions = false;
    auto* run = app.add_subcommand("run", "Train on a preset or config file and write metrics");
    run->add_option("config", run_target, "Preset name (exp1..exp5) or JSON config path")->required();
    run->add_option("--out", run_overrides.out, "Output root (default $FAIRPRICE_OUT or ./results)");
    run->add_flag("--log-transitions", log_transitions, "Write one NDJSON record per bid");
    add_overrides(run, run_overrides);

    Overrides eval_overrides;
    std::string weights_path;
    std::string eval_target;
    auto* evaluate = app.add_subcommand("evaluate", "Greedy rollout of saved weights without training");
    evaluate->add_option("weights", weights_path, "Weights file written by run")->required();
    evaluate->add_option("config", eval_target, "Preset name or JSON config path")->required();
    add_overrides(evaluate, eval_overrides);

    auto* list = app.add_subcommand("list-presets", "Print the built-in experiment presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            return run_command(run_target, run_overrides, log_transitions);
        }
        if (*evaluate) {
            return evaluate_command(weights_path, eval_target, eval_overrides);
        }
        if (*list) {
            for (const auto& name : fairprice::preset_names()) {
                const auto& r = fairprice::preset(name).setup.reward;
                std::cout << name << "  beta_p=" << r.beta_p << " beta_f=" << r.beta_f << " p_t=" << r.p_target
                          << " f_t=" << r.f_target << '\n';
            }
            return 0;
        }
    } catch (const fairprice::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fairprice::TrainingFault& e) {
        std::cerr << "training fault: " << e.what() << '\n';
        return kExitTraining;
    } catch (const fairprice::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
