#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairprice/agent.hpp"
#include "fairprice/metrics.hpp"

namespace fairprice {

struct ExperimentConfig {
    std::string name;
    Setup setup;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::filesystem::path output_dir;
};

// Hyperparameter rows of the five reference experiments: exp1 revenue only, exp2 fairness only,
// exp3 and exp4 fairness targets 0.90 and 0.75, exp5 random null model.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ExperimentConfig preset(const std::string& name);

// Missing keys keep the preset-independent defaults. Throws ConfigError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Throws IoError when the file cannot be read, ConfigError on parse or validation failure.
ExperimentConfig load_config(const std::filesystem::path& path);

// A preset name or a path to a JSON config file.
ExperimentConfig resolve_config(const std::string& preset_or_path);

struct SummaryStat {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation across seeds, 0 for a single seed
};

// Mean and spread across seeds of final-window averages.
struct Summary {
    std::string name;
    std::size_t window = 0;
    std::vector<std::uint64_t> seeds;
    SummaryStat cum_bid;
    SummaryStat fairness;
    SummaryStat reject_ratio;
    SummaryStat expected_revenue;
    std::vector<SummaryStat> group_means;
};

inline constexpr std::size_t kSummaryWindow = 50;

// Averages each series over its last `window` epochs, then aggregates across series.
Summary summarize(const std::string& name, const std::vector<std::uint64_t>& seeds,
                  const std::vector<std::vector<EpochStats>>& series, std::size_t window = kSummaryWindow);
nlohmann::json summary_to_json(const Summary& summary);

struct RunOptions {
    bool log_transitions = false;
};

struct RunArtifacts {
    std::vector<std::filesystem::path> csv_files;
    std::vector<std::filesystem::path> weight_files;
    std::filesystem::path summary_file;
    Summary summary;
};

// Runs every seed and writes into config.output_dir:
//   metrics_seed<S>.csv, weights_seed<S>.txt, reward_curve_seed<S>.csv,
//   [transitions_seed<S>.ndjson], config.json, summary.json.
// The summary is computed from the CSV files as written.
RunArtifacts run(const ExperimentConfig& config, const RunOptions& options = {});

} // namespace fairprice
