#pragma once

#include "fairprice/environment.hpp"

namespace fairprice {

// Gaussian revenue and fairness objectives. Prices are normalized by the grid maximum.
struct RewardParams {
    double beta_p = 1.0;
    double sigma_p = 0.1;
    double p_target = 1.0;
    double beta_f = 0.0;
    double sigma_f = 0.1;
    double f_target = 1.0;
    double penalty = -0.5; // rejection value, already normalized
};

// Throws ConfigError naming the offending field.
void validate(const RewardParams& params);

// (beta_p exp(-(p - p_t)^2 / sigma_p) + beta_f exp(-(f - f_t)^2 / sigma_f)) / (beta_p + beta_f),
// or 0 when both weights are zero.
double reward(double price, double fairness, const RewardParams& params);

// bid / a_max when accepted, the penalty when rejected.
double price_outcome(double bid, const BidOutcome& outcome, double a_max, double penalty);

} // namespace fairprice
