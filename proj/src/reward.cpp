#include "fairprice/reward.hpp"

#include <cmath>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {

void validate(const RewardParams& p) {
    const auto require = [](bool ok, const char* field, const char* rule) {
        if (!ok) {
            throw ConfigError(std::string("reward.") + field + ": " + rule);
        }
    };
    require(std::isfinite(p.sigma_p) && p.sigma_p > 0.0, "sigma_p", "must be > 0");
    require(std::isfinite(p.sigma_f) && p.sigma_f > 0.0, "sigma_f", "must be > 0");
    require(std::isfinite(p.beta_p) && p.beta_p >= 0.0, "beta_p", "must be >= 0");
    require(std::isfinite(p.beta_f) && p.beta_f >= 0.0, "beta_f", "must be >= 0");
    require(p.p_target >= 0.0 && p.p_target <= 1.0, "p_target", "must lie in [0, 1]");
    require(p.f_target >= 0.0 && p.f_target <= 1.0, "f_target", "must lie in [0, 1]");
    require(std::isfinite(p.penalty), "penalty", "must be finite");
}

double reward(double price, double fairness, const RewardParams& p) {
    const double total = p.beta_p + p.beta_f;
    if (total == 0.0) {
        return 0.0;
    }
    const double dp = price - p.p_target;
    const double df = fairness - p.f_target;
    const double revenue = p.beta_p * std::exp(-dp * dp / p.sigma_p);
    const double fair = p.beta_f * std::exp(-df * df / p.sigma_f);
    return (revenue + fair) / total;
}

double price_outcome(double bid, const BidOutcome& outcome, double a_max, double penalty) {
    return outcome.accepted ? bid / a_max : penalty;
}

} // namespace fairprice
