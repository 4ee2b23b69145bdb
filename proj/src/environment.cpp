#include "fairprice/environment.hpp"

#include <cmath>
#include <string>

#include "fairprice/errors.hpp"

namespace fairprice {

std::vector<GroupSpec> default_groups() {
    return {
        {0, 18.229, -2.369},
        {1, 4.4757, -1.1526},
        {2, -1.09195, 0.34},
        {3, 0.0, 0.0},
    };
}

double acceptance_probability(double bid, const GroupSpec& group) {
    return 1.0 / (1.0 + std::exp(-(group.b + group.w * bid)));
}

BidOutcome respond(double bid, const GroupSpec& group, double penalty, Rng& rng) {
    std::bernoulli_distribution accept(acceptance_probability(bid, group));
    BidOutcome outcome;
    outcome.group = group.id;
    outcome.accepted = accept(rng);
    outcome.price = outcome.accepted ? bid : penalty;
    return outcome;
}

Population make_population(std::vector<GroupSpec> groups, std::span<const std::size_t> counts) {
    if (counts.size() != groups.size()) {
        throw ConfigError("population: expected " + std::to_string(groups.size()) + " group counts, got " +
                          std::to_string(counts.size()));
    }
    Population pop;
    pop.groups = std::move(groups);
    for (std::size_t g = 0; g < counts.size(); ++g) {
        for (std::size_t k = 0; k < counts[g]; ++k) {
            pop.customers.push_back({pop.customers.size(), g});
        }
    }
    validate(pop);
    return pop;
}

Population draw_roster(std::vector<GroupSpec> groups, std::span<const double> weights, std::size_t size,
                       Rng& rng) {
    if (groups.empty()) {
        throw ConfigError("population: no groups");
    }
    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty()) {
        w.assign(groups.size(), 1.0);
    }
    if (w.size() != groups.size()) {
        throw ConfigError("group_weights: expected " + std::to_string(groups.size()) + " entries");
    }
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    Population pop;
    pop.groups = std::move(groups);
    pop.customers.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        pop.customers.push_back({i, pick(rng)});
    }
    return pop;
}

Customer sample_customer(const Population& pop, Rng& rng) {
    if (pop.customers.empty()) {
        throw ConfigError("population: empty customer roster");
    }
    std::uniform_int_distribution<std::size_t> pick(0, pop.customers.size() - 1);
    return pop.customers[pick(rng)];
}

void validate(const Population& pop) {
    if (pop.groups.empty()) {
        throw ConfigError("population: no groups");
    }
    if (pop.customers.empty()) {
        throw ConfigError("population: empty customer roster");
    }
    for (std::size_t g = 0; g < pop.groups.size(); ++g) {
        const auto& spec = pop.groups[g];
        if (spec.id != g) {
            throw ConfigError("groups[" + std::to_string(g) + "].id: expected " + std::to_string(g));
        }
        if (!std::isfinite(spec.b) || !std::isfinite(spec.w)) {
            throw ConfigError("groups[" + std::to_string(g) + "]: b and w must be finite");
        }
    }
    for (const auto& c : pop.customers) {
        if (c.group >= pop.groups.size()) {
            throw ConfigError("customer " + std::to_string(c.id) + ": unknown group " + std::to_string(c.group));
        }
    }
}

} // namespace fairprice
