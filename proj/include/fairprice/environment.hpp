#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairprice {

// Single random stream per experiment run, threaded through environment and agent.
using Rng = std::mt19937_64;

// Logistic price sensitivity of one customer group: phi(a) = 1 / (1 + exp(-(b + w * a))).
struct GroupSpec {
    std::size_t id = 0;
    double b = 0.0;
    double w = 0.0;
};

struct Customer {
    std::size_t id = 0;
    std::size_t group = 0;
};

struct Population {
    std::vector<GroupSpec> groups;
    std::vector<Customer> customers;
};

struct BidOutcome {
    bool accepted = false;
    double price = 0.0; // offered bid when accepted, penalty otherwise
    std::size_t group = 0;
};

// The four synthetic segments: high tolerance, price sensitive, quality seeking, indifferent.
std::vector<GroupSpec> default_groups();

double acceptance_probability(double bid, const GroupSpec& group);

// One Bernoulli draw with success probability acceptance_probability(bid, group).
BidOutcome respond(double bid, const GroupSpec& group, double penalty, Rng& rng);

// Fixed-composition population: counts[k] customers in group k, ids assigned in order.
Population make_population(std::vector<GroupSpec> groups, std::span<const std::size_t> counts);

// Roster of `size` customers whose groups are drawn from the categorical distribution `weights`.
Population draw_roster(std::vector<GroupSpec> groups, std::span<const double> weights, std::size_t size,
                       Rng& rng);

// Uniform draw over the roster. Throws ConfigError on an empty roster.
Customer sample_customer(const Population& pop, Rng& rng);

// Validates ids are unique and contiguous (0..n-1), parameters finite, customers reference groups.
void validate(const Population& pop);

} // namespace fairprice
