#include "doctest.h"

#include <cmath>
#include <vector>

#include "fairprice/environment.hpp"
#include "fairprice/errors.hpp"

using namespace fairprice;

namespace {

const GroupSpec& group(std::size_t k) {
    static const auto groups = default_groups();
    return groups.at(k);
}

} // namespace

TEST_CASE("default groups carry the logistic weights table") {
    const auto g = default_groups();
    REQUIRE(g.size() == 4);
    CHECK(g[0].b == 18.229);
    CHECK(g[0].w == -2.369);
    CHECK(g[1].b == 4.4757);
    CHECK(g[1].w == -1.1526);
    CHECK(g[2].b == -1.09195);
    CHECK(g[2].w == 0.34);
    CHECK(g[3].b == 0.0);
    CHECK(g[3].w == 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(g[k].id == k);
    }
}

TEST_CASE("acceptance probability examples") {
    for (double a : {0.0, 3.3, 10.0, -7.0}) {
        CHECK(acceptance_probability(a, group(3)) == 0.5);
    }
    CHECK(acceptance_probability(18.229 / 2.369, group(0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(acceptance_probability(0.0, group(1)) == doctest::Approx(0.9887458458568125).epsilon(1e-12));
    CHECK(acceptance_probability(8.0, group(2)) > acceptance_probability(2.0, group(2)));
}

TEST_CASE("acceptance probability is strictly decreasing for negative slopes") {
    Rng rng(7);
    std::uniform_real_distribution<double> b(-10.0, 10.0);
    std::uniform_real_distribution<double> w(-3.0, -0.05);
    std::uniform_real_distribution<double> a(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const GroupSpec g{0, b(rng), w(rng)};
        double a1 = a(rng);
        double a2 = a(rng);
        if (a1 == a2) {
            continue;
        }
        if (a1 > a2) {
            std::swap(a1, a2);
        }
        CHECK(acceptance_probability(a1, g) > acceptance_probability(a2, g));
        const double p = acceptance_probability(a1, g);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("respond draws accept/reject with the logistic probability") {
    Rng rng(11);
    const GroupSpec always{0, 50.0, 0.0};
    const GroupSpec never{0, -50.0, 0.0};
    for (int i = 0; i < 200; ++i) {
        const auto yes = respond(4.2, always, -0.5, rng);
        CHECK(yes.accepted);
        CHECK(yes.price == 4.2);
        const auto no = respond(4.2, never, -0.5, rng);
        CHECK_FALSE(no.accepted);
        CHECK(no.price == -0.5);
    }

    int accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        accepted += respond(6.0, group(3), -0.5, rng).accepted ? 1 : 0;
    }
    CHECK(std::abs(accepted / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("empirical accept frequency lies within three standard errors") {
    Rng rng(3);
    const std::size_t n = 20000;
    for (std::size_t k = 0; k < 4; ++k) {
        for (double a : {1.0, 4.0, 7.5}) {
            const double phi = acceptance_probability(a, group(k));
            std::size_t hits = 0;
            for (std::size_t i = 0; i < n; ++i) {
                hits += respond(a, group(k), -0.5, rng).accepted ? 1 : 0;
            }
            const double se = std::sqrt(phi * (1.0 - phi) / static_cast<double>(n));
            CHECK(std::abs(static_cast<double>(hits) / n - phi) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("respond replays identically from the same generator state") {
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 500; ++i) {
        const auto x = respond(5.0, group(2), -0.5, a);
        const auto y = respond(5.0, group(2), -0.5, b);
        CHECK(x.accepted == y.accepted);
        CHECK(x.price == y.price);
        CHECK(x.group == 2);
    }
}

TEST_CASE("sample_customer") {
    Rng rng(5);
    SUBCASE("singleton roster") {
        const std::size_t one[] = {0, 1, 0, 0};
        const auto pop = make_population(default_groups(), one);
        for (int i = 0; i < 50; ++i) {
            const auto c = sample_customer(pop, rng);
            CHECK(c.id == 0);
            CHECK(c.group == 1);
        }
    }
    SUBCASE("25 customers per group are drawn uniformly") {
        const std::size_t counts[] = {25, 25, 25, 25};
        const auto pop = make_population(default_groups(), counts);
        CHECK(pop.customers.size() == 100);
        std::vector<std::size_t> freq(4, 0);
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            ++freq[sample_customer(pop, rng).group];
        }
        for (auto f : freq) {
            CHECK(std::abs(static_cast<double>(f) / draws - 0.25) <= 0.01);
        }
    }
    SUBCASE("empty roster is a configuration error") {
        Population empty;
        empty.groups = default_groups();
        CHECK_THROWS_AS(sample_customer(empty, rng), ConfigError);
    }
}

TEST_CASE("draw_roster follows the group weights") {
    Rng rng(21);
    std::vector<std::size_t> freq(4, 0);
    for (int epoch = 0; epoch < 200; ++epoch) {
        const auto roster = draw_roster(default_groups(), {}, 100, rng);
        REQUIRE(roster.customers.size() == 100);
        for (const auto& c : roster.customers) {
            ++freq[c.group];
        }
    }
    for (auto f : freq) {
        CHECK(std::abs(static_cast<double>(f) / 20000.0 - 0.25) <= 0.01);
    }

    const double only_third[] = {0.0, 0.0, 1.0, 0.0};
    const auto skewed = draw_roster(default_groups(), only_third, 50, rng);
    for (const auto& c : skewed.customers) {
        CHECK(c.group == 2);
    }
    const double wrong_size[] = {1.0, 1.0};
    CHECK_THROWS_AS(draw_roster(default_groups(), wrong_size, 10, rng), ConfigError);
}

TEST_CASE("population validation") {
    auto groups = default_groups();
    groups[2].id = 7;
    const std::size_t counts[] = {1, 1, 1, 1};
    CHECK_THROWS_AS(make_population(groups, counts), ConfigError);

    auto bad = default_groups();
    bad[0].w = std::nan("");
    CHECK_THROWS_AS(make_population(bad, counts), ConfigError);

    Population pop = make_population(default_groups(), counts);
    pop.customers.push_back({99, 4});
    CHECK_THROWS_AS(validate(pop), ConfigError);
}
