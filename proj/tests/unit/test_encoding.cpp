#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fairprice/encoding.hpp"
#include "fairprice/environment.hpp"
#include "fairprice/errors.hpp"

using namespace fairprice;

TEST_CASE("worked example: four groups, three fairness intervals") {
    const FairnessPartition thirds(1.0 / 3.0, false);
    CHECK(thirds.bins() == 3);
    const auto s = encode_state(1, 4, 0.89, thirds);
    CHECK(s.dense() == std::vector<double>{0, 1, 0, 0, 0, 0, 1});
    CHECK(bin_of(0.89, thirds) == 2);
    CHECK(bin_of(1.0, thirds) == 2);
    CHECK(bin_of(0.0, thirds) == 0);
    CHECK(bin_of(1.0 / 3.0, thirds) == 1);
}

TEST_CASE("default partition has a separate bin for perfect fairness") {
    const FairnessPartition p(0.01);
    CHECK(p.bins() == 101);
    CHECK(bin_of(0.005, p) == 0);
    CHECK(bin_of(1.0, p) == 100);
    CHECK(bin_of(0.995, p) == 99);
    CHECK(bin_of(0.5, p) == 50);

    const auto first = encode_state(0, 4, 0.0, p);
    CHECK(first.group == 0);
    CHECK(first.bin == 0);
    const auto last = encode_state(3, 4, 1.0, p);
    CHECK(last.dense().back() == 1.0);
    CHECK(last.dense()[3] == 1.0);
}

TEST_CASE("dimensions") {
    const FairnessPartition p(0.01);
    const ActionGrid grid(0.0, 10.0, 0.1);
    CHECK(encode_state(0, 4, 0.3, p).dimension() == 4 + 100 + 1);
    CHECK(grid.size() == 101);
    CHECK(grid[0] == 0.0);
    CHECK(grid[100] == 10.0);
    CHECK(grid[50] == 5.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] > grid[i - 1]);
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.1));
    }
    CHECK(ActionGrid(2.0, 4.0, 0.5).size() == 5);
}

TEST_CASE("invalid meshes are rejected") {
    CHECK_THROWS_AS(ActionGrid(0.0, 10.0, 0.3), ConfigError);
    CHECK_THROWS_AS(ActionGrid(0.0, 10.0, 0.0), ConfigError);
    CHECK_THROWS_AS(ActionGrid(5.0, 1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(FairnessPartition(0.3), ConfigError);
    CHECK_THROWS_AS(FairnessPartition(-0.1), ConfigError);
}

TEST_CASE("out-of-range fairness is clamped and counted") {
    const FairnessPartition p(0.01);
    std::size_t clamps = 0;
    CHECK(encode_state(2, 4, 1.2, p, &clamps).bin == 100);
    CHECK(encode_state(2, 4, -0.3, p, &clamps).bin == 0);
    CHECK(encode_state(2, 4, 0.705, p, &clamps).bin == 70);
    CHECK(clamps == 2);
    CHECK_THROWS_AS(encode_state(4, 4, 0.5, p), ConfigError);
}

TEST_CASE("nearest_action") {
    const ActionGrid grid(0.0, 10.0, 0.1);
    CHECK(nearest_action(5.0, grid) == 50);
    CHECK(nearest_action(-1.0, grid) == 0);
    CHECK(nearest_action(5.04, grid) == 50);
    CHECK(nearest_action(5.06, grid) == 51);
    CHECK(nearest_action(42.0, grid) == 100);
    const ActionGrid halves(0.0, 1.0, 0.5);
    CHECK(nearest_action(0.25, halves) == 0); // exact tie goes low
    CHECK(nearest_action(0.75, halves) == 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(nearest_action(grid[i], grid) == i);
    }
}

TEST_CASE("encoding properties") {
    Rng rng(2024);
    std::uniform_real_distribution<double> f(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> g(0, 3);
    for (const auto& p : {FairnessPartition(0.01), FairnessPartition(0.1), FairnessPartition(1.0 / 3.0, false)}) {
        std::vector<double> values;
        for (int i = 0; i < 2000; ++i) {
            values.push_back(f(rng));
        }
        values.push_back(0.0);
        values.push_back(1.0);
        std::sort(values.begin(), values.end());
        std::size_t prev = 0;
        for (double v : values) {
            const auto s = encode_state(g(rng), 4, v, p);
            const auto x = s.dense();
            CHECK(std::count(x.begin(), x.end(), 1.0) == 2);
            CHECK(std::count(x.begin(), x.end(), 0.0) == static_cast<long>(x.size()) - 2);
            const auto k = bin_of(v, p);
            CHECK(k >= prev);
            CHECK(k < p.bins());
            prev = k;
        }
    }
}
