#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hsat/errors.hpp"
#include "hsat/level_sets.hpp"

using namespace hsat;

namespace {

constexpr double pi = std::numbers::pi;

GridFunction random_positive(int m, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.01, 3.0);
    std::vector<double> v(grid_size(m));
    for (auto& x : v) x = U(rng);
    return GridFunction::from_real(m, v);
}

}  // namespace

TEST(LevelSets, OnePlusZHalfLevelIsArcAroundZero) {
    const int m = 12;
    auto w = GridFunction::sample(m, [](double t) { return std::abs(1.0 + std::polar(1.0, t)); });
    auto L = level_sets(w, 0.5);
    ASSERT_EQ(L.plus_arcs.size(), 1u);
    const auto& a = L.plus_arcs[0];
    const double h = kTwoPi / grid_size(m);
    // closed form: 2|cos(t/2)| >= 1  <=>  |t| <= 2pi/3
    EXPECT_LE(circle_distance(a.start_angle(), -2.0 * pi / 3.0), 2.0 * h);
    EXPECT_LE(circle_distance(a.end_angle(), 2.0 * pi / 3.0), 2.0 * h);
    EXPECT_NEAR(L.plus_measure, 2.0 / 3.0, 2.0 / grid_size(m));
    ASSERT_EQ(L.minus_arcs.size(), 1u);
    EXPECT_TRUE(L.minus_arcs[0].contains(pi, 2));
}

TEST(LevelSets, PartitionAndMeasures) {
    auto w = random_positive(9, 3);
    for (double d : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        auto L = level_sets(w, d);
        std::size_t np = 0, covered = 0;
        for (std::size_t j = 0; j < w.size(); ++j) np += L.in_plus(j);
        for (const auto& a : L.plus_arcs) covered += a.length;
        for (const auto& a : L.minus_arcs) covered += a.length;
        EXPECT_EQ(covered, w.size());
        EXPECT_DOUBLE_EQ(L.plus_measure + L.minus_measure, 1.0);
        EXPECT_DOUBLE_EQ(L.plus_measure, static_cast<double>(np) / w.size());
        for (const auto& a : L.plus_arcs)
            for (std::size_t k = 0; k < a.length; ++k) EXPECT_TRUE(L.in_plus((a.start + k) % w.size()));
    }
}

TEST(LevelSets, MonotoneInLevel) {
    for (unsigned seed = 0; seed < 5; ++seed) {
        auto w = random_positive(8, seed);
        auto lo = level_sets(w, 0.3), hi = level_sets(w, 0.7);
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (hi.in_plus(j)) EXPECT_TRUE(lo.in_plus(j));
        }
        EXPECT_GE(lo.plus_measure, hi.plus_measure);
    }
}

TEST(LevelSets, ZeroLevelAndConstant) {
    auto w = random_positive(6, 1);
    EXPECT_EQ(level_sets(w, 0.0).plus_measure, 1.0);
    auto c = level_sets(GridFunction::constant(6, 2.0), 1.0);
    EXPECT_EQ(c.plus_measure, 1.0);
    ASSERT_EQ(c.plus_arcs.size(), 1u);
    EXPECT_TRUE(c.plus_arcs[0].full_circle());
    EXPECT_TRUE(c.minus_arcs.empty());
}

TEST(LevelSets, SupAttainedAtLevelOne) {
    auto w = random_positive(7, 11);
    auto L = level_sets(w, 1.0);
    EXPECT_GE(L.plus_measure, 1.0 / w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (L.in_plus(j)) EXPECT_NEAR(std::abs(w[j]), L.sup, 1e-8 * L.sup);
    }
}

TEST(LevelSets, RejectsBadLevel) {
    auto w = random_positive(5, 0);
    EXPECT_THROW(level_sets(w, 1.5), ConfigError);
    EXPECT_THROW(level_sets(w, -0.1), ConfigError);
}

TEST(Runs, WrapAround) {
    const int m = 4;
    std::vector<bool> mark(16, false);
    mark[0] = mark[1] = mark[15] = true;
    mark[7] = true;
    auto r = runs_of(mark, m);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].start, 7u);
    EXPECT_EQ(r[0].length, 1u);
    EXPECT_EQ(r[1].start, 15u);
    EXPECT_EQ(r[1].length, 3u);
    EXPECT_TRUE(r[1].contains_node(0));
    EXPECT_FALSE(r[1].contains_node(2));
}

TEST(Runs, ClearanceContainment) {
    const Arc a{6, 10, 9};
    EXPECT_TRUE(a.contains(node_angle(6, 14), 4));
    EXPECT_FALSE(a.contains(node_angle(6, 11), 2));
    EXPECT_TRUE(a.contains(node_angle(6, 12), 2));
    EXPECT_FALSE(a.contains(node_angle(6, 30)));
}
