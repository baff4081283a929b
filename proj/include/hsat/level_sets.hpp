#pragma once

// Super- and sub-level sets of |w| on the grid, with their decomposition into
// maximal runs of consecutive nodes (arcs, wrap-around allowed).

#include <cstddef>
#include <span>
#include <vector>

#include "hsat/symbol.hpp"

namespace hsat {

inline constexpr double kExactLevelTol = 1e-9;
inline constexpr double kSampledLevelTol = 1e-4;

/// Run of `length` consecutive nodes starting at node `start` (mod M).
struct Arc {
    int m = 0;
    std::size_t start = 0;
    std::size_t length = 0;

    bool full_circle() const { return length == grid_size(m); }
    double start_angle() const { return node_angle(m, start); }
    double end_angle() const { return node_angle(m, (start + length - 1) % grid_size(m)); }
    double measure() const { return static_cast<double>(length) / static_cast<double>(grid_size(m)); }
    bool contains_node(std::size_t j) const;
    /// Angle lies between the first and last node with at least `clearance`
    /// node spacings to spare on both sides.
    bool contains(double angle, std::size_t clearance = 0) const;
};

std::vector<Arc> runs_of(const std::vector<bool>& mark, int m);

struct LevelSets {
    int m = 0;
    double delta = 0.0;
    double tolerance = kExactLevelTol;
    double sup = 0.0;
    double threshold = 0.0;  ///< sup * delta * (1 - tolerance)
    std::vector<bool> plus;  ///< |w| >= threshold; the minus set is the complement
    std::vector<Arc> plus_arcs;
    std::vector<Arc> minus_arcs;
    double plus_measure = 0.0;
    double minus_measure = 0.0;

    bool in_plus(std::size_t j) const { return plus[j]; }
    bool in_minus(std::size_t j) const { return !plus[j]; }
    /// Arcs with at least `min_nodes` nodes.
    std::vector<Arc> interior_plus(std::size_t min_nodes = 3) const;
    std::vector<Arc> interior_minus(std::size_t min_nodes = 3) const;
};

/// L+(delta) = {|w| >= sup |w| * delta * (1 - tolerance)} and its complement.
LevelSets level_sets(const GridFunction& w, double delta, double tolerance = kExactLevelTol);

/// Same from sampled log|w| (avoids exp underflow for floored weights).
LevelSets level_sets_log(int m, std::span<const double> log_w, double delta, double tolerance = kExactLevelTol);

}  // namespace hsat
