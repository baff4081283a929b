#include "hsat/level_sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsat/errors.hpp"

namespace hsat {

bool Arc::contains_node(std::size_t j) const {
    const std::size_t M = grid_size(m);
    return (j + M - start) % M < length;
}

bool Arc::contains(double angle, std::size_t clearance) const {
    if (full_circle()) return true;
    if (length < 2 * clearance + 1) return false;
    const double h = kTwoPi / static_cast<double>(grid_size(m));
    double d = std::fmod(angle - start_angle(), kTwoPi);
    if (d < 0.0) d += kTwoPi;
    const double lo = static_cast<double>(clearance) * h;
    const double hi = static_cast<double>(length - 1 - clearance) * h;
    return d >= lo - 1e-12 && d <= hi + 1e-12;
}

std::vector<Arc> runs_of(const std::vector<bool>& mark, int m) {
    const std::size_t M = grid_size(m);
    if (mark.size() != M) throw ConfigError("runs_of: mask size does not match grid");
    std::vector<Arc> out;
    auto first_unmarked = std::find(mark.begin(), mark.end(), false);
    if (first_unmarked == mark.end()) {
        out.push_back({m, 0, M});
        return out;
    }
    const auto p0 = static_cast<std::size_t>(first_unmarked - mark.begin());
    std::size_t i = 0;
    while (i < M) {
        const std::size_t j = (p0 + i) % M;
        if (!mark[j]) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        while (i + len < M && mark[(p0 + i + len) % M]) ++len;
        out.push_back({m, j, len});
        i += len;
    }
    std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
    return out;
}

std::vector<Arc> LevelSets::interior_plus(std::size_t min_nodes) const {
    std::vector<Arc> r;
    std::copy_if(plus_arcs.begin(), plus_arcs.end(), std::back_inserter(r),
                 [&](const Arc& a) { return a.length >= min_nodes; });
    return r;
}

std::vector<Arc> LevelSets::interior_minus(std::size_t min_nodes) const {
    std::vector<Arc> r;
    std::copy_if(minus_arcs.begin(), minus_arcs.end(), std::back_inserter(r),
                 [&](const Arc& a) { return a.length >= min_nodes; });
    return r;
}

LevelSets level_sets_log(int m, std::span<const double> log_w, double delta, double tolerance) {
    check_grid_exponent(m);
    const std::size_t M = grid_size(m);
    if (log_w.size() != M) throw ConfigError("level_sets: sample count does not match grid");
    if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("level must lie in [0, 1]");
    if (!(tolerance >= 0.0 && tolerance < 1.0)) throw ConfigError("level tolerance must lie in [0, 1)");
    LevelSets L;
    L.m = m;
    L.delta = delta;
    L.tolerance = tolerance;
    const double log_sup = *std::max_element(log_w.begin(), log_w.end());
    L.sup = std::exp(log_sup);
    L.threshold = L.sup * delta * (1.0 - tolerance);
    L.plus.assign(M, true);
    if (delta > 0.0) {
        const double log_thr = log_sup + std::log(delta) + std::log1p(-tolerance);
        for (std::size_t j = 0; j < M; ++j) L.plus[j] = log_w[j] >= log_thr;
    }
    std::vector<bool> minus(M);
    std::size_t np = 0;
    for (std::size_t j = 0; j < M; ++j) {
        minus[j] = !L.plus[j];
        np += L.plus[j] ? 1 : 0;
    }
    L.plus_arcs = runs_of(L.plus, m);
    L.minus_arcs = np == M ? std::vector<Arc>{} : runs_of(minus, m);
    if (np == 0) L.plus_arcs.clear();
    L.plus_measure = static_cast<double>(np) / static_cast<double>(M);
    L.minus_measure = 1.0 - L.plus_measure;
    return L;
}

LevelSets level_sets(const GridFunction& w, double delta, double tolerance) {
    std::vector<double> lw(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) lw[j] = std::log(std::abs(w[j]));
    return level_sets_log(w.exponent(), lw, delta, tolerance);
}

}  // namespace hsat
