#pragma once

// Saturation of a symbol phi = c I Phi: the hypothesis checkers that certify
// ||H_phi|| = ||phi||_inf, the improver f in H^inf_0 with ||phi - conj(f)|| <
// ||phi||_inf, and the combined verdict.

#include <optional>
#include <string>
#include <vector>

#include "hsat/factorization.hpp"
#include "hsat/hankel.hpp"
#include "hsat/level_sets.hpp"

namespace hsat {

enum class Verdict { saturated, not_saturated, undecided };
enum class Basis { constant_modulus, continuous, badapp, outer, improver, none };

std::string to_string(Verdict v);
std::string to_string(Basis b);

struct ContinuousCheck {
    std::vector<double> argmax;  ///< node angles in L+(1)
    std::vector<double> spectrum;
    double separation = 0.0;  ///< dist(sigma(I), argmax); +inf when sigma(I) is empty
    double resolution = 0.0;  ///< 2 pi / M
    std::optional<double> witness;  ///< point of sigma(I) on the argmax set
    bool saturated = false;
};

struct BadappStep {
    double delta = 0.0;
    bool pass = false;
    std::optional<double> witness;  ///< point of sigma(I) inside a plus-arc
    std::size_t interior_arcs = 0;
};

struct BadappTranscript {
    int m = 0;
    std::vector<BadappStep> steps;
    bool pass = false;  ///< every sampled delta passed
};

/// Gamma(theta_n) = {|theta - base| <= theta_n}.
struct ArcFamily {
    double base = 0.0;
    std::vector<double> thetas;

    /// theta_n = ratio^n, n = 1..count.
    static ArcFamily geometric(double base, double ratio, int count);
    void validate() const;
};

struct OuterStep {
    std::size_t n = 0;
    double theta = 0.0;
    std::size_t nodes = 0;
    double minus_fraction = 0.0;  ///< |Gamma cap L-(1)| / |Gamma|
    double plus_fraction = 0.0;
    double minus_sup = 0.0;  ///< sup |phi| over Gamma cap L-(1); 0 when empty
};

struct OuterTranscript {
    int m = 0;
    double a = 0.0, b = 0.0;  ///< required fractions
    std::vector<OuterStep> steps;
    double measured_a = 0.0, measured_b = 0.0;  ///< minima over the steps
    bool sup_near_base = false;  ///< L+(1) has an interior arc inside Gamma(theta_1)
    bool limit_holds = false;  ///< minus_sup nonincreasing and finally <= kOuterLimitRatio * sup
    bool fractions_hold = false;
    bool pass = false;
    std::vector<std::string> notes;
};

inline constexpr double kOuterLimitRatio = 0.1;
inline constexpr std::size_t kOuterMinNodes = 16;

struct ImproverConfig {
    int grid_exponent = 14;
    double margin_target = 0.0;  ///< absolute; success needs gain >= margin_target
    double apical_margin = 0.05;
    bool refine = true;  ///< re-verify at m + 1
};

struct ImproverResult {
    bool success = false;
    int m = 0;
    double delta = 0.0;  ///< requested level
    double delta_used = 0.0;  ///< level of the construction that achieved the best gain
    double epsilon_used = 0.0;
    double apical_epsilon = 0.0;
    double sup = 0.0;  ///< grid sup |phi|
    double achieved_sup = 0.0;  ///< grid sup |phi - conj(f)|
    double gain = 0.0;
    double sup_vtilde = 0.0;
    double nonpositive_energy = 0.0;  ///< relative energy of f at n <= 0
    std::optional<double> refined_gain;
    std::vector<Arc> gamma;
    GridFunction f = GridFunction::constant(kMinGridExp, 0.0);
    std::vector<std::string> diagnostics;
};

struct SaturationConfig {
    int grid_exponent = 14;
    std::vector<double> delta_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    std::optional<ArcFamily> arcs;
    double outer_a = 0.25;
    double outer_b = 0.25;
    int outer_grid_exponent = 18;
    std::vector<double> improver_deltas = {0.5, 0.75, 0.9};
    double improver_margin_rel = 1e-6;  ///< margin_target = rel * sup
    bool include_gaps = false;
    GapConfig gap;
};

struct SaturationVerdict {
    Verdict verdict = Verdict::undecided;
    Basis basis = Basis::none;
    int m = 0;
    double sup = 0.0;
    double level_tolerance = kExactLevelTol;
    std::optional<ContinuousCheck> continuous;
    std::optional<BadappTranscript> badapp;
    std::optional<OuterTranscript> outer;
    std::optional<ImproverResult> improver;
    std::optional<GapReport> gaps;
    std::vector<std::string> transcript;
};

double level_tolerance(const SymbolSpec& spec);

/// Requires a continuous, nonconstant outer modulus. Saturated iff sigma(I)
/// meets the argmax set within one grid spacing; otherwise the verdict is
/// undecided and carries the separation (a not-saturated candidate).
SaturationVerdict classify_continuous(const SymbolSpec& spec, int m = 14);

BadappTranscript badapp_hypothesis(const SymbolSpec& spec, const std::vector<double>& deltas, int m = 14);

/// Throws ResolutionError when the smallest arc holds fewer than kOuterMinNodes nodes.
OuterTranscript outer_hypothesis(const SymbolSpec& spec, const ArcFamily& arcs, double a, double b, int m = 16);

/// Modulus 1 on 2^{-2k-1} <= |theta| <= 2^{-2k}, 2^{-k} on the gaps between,
/// 1/2 for |theta| > 1; `levels` pairs of arcs, the innermost remainder at 2^{-levels-1}.
SymbolSpec dyadic_jump_symbol(int levels = 12);

/// f = eps z g1 g2 with g1 = exp(-nu~ + i nu), g2 = exp(-u - i u~). Throws
/// PreconditionError when the hypotheses fail at level delta.
ImproverResult construct_improver(const SymbolSpec& spec, double delta, const ImproverConfig& cfg = {});

SaturationVerdict saturation_verdict(const SymbolSpec& spec, const SaturationConfig& cfg = {});

}  // namespace hsat
