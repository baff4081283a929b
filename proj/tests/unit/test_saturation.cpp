#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hsat/errors.hpp"
#include "hsat/saturation.hpp"

using namespace hsat;

namespace {

constexpr double pi = std::numbers::pi;

SymbolSpec linear(double sign, bool atom) {
    SymbolSpec s;
    if (atom) s.singular.atoms = {{0.0, 1.0}};
    s.outer = OuterSpec(FormulaModulus{{PolyModulus{{1.0, sign}}}});
    return s;
}

SymbolSpec monomial(int d, cplx c) {
    SymbolSpec s;
    s.constant = c;
    s.blaschke.zeros = {{cplx{0.0}, d}};
    return s;
}

// cubic with roots outside the closed disk, so the outer factor is the polynomial itself
std::vector<cplx> random_outer_poly(unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> R(1.2, 3.0), T(-pi, pi);
    std::vector<cplx> c = {1.0};
    for (int k = 0; k < 3; ++k) {
        const cplx r = std::polar(R(rng), T(rng));
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= c[i] / r;
        }
        c = next;
    }
    return c;
}

SymbolSpec poly_spec(const std::vector<cplx>& c) {
    SymbolSpec s;
    s.outer = OuterSpec(FormulaModulus{{PolyModulus{c}}});
    return s;
}

// grid sup |phi - conj(f)| and energy of f at n <= 0, recomputed from scratch
std::pair<double, double> reverify(const SymbolSpec& spec, const ImproverResult& r) {
    const auto phi = compose_symbol(spec, r.m);
    double s = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) s = std::max(s, std::abs(phi[j] - std::conj(r.f[j])));
    const auto c = transform(r.f);
    double lo = 0.0, all = 0.0;
    const int half = static_cast<int>(phi.size() / 2);
    for (int n = -half; n < half; ++n) {
        const double e = std::norm(c(n));
        all += e;
        if (n <= 0) lo += e;
    }
    return {s, lo / all};
}

}  // namespace

TEST(Continuous, AtomExampleSaturated) {
    auto v = classify_continuous(linear(1.0, true));
    EXPECT_EQ(v.verdict, Verdict::saturated);
    EXPECT_EQ(v.basis, Basis::continuous);
    ASSERT_TRUE(v.continuous->witness.has_value());
    EXPECT_NEAR(*v.continuous->witness, 0.0, 1e-12);
    EXPECT_LE(v.continuous->separation, v.continuous->resolution);
}

TEST(Continuous, OneMinusZAtomIsCandidate) {
    auto v = classify_continuous(linear(-1.0, true));
    EXPECT_EQ(v.verdict, Verdict::undecided);
    EXPECT_NEAR(v.continuous->separation, pi, 1e-3);
    EXPECT_FALSE(v.continuous->witness.has_value());
}

TEST(Continuous, NoInnerFactorIsCandidate) {
    auto v = classify_continuous(linear(1.0, false));
    EXPECT_EQ(v.verdict, Verdict::undecided);
    EXPECT_TRUE(std::isinf(v.continuous->separation));
}

TEST(Continuous, Preconditions) {
    EXPECT_THROW(classify_continuous(monomial(2, 1.0)), PreconditionError);
    EXPECT_THROW(classify_continuous(dyadic_jump_symbol()), PreconditionError);
}

TEST(Badapp, Examples) {
    const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    auto plus = badapp_hypothesis(linear(1.0, true), grid);
    EXPECT_TRUE(plus.pass);
    for (const auto& s : plus.steps) EXPECT_NEAR(*s.witness, 0.0, 1e-12);
    auto minus = badapp_hypothesis(linear(-1.0, true), grid);
    EXPECT_FALSE(minus.pass);
    for (const auto& s : minus.steps) EXPECT_FALSE(s.pass);  // |1 - z| vanishes at the atom
    SymbolSpec c;
    c.constant = 3.0;
    c.singular.atoms = {{0.0, 1.0}};
    EXPECT_TRUE(badapp_hypothesis(c, grid).pass);
}

TEST(OuterHypothesis, DyadicJumpPasses) {
    auto t = outer_hypothesis(dyadic_jump_symbol(), ArcFamily::geometric(0.0, 0.25, 5), 0.25, 0.25, 18);
    EXPECT_TRUE(t.pass);
    EXPECT_GE(t.measured_a, 0.25);
    EXPECT_GE(t.measured_b, 0.25);
    // piecewise definition: a = 1/3, b = 2/3 on every Gamma(4^-n)
    EXPECT_NEAR(t.steps.front().minus_fraction, 1.0 / 3.0, 0.01);
    EXPECT_NEAR(t.steps.front().plus_fraction, 2.0 / 3.0, 0.01);
    for (std::size_t i = 0; i < t.steps.size(); ++i) EXPECT_DOUBLE_EQ(t.steps[i].minus_sup, std::ldexp(1.0, -int(i) - 2));
}

TEST(OuterHypothesis, OnePlusZLimitFails) {
    auto t = outer_hypothesis(linear(1.0, false), ArcFamily::geometric(0.0, 0.5, 8), 0.25, 0.25, 16);
    EXPECT_FALSE(t.limit_holds);
    EXPECT_FALSE(t.pass);
    EXPECT_GT(t.steps.back().minus_sup, 1.99);
}

TEST(OuterHypothesis, ConstantModulusFailsA) {
    auto t = outer_hypothesis(monomial(1, 1.0), ArcFamily::geometric(0.0, 0.5, 4), 0.25, 0.25, 12);
    EXPECT_EQ(t.measured_a, 0.0);
    EXPECT_FALSE(t.pass);
}

TEST(OuterHypothesis, CoarseGridNamesRequiredExponent) {
    try {
        outer_hypothesis(dyadic_jump_symbol(), ArcFamily::geometric(0.0, 0.25, 8), 0.25, 0.25, 16);
        FAIL();
    } catch (const ResolutionError& e) {
        // 4^-8 needs 2 * theta / h >= 17
        const int need = e.required_grid_exponent();
        EXPECT_GE(2.0 * std::pow(0.25, 8) * std::ldexp(1.0, need) / kTwoPi, 16.0);
        EXPECT_LT(2.0 * std::pow(0.25, 8) * std::ldexp(1.0, need - 1) / kTwoPi, 17.0);
    }
}

TEST(OuterHypothesis, ArcFamilyValidation) {
    ArcFamily f;
    f.thetas = {0.5, 0.5};
    EXPECT_THROW(f.validate(), ConfigError);
    f.thetas = {4.0};
    EXPECT_THROW(f.validate(), ConfigError);
}

TEST(Improver, OneMinusZAtom) {
    const auto spec = linear(-1.0, true);
    auto r = construct_improver(spec, 0.5, {.grid_exponent = 14, .margin_target = 0.025});
    ASSERT_TRUE(r.success);
    EXPECT_LE(r.achieved_sup, 2.0 - 0.025);
    EXPECT_LE(r.nonpositive_energy, 1e-8);
    ASSERT_TRUE(r.refined_gain.has_value());
    EXPECT_LT(std::abs(*r.refined_gain - r.gain), 0.02);
    const auto [s, e] = reverify(spec, r);
    EXPECT_NEAR(s, r.achieved_sup, 1e-12);
    EXPECT_LE(e, 1e-8);
    ASSERT_EQ(r.gamma.size(), 1u);
    EXPECT_TRUE(r.gamma[0].contains(0.0, 2));
}

TEST(Improver, OnePlusZWithoutInner) {
    const auto spec = linear(1.0, false);
    auto r = construct_improver(spec, 0.5);
    ASSERT_TRUE(r.success);
    EXPECT_LT(r.achieved_sup, 2.0);
    EXPECT_TRUE(r.gamma[0].contains(pi, 2));
    EXPECT_NEAR(reverify(spec, r).first, r.achieved_sup, 1e-12);
}

TEST(Improver, PreconditionFailures) {
    EXPECT_THROW(construct_improver(linear(1.0, true), 0.5), PreconditionError);
    for (double d : {0.3, 0.5, 0.9}) EXPECT_THROW(construct_improver(monomial(3, 2.0), d), PreconditionError);
}

TEST(Verdict, Dispatch) {
    auto atom_case = saturation_verdict(linear(1.0, true));
    EXPECT_EQ(atom_case.verdict, Verdict::saturated);
    EXPECT_EQ(atom_case.basis, Basis::continuous);

    auto minus = saturation_verdict(linear(-1.0, true));
    EXPECT_EQ(minus.verdict, Verdict::not_saturated);
    EXPECT_EQ(minus.basis, Basis::improver);

    auto mono = saturation_verdict(monomial(3, cplx{0.0, 2.0}));
    EXPECT_EQ(mono.verdict, Verdict::saturated);
    EXPECT_EQ(mono.basis, Basis::constant_modulus);

    SaturationConfig cfg;
    cfg.arcs = ArcFamily::geometric(0.0, 0.25, 5);
    auto jump = saturation_verdict(dyadic_jump_symbol(), cfg);
    EXPECT_EQ(jump.verdict, Verdict::saturated);
    EXPECT_EQ(jump.basis, Basis::outer);
}

TEST(Verdict, RandomPolynomialsAreNotSaturated) {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const auto p = random_outer_poly(seed);
        const auto spec = poly_spec(p);
        auto v = saturation_verdict(spec);
        ASSERT_EQ(v.verdict, Verdict::not_saturated) << seed;
        const auto [s, e] = reverify(spec, *v.improver);
        EXPECT_LT(s, v.sup);
        EXPECT_LE(e, 1e-8);
        // finite-rank norm sits strictly below the sup
        EXPECT_LT(hankel_norm(hankel_coefficients(p)).final_value(), v.sup - 1e-6);
    }
}

TEST(Verdict, SaturatedNormsStayBelowSup) {
    SaturationConfig cfg;
    cfg.include_gaps = true;
    cfg.gap.grid_exponent = 14;
    cfg.gap.norm.n_max = 1024;
    auto v = saturation_verdict(linear(1.0, true), cfg);
    ASSERT_EQ(v.verdict, Verdict::saturated);
    ASSERT_TRUE(v.gaps.has_value());
    const auto& vals = v.gaps->norm_est.values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        EXPECT_LE(vals[i], v.gaps->sup + 1e-8);
        if (i > 0) EXPECT_LE(v.gaps->sup - vals[i], v.gaps->sup - vals[i - 1] + 1e-12);
    }
}

TEST(Verdict, RotationEquivariance) {
    const int m = 14;
    const double h = kTwoPi / grid_size(m);
    const int k = 37;
    const auto spec = linear(-1.0, true);
    auto a = construct_improver(spec, 0.5, {.grid_exponent = m});
    auto b = construct_improver(spec.rotated(k * h), 0.5, {.grid_exponent = m});
    EXPECT_NEAR(a.achieved_sup, b.achieved_sup, 1e-9);
    EXPECT_EQ((a.gamma[0].start + k) % grid_size(m), b.gamma[0].start);
    EXPECT_EQ(a.gamma[0].length, b.gamma[0].length);
    EXPECT_EQ(saturation_verdict(spec.rotated(k * h)).verdict, Verdict::not_saturated);
    EXPECT_EQ(saturation_verdict(linear(1.0, true).rotated(k * h)).verdict, Verdict::saturated);
    auto L0 = classify_continuous(linear(1.0, true).rotated(k * h));
    EXPECT_NEAR(*L0.continuous->witness, k * h, 1e-12);
}

TEST(Verdict, ScalingInvariance) {
    const auto spec = linear(-1.0, true);
    const cplx c = std::polar(2.5, 0.3);
    auto a = saturation_verdict(spec);
    auto b = saturation_verdict(spec.scaled(c));
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.basis, b.basis);
    EXPECT_NEAR(b.improver->achieved_sup, std::abs(c) * a.improver->achieved_sup, 1e-10);
    EXPECT_EQ(saturation_verdict(linear(1.0, true).scaled(c)).verdict, Verdict::saturated);
}

TEST(Verdict, ConstantModulusNeverImproved) {
    SymbolSpec constant;
    constant.constant = cplx{0.7, -0.2};
    for (const auto& spec : {constant, monomial(1, cplx{0.7, -0.2}), monomial(4, cplx{0.7, -0.2})}) {
        auto v = saturation_verdict(spec);
        EXPECT_NE(v.verdict, Verdict::not_saturated);
        EXPECT_FALSE(v.improver.has_value());
    }
}
