#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <random>

#include "hsat/errors.hpp"
#include "hsat/symbol.hpp"

using namespace hsat;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> random_trig(int m, int K, unsigned seed, std::vector<double>* conj = nullptr) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const std::size_t M = grid_size(m);
    std::vector<double> a(K + 1), b(K + 1);
    for (int k = 0; k <= K; ++k) {
        a[k] = U(rng);
        b[k] = U(rng);
    }
    std::vector<double> u(M, a[0]);
    if (conj) conj->assign(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        const double t = node_angle(m, j);
        for (int k = 1; k <= K; ++k) {
            u[j] += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
            if (conj) (*conj)[j] += a[k] * std::sin(k * t) - b[k] * std::cos(k * t);
        }
    }
    return u;
}

}  // namespace

TEST(Grid, ExponentBounds) {
    EXPECT_THROW(check_grid_exponent(2), ConfigError);
    EXPECT_THROW(check_grid_exponent(25), ConfigError);
    EXPECT_NO_THROW(check_grid_exponent(3));
    EXPECT_NO_THROW(check_grid_exponent(24));
    EXPECT_THROW(GridFunction::constant(2, 1.0), ConfigError);
}

TEST(Grid, OffsetNodes) {
    EXPECT_DOUBLE_EQ(node_angle(3, 0), pi / 8);
    EXPECT_DOUBLE_EQ(node_angle(3, 7), 15 * pi / 8);
}

TEST(Grid, RejectsNonFiniteSamples) {
    std::vector<cplx> s(8, 1.0);
    s[3] = {std::nan(""), 0.0};
    EXPECT_THROW(GridFunction(3, s), DomainError);
    EXPECT_THROW(GridFunction(3, std::vector<cplx>(7)), ConfigError);
}

TEST(Transform, Monomial) {
    for (int k : {-5, 0, 1, 7}) {
        auto g = GridFunction::sample(6, [k](double t) { return std::polar(1.0, k * t); });
        auto c = transform(g);
        for (long n = c.min_index(); n <= c.max_index(); ++n) {
            EXPECT_NEAR(std::abs(c(n) - (n == k ? 1.0 : 0.0)), 0.0, 1e-13) << "k=" << k << " n=" << n;
        }
    }
}

TEST(Transform, RoundTrip) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    for (int m : {3, 8, 12}) {
        std::vector<cplx> s(grid_size(m));
        for (auto& v : s) v = {N(rng), N(rng)};
        GridFunction g(m, s);
        auto back = inverse(transform(g));
        for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(std::abs(back[j] - g[j]), 0.0, 1e-12);
    }
}

TEST(Transform, Parseval) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    std::vector<cplx> s(1024);
    for (auto& v : s) v = {N(rng), N(rng)};
    GridFunction g(10, s);
    double mean_sq = 0.0;
    for (const auto& v : s) mean_sq += std::norm(v);
    mean_sq /= 1024.0;
    EXPECT_NEAR(norms(g).l2, std::sqrt(mean_sq), 1e-12);
}

TEST(Transform, Deterministic) {
    auto g = GridFunction::sample(12, [](double t) { return std::exp(cplx{std::cos(t), std::sin(3 * t)}); });
    auto a = transform(g);
    auto b = transform(g);
    for (long n = a.min_index(); n <= a.max_index(); ++n) {
        EXPECT_EQ(a(n).real(), b(n).real());
        EXPECT_EQ(a(n).imag(), b(n).imag());
    }
}

TEST(Conjugate, CosineToSine) {
    for (int k : {1, 2, 9}) {
        auto u = GridFunction::sample(8, [k](double t) { return std::cos(k * t); });
        auto v = conjugate_function(u);
        for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(v[j].real(), std::sin(k * u.angle(j)), 1e-13);
    }
}

TEST(Conjugate, ConstantAnnihilated) {
    auto v = conjugate_function(GridFunction::constant(5, 3.5));
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(std::abs(v[j]), 0.0, 1e-15);
}

TEST(Conjugate, RejectsComplexInput) {
    auto g = GridFunction::sample(5, [](double t) { return std::polar(1.0, t); });
    EXPECT_THROW(conjugate_function(g), DomainError);
}

// Arc indicator against a quadrature of the conjugate kernel at nodes outside
// the arc, and against the closed form log|sin((t-a)/2) / sin((t-b)/2)| / pi.
TEST(Conjugate, ArcIndicatorMatchesQuadrature) {
    const double alpha = 0.4, beta = 1.9;
    const int m = 14;
    auto chi = GridFunction::sample(m, [&](double t) { return (t > alpha && t < beta) ? 1.0 : 0.0; });
    auto v = conjugate_function(chi);
    using boost::math::quadrature::gauss_kronrod;
    for (double t : {2.6, 3.5, 5.0, 6.0}) {
        const auto j = static_cast<std::size_t>(std::floor(t / (2 * pi) * grid_size(m)));
        const double tj = chi.angle(j);
        auto kern = [tj](double th) { return std::cos((tj - th) / 2) / std::sin((tj - th) / 2); };
        const double oracle = gauss_kronrod<double, 61>::integrate(kern, alpha, beta, 10, 1e-13) / (2 * pi);
        const double closed = std::log(std::abs(std::sin((tj - alpha) / 2) / std::sin((tj - beta) / 2))) / pi;
        EXPECT_NEAR(oracle, closed, 1e-12);
        EXPECT_NEAR(v[j].real(), oracle, 2e-4) << "t=" << tj;
    }
}

TEST(Conjugate, BandLimitedRandom) {
    std::vector<double> expected;
    auto u = random_trig(9, 40, 3, &expected);
    auto v = conjugate_function(9, u);
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(v[j], expected[j], 1e-12);
}

// conj(conj(u)) = -(u - mean) for band-limited u
TEST(Conjugate, InvolutionProperty) {
    for (unsigned seed = 0; seed < 5; ++seed) {
        auto u = random_trig(8, 30, seed);
        double mean = 0.0;
        for (double x : u) mean += x;
        mean /= static_cast<double>(u.size());
        auto w = conjugate_function(8, conjugate_function(8, u));
        for (std::size_t j = 0; j < u.size(); ++j) EXPECT_NEAR(w[j], -(u[j] - mean), 1e-12);
    }
}

TEST(Projection, SplitsFrequencies) {
    auto g = GridFunction::sample(7, [](double t) {
        return 2.0 + std::polar(3.0, 2 * t) + std::polar(-1.5, -5 * t);
    });
    auto p = project_analytic(g);
    auto q = project_coanalytic(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double t = g.angle(j);
        EXPECT_NEAR(std::abs(p[j] - (2.0 + std::polar(3.0, 2 * t))), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(q[j] - (2.0 + std::polar(-1.5, -5 * t))), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(p[j] + q[j] - g[j] - 2.0), 0.0, 1e-13);
    }
    auto pp = project_analytic(p);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(std::abs(pp[j] - p[j]), 0.0, 1e-13);
}

TEST(Norms, Bundle) {
    auto g = GridFunction::sample(10, [](double t) { return 1.0 + std::polar(1.0, t); });
    auto b = norms(g);
    EXPECT_NEAR(b.l2, std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(b.sup, 2.0, 1e-5);
    EXPECT_NEAR(b.l1, 4.0 / pi, 1e-6);
    EXPECT_NEAR(b.tail_energy, 0.0, 1e-25);
    EXPECT_LE(b.l2, b.sup);
}

TEST(Norms, FrequencyFractions) {
    auto g = GridFunction::sample(6, [](double t) { return 1.0 + std::polar(1.0, -t); });
    auto c = transform(g);
    EXPECT_NEAR(negative_frequency_fraction(c), 0.5, 1e-14);
    EXPECT_NEAR(nonpositive_frequency_fraction(c), 1.0, 1e-14);
}

TEST(Angles, WrapAndDistance) {
    EXPECT_NEAR(wrap_angle(3 * pi), -pi, 1e-15);
    EXPECT_NEAR(wrap_angle(-0.5), -0.5, 1e-15);
    EXPECT_NEAR(circle_distance(0.1, 2 * pi - 0.1), 0.2, 1e-14);
}

TEST(Threads, EnvironmentCap) {
    setenv("HANKEL_SATURATE_THREADS", "1", 1);
    EXPECT_EQ(thread_budget(), 1u);
    unsetenv("HANKEL_SATURATE_THREADS");
    EXPECT_GE(thread_budget(), 1u);
}
