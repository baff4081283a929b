#pragma once

// Boundary values of functions on the unit circle, sampled on the offset grid
// theta_j = 2*pi*(j + 1/2)/M, M = 2^m.

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace hsat {

using cplx = std::complex<double>;

inline constexpr int kMinGridExp = 3;
inline constexpr int kMaxGridExp = 24;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Throws ConfigError unless m is in [kMinGridExp, kMaxGridExp].
void check_grid_exponent(int m);

inline std::size_t grid_size(int m) { return std::size_t{1} << m; }

/// Node angle theta_j in (0, 2*pi).
inline double node_angle(int m, std::size_t j) {
    return kTwoPi * (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size(m));
}

/// Angle reduced to [-pi, pi).
double wrap_angle(double theta);

/// Arc-length distance between two points of the circle, in [0, pi].
double circle_distance(double a, double b);

/// Sum with a fixed pairwise reduction tree.
double pairwise_sum(std::span<const double> values);
cplx pairwise_sum(std::span<const cplx> values);

/// Thread budget from HANKEL_SATURATE_THREADS (default: hardware concurrency).
unsigned thread_budget();

class GridFunction {
public:
    GridFunction(int m, std::vector<cplx> samples);

    static GridFunction from_real(int m, std::span<const double> values);
    static GridFunction sample(int m, const std::function<cplx(double)>& f);
    static GridFunction constant(int m, cplx value);

    int exponent() const noexcept { return m_; }
    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const cplx> samples() const noexcept { return samples_; }
    cplx operator[](std::size_t j) const { return samples_[j]; }
    double angle(std::size_t j) const { return node_angle(m_, j); }

    /// Largest imaginary part relative to max(1, sup |samples|) is at most tol.
    bool is_real(double tol = 1e-12) const;
    std::vector<double> real_part() const;
    std::vector<double> modulus() const;
    double sup_modulus() const;

private:
    int m_;
    std::vector<cplx> samples_;
};

/// Discrete Fourier coefficients on the offset grid, indexed n in [-M/2, M/2).
class FourierCoefficients {
public:
    FourierCoefficients(int m, std::vector<cplx> by_index);

    int exponent() const noexcept { return m_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    long min_index() const noexcept { return -static_cast<long>(coeffs_.size() / 2); }
    long max_index() const noexcept { return static_cast<long>(coeffs_.size() / 2) - 1; }
    cplx operator()(long n) const { return coeffs_[static_cast<std::size_t>(n - min_index())]; }
    cplx& operator()(long n) { return coeffs_[static_cast<std::size_t>(n - min_index())]; }
    /// Storage ordered from n = -M/2 upward.
    std::span<const cplx> data() const noexcept { return coeffs_; }

private:
    int m_;
    std::vector<cplx> coeffs_;
};

/// coeffs_n = (1/M) sum_j samples_j exp(-i n theta_j).
FourierCoefficients transform(const GridFunction& g);
GridFunction inverse(const FourierCoefficients& c);

/// Harmonic conjugate via the multiplier -i sgn(n); mean and the n = -M/2
/// mode are annihilated. Throws DomainError on non-real input.
GridFunction conjugate_function(const GridFunction& u);
std::vector<double> conjugate_function(int m, std::span<const double> u);

/// Orthogonal projection keeping frequencies n >= 0 (analytic) or n <= 0.
GridFunction project_analytic(const GridFunction& g);
GridFunction project_coanalytic(const GridFunction& g);

struct NormBundle {
    int m = 0;
    double l1 = 0.0;
    double l2 = 0.0;
    double sup = 0.0;
    double tail_energy = 0.0;  ///< sum over |n| > M/4 of |coeffs_n|^2
};

NormBundle norms(const GridFunction& g);

/// Relative energy carried by frequencies n < 0 (strict) or n <= 0.
double negative_frequency_fraction(const FourierCoefficients& c);
double nonpositive_frequency_fraction(const FourierCoefficients& c);

}  // namespace hsat
