#pragma once

// Hankel operators H_phi f = Pbar(conj(phi) f) and their truncated matrices
// Gamma_{j,k} = c_{j+k}, 0 <= j, k < N.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hsat/factorization.hpp"
#include "hsat/symbol.hpp"

namespace hsat {

struct HankelCoefficients {
    std::vector<cplx> c;  ///< c_0 .. c_{n_max}
    /// True when c is the complete sequence (zero beyond n_max), false when it
    /// was cut from a sampled symbol and larger truncations would need a finer grid.
    bool exact = false;
    int grid_exponent = 0;  ///< source grid, 0 for exact sequences
    double leakage = 0.0;  ///< relative energy of the symbol at n < 0
    double tail_energy = 0.0;
    std::vector<std::string> warnings;

    std::size_t n_max() const noexcept { return c.empty() ? 0 : c.size() - 1; }
    /// Largest truncation size the coefficients support.
    std::size_t max_truncation() const;
};

inline constexpr double kLeakageWarn = 1e-6;

HankelCoefficients hankel_coefficients(const GridFunction& phi, std::size_t n_max);
/// n_max = M/2 - 1.
HankelCoefficients hankel_coefficients(const GridFunction& phi);
/// Complete finitely supported sequence.
HankelCoefficients hankel_coefficients(std::vector<cplx> c);

/// N x N truncation with O(N log N) products via a circular embedding of
/// length 2N.
class HankelMatrix {
public:
    HankelMatrix(const HankelCoefficients& c, std::size_t n);

    std::size_t size() const noexcept { return n_; }
    /// y = Gamma x
    void apply(std::span<const cplx> x, std::span<cplx> y) const;
    /// y = Gamma^* x (Gamma is symmetric, so Gamma^* = conj(Gamma)).
    void apply_adjoint(std::span<const cplx> x, std::span<cplx> y) const;
    Eigen::MatrixXcd dense() const;

private:
    std::size_t n_;
    std::vector<cplx> coeffs_;  ///< c_0 .. c_{2N-2}, zero-filled
    std::vector<cplx> kernel_hat_;  ///< FFT of coeffs_ padded to 2N
};

enum class IterationStatus { converged, value_stagnated, iteration_cap };

std::string to_string(IterationStatus s);

struct IterationConfig {
    double residual_tol = 1e-10;  ///< ||Gamma^*Gamma u - s^2 u|| <= tol * s^2
    std::size_t max_matvecs = 6000;
    std::size_t krylov_dim = 64;
    std::size_t keep = 24;
};

struct SingularPair {
    double value = 0.0;
    std::vector<cplx> right;  ///< unit right singular vector of Gamma
    double residual = 0.0;  ///< relative Rayleigh residual
    std::size_t matvecs = 0;
    IterationStatus status = IterationStatus::iteration_cap;
};

/// Largest singular value of Gamma via thick-restart Lanczos on Gamma^*Gamma
/// with full reorthogonalization.
SingularPair top_singular_pair(const HankelMatrix& g, std::span<const cplx> start, const IterationConfig& cfg = {});

struct NormConfig {
    double tol_rel = 1e-4;
    std::size_t n_min = 2;
    std::size_t n_max = 8192;
    std::uint64_t seed = 0;
    IterationConfig iteration;
};

struct SizeDiagnostics {
    std::size_t n = 0;
    double value = 0.0;
    double residual = 0.0;
    std::size_t matvecs = 0;
    IterationStatus status = IterationStatus::iteration_cap;
};

struct NormEstimate {
    std::vector<std::size_t> sizes;
    std::vector<double> values;
    std::vector<double> residuals;
    std::vector<SizeDiagnostics> diagnostics;
    bool converged = false;  ///< relative change between the last two sizes < tol_rel
    bool undecided = false;  ///< some size hit the iteration cap
    /// Coefficients a_k of g = sum a_k z^k with ||H_phi g||_2 = final value.
    std::vector<cplx> witness;
    std::vector<std::string> warnings;

    double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

NormEstimate hankel_norm(const HankelCoefficients& c, const NormConfig& cfg = {});

/// Pbar(conj(phi) g); frequency 0 is retained. Optional warning when g has
/// negative-frequency energy above 1e-8.
GridFunction apply_hankel(const GridFunction& phi, const GridFunction& g,
                          std::vector<std::string>* warnings = nullptr);

/// sum_k a_k z^k on the grid.
GridFunction analytic_from_coefficients(int m, std::span<const cplx> a);

/// Inner product mean(f * conj(g)) on the grid.
cplx pairing(const GridFunction& f, const GridFunction& g);

struct H1Witness {
    GridFunction f;
    double l1 = 0.0;
    cplx pairing;  ///< <f, phi>
    double expected_pairing = 0.0;  ///< ||H_phi g||_2^2 / ||phi||_inf
};

/// f = g * conj(H_phi g) / ||phi||_inf.
H1Witness h1_witness(const GridFunction& phi, const GridFunction& g);

enum class GapClass { constant_modulus_extremal, strict_interior, maximal_evidence, undecided };

std::string to_string(GapClass c);

struct GapConfig {
    int grid_exponent = 16;
    NormConfig norm;
    double tol_gap = 1e-6;
    double shrink_factor = 0.7;
};

struct GapReport {
    double l2 = 0.0;
    double sup = 0.0;
    NormEstimate norm_est;
    double minimality_gap = 0.0;
    double maximality_gap = 0.0;
    std::vector<double> maximality_gaps;  ///< per truncation size
    GapClass classification = GapClass::undecided;
    double leakage = 0.0;
    std::vector<std::string> warnings;
};

GapReport gap_report(const SymbolSpec& spec, const GapConfig& cfg = {});
GapReport gap_report(const GridFunction& phi, const GapConfig& cfg = {});

}  // namespace hsat
