#include "hsat/hankel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "hsat/errors.hpp"
#include "rng.hpp"

namespace hsat {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

using Vec = Eigen::VectorXcd;

}  // namespace

std::size_t HankelCoefficients::max_truncation() const {
    if (exact) return std::numeric_limits<std::size_t>::max();
    return (n_max() + 2) / 2;
}

HankelCoefficients hankel_coefficients(const GridFunction& phi, std::size_t n_max) {
    const std::size_t M = phi.size();
    if (n_max > M / 2 - 1) {
        throw ConfigError("n_max " + std::to_string(n_max) + " exceeds M/2 - 1 = " + std::to_string(M / 2 - 1));
    }
    const auto coeffs = transform(phi);
    HankelCoefficients h;
    h.grid_exponent = phi.exponent();
    h.c.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) h.c[n] = coeffs(static_cast<long>(n));
    h.leakage = negative_frequency_fraction(coeffs);
    h.tail_energy = norms(phi).tail_energy;
    if (h.leakage > kLeakageWarn) {
        h.warnings.push_back("symbol has negative-frequency energy fraction " + std::to_string(h.leakage));
    }
    return h;
}

HankelCoefficients hankel_coefficients(const GridFunction& phi) {
    return hankel_coefficients(phi, phi.size() / 2 - 1);
}

HankelCoefficients hankel_coefficients(std::vector<cplx> c) {
    HankelCoefficients h;
    h.c = std::move(c);
    h.exact = true;
    return h;
}

// ---------------------------------------------------------------------------

HankelMatrix::HankelMatrix(const HankelCoefficients& c, std::size_t n) : n_(n) {
    if (n == 0) throw ConfigError("Hankel truncation size must be positive");
    if (n > c.max_truncation()) {
        throw ConfigError("truncation " + std::to_string(n) + " needs coefficients up to " +
                          std::to_string(2 * n - 2));
    }
    coeffs_.assign(2 * n - 1, cplx{});
    const std::size_t avail = std::min(c.c.size(), coeffs_.size());
    std::copy_n(c.c.begin(), avail, coeffs_.begin());
    kernel_hat_.assign(2 * n, cplx{});
    std::copy(coeffs_.begin(), coeffs_.end(), kernel_hat_.begin());
    detail::fft_forward(kernel_hat_);
}

void HankelMatrix::apply(std::span<const cplx> x, std::span<cplx> y) const {
    if (x.size() != n_ || y.size() != n_) throw ConfigError("Hankel matvec: size mismatch");
    const std::size_t L = 2 * n_;
    std::vector<cplx> work(L, cplx{});
    // y_j = sum_k c_{j+k} x_k = (c * reverse(x))_{j+N-1}
    for (std::size_t k = 0; k < n_; ++k) work[k] = x[n_ - 1 - k];
    detail::fft_forward(work);
    for (std::size_t i = 0; i < L; ++i) work[i] *= kernel_hat_[i];
    detail::fft_backward(work);
    const double inv = 1.0 / static_cast<double>(L);
    for (std::size_t j = 0; j < n_; ++j) y[j] = work[j + n_ - 1] * inv;
}

void HankelMatrix::apply_adjoint(std::span<const cplx> x, std::span<cplx> y) const {
    std::vector<cplx> xc(x.size());
    std::transform(x.begin(), x.end(), xc.begin(), [](const cplx& v) { return std::conj(v); });
    apply(xc, y);
    for (auto& v : y) v = std::conj(v);
}

Eigen::MatrixXcd HankelMatrix::dense() const {
    Eigen::MatrixXcd d(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t k = 0; k < n_; ++k) {
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = coeffs_[j + k];
        }
    }
    return d;
}

std::string to_string(IterationStatus s) {
    switch (s) {
        case IterationStatus::converged: return "converged";
        case IterationStatus::value_stagnated: return "value_stagnated";
        case IterationStatus::iteration_cap: return "iteration_cap";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

SingularPair top_singular_pair(const HankelMatrix& g, std::span<const cplx> start, const IterationConfig& cfg) {
    const auto N = static_cast<Eigen::Index>(g.size());
    if (start.size() != g.size()) throw ConfigError("start vector size does not match the matrix");
    if (cfg.krylov_dim < 2 || cfg.keep < 1 || cfg.keep >= cfg.krylov_dim) {
        throw ConfigError("Krylov dimension must exceed the number of kept vectors");
    }
    const Eigen::Index kmax = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.krylov_dim), N);
    const Eigen::Index keep = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.keep), kmax - 1);

    SingularPair out;
    std::vector<cplx> tmp(g.size());
    auto apply_normal = [&](const Vec& x) {
        Vec y(N);
        g.apply(std::span<const cplx>(x.data(), g.size()), tmp);
        g.apply_adjoint(tmp, std::span<cplx>(y.data(), g.size()));
        ++out.matvecs;
        return y;
    };

    Eigen::MatrixXcd V(N, kmax), W(N, kmax);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(kmax, kmax);
    Eigen::Index k = 0;

    Vec v = Eigen::Map<const Vec>(start.data(), N);
    if (v.norm() == 0.0) v = Vec::Unit(N, 0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    double theta = 0.0;
    double best_theta = -1.0;
    std::size_t since_improvement = 0;
    Vec u = Vec::Zero(N);

    while (true) {
        // expand the basis with v, twice-orthogonalized
        bool expanded = false;
        if (k < N) {
            const double before = v.norm();
            for (int pass = 0; pass < 2 && k > 0; ++pass) v -= V.leftCols(k) * (V.leftCols(k).adjoint() * v);
            const double nrm = v.norm();
            if (nrm > 1e-13 * std::max(before, 1e-300)) {
                V.col(k) = v / nrm;
                W.col(k) = apply_normal(V.col(k));
                const Vec h = V.leftCols(k + 1).adjoint() * W.col(k);
                for (Eigen::Index i = 0; i <= k; ++i) {
                    H(i, k) = h(i);
                    H(k, i) = std::conj(h(i));
                }
                H(k, k) = h(k).real();
                ++k;
                expanded = true;
            }
        }

        es.compute(H.topLeftCorner(k, k));
        theta = std::max(0.0, es.eigenvalues()(k - 1));
        const Vec y = es.eigenvectors().col(k - 1);
        u = V.leftCols(k) * y;
        const Vec r = W.leftCols(k) * y - theta * u;
        const double rn = r.norm();
        out.value = std::sqrt(theta);
        out.residual = theta > 0.0 ? rn / theta : 0.0;

        if (theta == 0.0 || out.residual <= cfg.residual_tol) {
            out.status = IterationStatus::converged;
            break;
        }
        if (!expanded) {
            // exhausted the space (k == N or breakdown): Ritz pair is exact up to rounding
            out.status = IterationStatus::value_stagnated;
            break;
        }
        if (theta > best_theta * (1.0 + 1e-15)) {
            best_theta = theta;
            since_improvement = 0;
        } else if (++since_improvement >= 200) {
            out.status = IterationStatus::value_stagnated;
            break;
        }
        if (out.matvecs >= cfg.max_matvecs) {
            out.status = IterationStatus::iteration_cap;
            break;
        }
        if (k == kmax && kmax < N) {
            const Eigen::MatrixXcd Y = es.eigenvectors().rightCols(keep);
            const Eigen::MatrixXcd Vn = V.leftCols(k) * Y;
            const Eigen::MatrixXcd Wn = W.leftCols(k) * Y;
            V.leftCols(keep) = Vn;
            W.leftCols(keep) = Wn;
            H.setZero();
            for (Eigen::Index i = 0; i < keep; ++i) H(i, i) = es.eigenvalues()(k - keep + i);
            k = keep;
        }
        v = r;
    }
    out.right.assign(u.data(), u.data() + N);
    return out;
}

// ---------------------------------------------------------------------------

NormEstimate hankel_norm(const HankelCoefficients& c, const NormConfig& cfg) {
    if (!is_power_of_two(cfg.n_min) || !is_power_of_two(cfg.n_max) || cfg.n_min > cfg.n_max) {
        throw ConfigError("truncation sizes must be powers of two with n_min <= n_max");
    }
    if (!(cfg.tol_rel >= 0.0) || !(cfg.iteration.residual_tol > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (cfg.n_max > c.max_truncation()) {
        int need = c.grid_exponent;
        while (need <= kMaxGridExp && grid_size(need) / 4 < cfg.n_max) ++need;
        throw ResolutionError("grid 2^" + std::to_string(c.grid_exponent) + " supports truncations up to " +
                                  std::to_string(c.max_truncation()) + ", not " + std::to_string(cfg.n_max),
                              need);
    }
    NormEstimate est;
    detail::SeededRng rng(cfg.seed);
    std::vector<cplx> prev;
    for (std::size_t n = cfg.n_min;; n *= 2) {
        HankelMatrix g(c, n);
        std::vector<cplx> start(n);
        for (auto& s : start) s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (!prev.empty()) {
            // warm start: previous vector padded, plus a small perturbation
            double pn = 0.0;
            for (const auto& s : start) pn += std::norm(s);
            const double eps = 1e-2 / std::sqrt(pn);
            for (std::size_t i = 0; i < n; ++i) start[i] = (i < prev.size() ? prev[i] : cplx{}) + eps * start[i];
        }
        auto pair = top_singular_pair(g, start, cfg.iteration);
        if (pair.status == IterationStatus::iteration_cap) {
            est.undecided = true;
            est.warnings.push_back("iteration cap reached at N = " + std::to_string(n));
        }
        if (!est.values.empty() && pair.value < est.values.back() - 1e-10 * std::max(1.0, est.values.back())) {
            est.warnings.push_back("truncated norm decreased at N = " + std::to_string(n));
        }
        est.sizes.push_back(n);
        est.values.push_back(pair.value);
        est.residuals.push_back(pair.residual);
        est.diagnostics.push_back({n, pair.value, pair.residual, pair.matvecs, pair.status});
        prev = pair.right;
        // an exact sequence whose nonzero block fits: larger N cannot change the norm
        if (c.exact && n >= c.c.size()) {
            est.converged = true;
            break;
        }
        if (est.values.size() >= 2) {
            const double a = est.values[est.values.size() - 2];
            const double b = est.values.back();
            // zero blocks say nothing about coefficients further out
            if (b > 0.0 && std::abs(b - a) / b < cfg.tol_rel) {
                est.converged = true;
                break;
            }
        }
        if (n >= cfg.n_max) break;
    }
    est.witness.resize(prev.size());
    std::transform(prev.begin(), prev.end(), est.witness.begin(), [](const cplx& v) { return std::conj(v); });
    return est;
}

// ---------------------------------------------------------------------------

GridFunction apply_hankel(const GridFunction& phi, const GridFunction& g, std::vector<std::string>* warnings) {
    if (phi.exponent() != g.exponent()) throw ConfigError("apply_hankel: grids differ");
    if (warnings != nullptr) {
        const double leak = negative_frequency_fraction(transform(g));
        if (leak > 1e-8) warnings->push_back("input has negative-frequency energy fraction " + std::to_string(leak));
    }
    std::vector<cplx> prod(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) prod[j] = std::conj(phi[j]) * g[j];
    return project_coanalytic(GridFunction(g.exponent(), std::move(prod)));
}

GridFunction analytic_from_coefficients(int m, std::span<const cplx> a) {
    check_grid_exponent(m);
    if (a.size() > grid_size(m) / 2) throw ConfigError("too many coefficients for the grid");
    FourierCoefficients c(m, std::vector<cplx>(grid_size(m)));
    for (std::size_t k = 0; k < a.size(); ++k) c(static_cast<long>(k)) = a[k];
    return inverse(c);
}

cplx pairing(const GridFunction& f, const GridFunction& g) {
    if (f.size() != g.size()) throw ConfigError("pairing: grids differ");
    std::vector<cplx> p(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) p[j] = f[j] * std::conj(g[j]);
    return pairwise_sum(p) / static_cast<double>(f.size());
}

H1Witness h1_witness(const GridFunction& phi, const GridFunction& g) {
    const double s = phi.sup_modulus();
    if (s == 0.0) throw DomainError("h1_witness: zero symbol");
    const double gn = norms(g).l2;
    if (std::abs(gn - 1.0) > 1e-10) throw PreconditionError("h1_witness: g must have unit L2 norm");
    const auto hg = apply_hankel(phi, g);
    std::vector<cplx> f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = g[j] * std::conj(hg[j]) / s;
    H1Witness w{GridFunction(g.exponent(), std::move(f)), 0.0, {}, 0.0};
    w.l1 = norms(w.f).l1;
    w.pairing = pairing(w.f, phi);
    const double hn = norms(hg).l2;
    w.expected_pairing = hn * hn / s;
    return w;
}

// ---------------------------------------------------------------------------

std::string to_string(GapClass c) {
    switch (c) {
        case GapClass::constant_modulus_extremal: return "constant_modulus_extremal";
        case GapClass::strict_interior: return "strict_interior";
        case GapClass::maximal_evidence: return "maximal_evidence";
        case GapClass::undecided: return "undecided";
    }
    return "undecided";
}

GapReport gap_report(const GridFunction& phi, const GapConfig& cfg) {
    if (!(cfg.tol_gap > 0.0) || !(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0)) {
        throw ConfigError("tol_gap must be positive and shrink_factor in (0, 1)");
    }
    GapReport r;
    const auto hc = hankel_coefficients(phi);
    r.leakage = hc.leakage;
    r.warnings = hc.warnings;
    r.norm_est = hankel_norm(hc, cfg.norm);
    r.warnings.insert(r.warnings.end(), r.norm_est.warnings.begin(), r.norm_est.warnings.end());
    const auto nb = norms(phi);
    r.l2 = nb.l2;
    r.sup = nb.sup;
    const double v = r.norm_est.final_value();
    r.minimality_gap = v - r.l2;
    r.maximality_gap = r.sup - v;
    for (double x : r.norm_est.values) r.maximality_gaps.push_back(r.sup - x);
    if (r.minimality_gap < -1e-8 || r.maximality_gap < -1e-8) {
        r.warnings.push_back("norm estimate outside the L2/sup sandwich");
    }

    const auto& g = r.maximality_gaps;
    bool shrinking = g.size() >= 4;
    for (std::size_t i = g.size() >= 4 ? g.size() - 3 : 0; shrinking && i < g.size(); ++i) {
        shrinking = g[i - 1] > 0.0 && g[i] <= cfg.shrink_factor * g[i - 1];
    }

    if (r.norm_est.undecided) {
        r.classification = GapClass::undecided;
    } else if (std::abs(r.minimality_gap) < cfg.tol_gap && std::abs(r.maximality_gap) < cfg.tol_gap) {
        r.classification = GapClass::constant_modulus_extremal;
    } else if (shrinking && r.minimality_gap > cfg.tol_gap) {
        r.classification = GapClass::maximal_evidence;
    } else if (r.minimality_gap > cfg.tol_gap && r.maximality_gap > cfg.tol_gap && r.norm_est.converged) {
        r.classification = GapClass::strict_interior;
    } else {
        r.classification = GapClass::undecided;
    }
    return r;
}

GapReport gap_report(const SymbolSpec& spec, const GapConfig& cfg) {
    spec.validate();
    return gap_report(compose_symbol(spec, cfg.grid_exponent), cfg);
}

}  // namespace hsat
