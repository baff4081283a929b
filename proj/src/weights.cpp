#include "hsat/weights.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsat/errors.hpp"

namespace hsat {

namespace {

constexpr double pi = std::numbers::pi;

double half_pi_threshold(double margin) { return pi / 2.0 - margin; }

// Distance (in nodes) from every node to the nearest marked node; M if none.
std::vector<std::size_t> nearest_marked(const std::vector<bool>& mark) {
    const std::size_t M = mark.size();
    std::vector<std::size_t> d(M, M);
    std::size_t last = M;  // sentinel: none seen yet
    for (std::size_t i = 0; i < 2 * M; ++i) {
        const std::size_t j = i % M;
        if (mark[j]) last = i;
        if (last != M) d[j] = std::min(d[j], i - last);
    }
    last = M;
    for (std::size_t i = 2 * M; i-- > 0;) {
        const std::size_t j = i % M;
        if (mark[j]) last = i;
        if (last != M) d[j] = std::min(d[j], last - i);
    }
    return d;
}

ApicalCertificate certificate_from_log(int m, std::span<const double> log_w, double delta, std::vector<double> u,
                                       std::vector<double> v, double margin, double tolerance) {
    const std::size_t M = grid_size(m);
    if (u.size() != M || v.size() != M || log_w.size() != M) throw ConfigError("split size does not match grid");
    if (!(margin >= 0.0 && margin < pi / 2.0)) throw ConfigError("apical margin must lie in [0, pi/2)");
    ApicalCertificate c;
    c.m = m;
    c.delta = delta;
    c.margin = margin;
    for (std::size_t j = 0; j < M; ++j) {
        if (!std::isfinite(u[j]) || !std::isfinite(v[j])) throw DomainError("split must be finite on the grid");
        // exp(u + v) = w to relative 1e-8  <=>  |u + v - log w| <= ~1e-8
        const double err = std::abs(std::expm1(u[j] + v[j] - log_w[j]));
        c.reconstruction_error = std::max(c.reconstruction_error, err);
    }
    if (c.reconstruction_error > 1e-8) {
        throw DomainError("split does not reconstruct the weight (relative error " +
                          std::to_string(c.reconstruction_error) + ")");
    }
    const auto L = level_sets_log(m, log_w, delta, tolerance);
    const auto vt = conjugate_function(m, v);
    for (std::size_t j = 0; j < M; ++j) {
        if (L.plus[j]) c.sup_vtilde = std::max(c.sup_vtilde, std::abs(vt[j]));
        c.u_sup = std::max(c.u_sup, std::abs(u[j]));
    }
    std::vector<double> av(M);
    std::transform(v.begin(), v.end(), av.begin(), [](double x) { return std::abs(x); });
    c.v_l1 = pairwise_sum(av) / static_cast<double>(M);
    c.pass = c.sup_vtilde < half_pi_threshold(margin);
    c.status = c.pass ? CertificateStatus::pass : CertificateStatus::fail;
    c.u = std::move(u);
    c.v = std::move(v);
    return c;
}

void apply_stability_gate(ApicalCertificate& c, double refined) {
    c.refined_sup_vtilde = refined;
    if (c.status == CertificateStatus::pass && std::abs(refined - c.sup_vtilde) >= kStabilityGate) {
        c.status = CertificateStatus::undecided;
    }
}

}  // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::numeric_split: return "numeric_split";
        case Provenance::lemma_distance: return "lemma_distance";
        case Provenance::claim_construction: return "claim_construction";
    }
    return "numeric_split";
}

std::string to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::pass: return "pass";
        case CertificateStatus::fail: return "fail";
        case CertificateStatus::undecided: return "undecided";
    }
    return "undecided";
}

std::vector<double> WeightSpec::log_samples(int m) const {
    if (!(floor_exponent > 0.0)) throw ConfigError("floor exponent must be positive");
    auto lw = log_weight.log_modulus(m);
    for (double& x : lw) {
        if (std::isnan(x)) throw DomainError("weight undefined at a grid node");
        x = std::max(x, -floor_exponent);
    }
    return lw;
}

GridFunction WeightSpec::sample(int m) const {
    auto lw = log_samples(m);
    std::vector<double> w(lw.size());
    std::transform(lw.begin(), lw.end(), w.begin(), [](double x) { return std::exp(x); });
    return GridFunction::from_real(m, w);
}

// ---------------------------------------------------------------------------

ApicalCertificate apical_certificate(const GridFunction& w, double delta, std::span<const double> u,
                                     std::span<const double> v, double margin, double tolerance) {
    std::vector<double> lw(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double a = std::abs(w[j]);
        if (!(a > 0.0)) throw DomainError("weight must be positive at node " + std::to_string(j));
        lw[j] = std::log(a);
    }
    auto c = certificate_from_log(w.exponent(), lw, delta, std::vector<double>(u.begin(), u.end()),
                                  std::vector<double>(v.begin(), v.end()), margin, tolerance);
    c.provenance = Provenance::numeric_split;
    return c;
}

ApicalCertificate apical_from_distance_log(int m, std::span<const double> log_w, double delta, double epsilon,
                                           double margin, double tolerance) {
    if (!(epsilon > 0.0 && epsilon < delta && delta <= 1.0)) {
        throw ConfigError("apical_from_distance needs 0 < epsilon < delta <= 1");
    }
    const std::size_t M = grid_size(m);
    if (log_w.size() != M) throw ConfigError("weight size does not match grid");
    const double log_sup = *std::max_element(log_w.begin(), log_w.end());
    const double R = -std::log(epsilon);
    const auto L = level_sets_log(m, log_w, delta, tolerance);

    std::vector<bool> support(M);
    bool any = false;
    for (std::size_t j = 0; j < M; ++j) {
        support[j] = log_w[j] - log_sup < -R;
        any = any || support[j];
    }
    std::vector<double> u(M), v(M, 0.0);
    double distance = std::numeric_limits<double>::infinity();
    const double h = kTwoPi / static_cast<double>(M);
    if (any) {
        const auto near = nearest_marked(support);
        std::size_t dmin = M;
        for (std::size_t j = 0; j < M; ++j) {
            if (L.plus[j]) dmin = std::min(dmin, near[j]);
        }
        distance = static_cast<double>(dmin) * h;
        if (dmin < 4) {
            throw InapplicableError("L+(" + std::to_string(delta) + ") and L-(" + std::to_string(epsilon) +
                                    ") are not separated at grid resolution (distance " +
                                    std::to_string(distance) + ")");
        }
    }
    for (std::size_t j = 0; j < M; ++j) {
        const double lwn = log_w[j] - log_sup;
        u[j] = std::max(lwn, -R) + log_sup;
        v[j] = R + std::min(lwn, -R);
    }
    auto c = certificate_from_log(m, log_w, delta, std::move(u), std::move(v), margin, tolerance);
    c.provenance = Provenance::lemma_distance;
    c.distance = distance;
    c.floor_exponent = R;
    c.analytic_bound = any ? c.v_l1 / std::tan(distance / 2.0) : 0.0;
    c.pass = std::min(c.analytic_bound, c.sup_vtilde) < half_pi_threshold(margin);
    c.status = c.pass ? CertificateStatus::pass : CertificateStatus::fail;
    return c;
}

ApicalCertificate apical_from_distance(const WeightSpec& w, double delta, double epsilon, int m, double margin,
                                       bool stability_check) {
    const auto lw = w.log_samples(m);
    auto c = apical_from_distance_log(m, lw, delta, epsilon, margin, w.level_tolerance());
    if (stability_check && c.status == CertificateStatus::pass && m + 1 <= kMaxGridExp) {
        try {
            const auto fine = apical_from_distance_log(m + 1, w.log_samples(m + 1), delta, epsilon, margin,
                                                       w.level_tolerance());
            apply_stability_gate(c, fine.sup_vtilde);
        } catch (const InapplicableError&) {
            c.status = CertificateStatus::undecided;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

A2Report estimate_a2(const GridFunction& w, int max_depth, double floor_exponent) {
    const int m = w.exponent();
    if (max_depth < 0 || max_depth > m) throw ConfigError("max_depth must lie in [0, m]");
    const std::size_t M = w.size();
    const double floor = std::exp(-floor_exponent);
    std::vector<double> wv(M), iv(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double a = std::max(std::abs(w[j]), floor);
        wv[j] = a;
        iv[j] = 1.0 / a;
    }
    A2Report r;
    r.max_depth = max_depth;
    double running = 0.0;
    for (int k = 0; k <= max_depth; ++k) {
        const std::size_t arcs = std::size_t{1} << k;
        const std::size_t len = M / arcs;
        double best = 0.0;
        for (std::size_t i = 0; i < arcs; ++i) {
            const std::span<const double> ws(wv.data() + i * len, len);
            const std::span<const double> is(iv.data() + i * len, len);
            const double n = static_cast<double>(len);
            best = std::max(best, (pairwise_sum(ws) / n) * (pairwise_sum(is) / n));
        }
        r.per_depth.push_back(best);
        running = std::max(running, best);
        r.cumulative.push_back(running);
    }
    r.estimate = r.cumulative.back();
    for (int k = 3; k <= max_depth; ++k) {
        const auto i = static_cast<std::size_t>(k);
        r.growing = r.growing || r.cumulative[i] > kA2GrowthRatio * r.cumulative[i - 3];
    }
    return r;
}

A2Report estimate_a2(const WeightSpec& w, int m, int max_depth) {
    return estimate_a2(w.sample(m), max_depth, w.floor_exponent);
}

// ---------------------------------------------------------------------------

ThinSetSpec ThinSetSpec::dyadic(double a, double b, int count) {
    if (!(a > 0.0) || !(b > 0.0 && b < 1.0) || count < 1) {
        throw ConfigError("dyadic family needs a > 0, 0 < b < 1 and count >= 1");
    }
    ThinSetSpec U;
    for (int n = 1; n <= count; ++n) {
        const double lo = std::ldexp(1.0, -n);
        const double len = a * std::pow(b, n);
        U.arcs.push_back({lo + len / 2.0, len / kTwoPi});
    }
    U.validate();
    return U;
}

double ThinSetSpec::total_measure() const {
    double s = 0.0;
    for (const auto& a : arcs) s += a.length;
    return s;
}

void ThinSetSpec::validate() const {
    if (arcs.empty()) throw ConfigError("thin set needs at least one arc");
    for (const auto& a : arcs) {
        if (!std::isfinite(a.center) || !(a.length > 0.0)) throw ConfigError("arc lengths must be positive");
    }
    const double total = total_measure();
    if (!(total > 0.0 && total < 1.0)) throw ConfigError("total arc measure must lie in (0, 1)");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double gap = circle_distance(arcs[i].center, arcs[j].center) -
                               pi * (arcs[i].length + arcs[j].length);
            if (gap < -1e-12) throw ConfigError("arcs must be pairwise disjoint");
        }
    }
}

ThinnessReport thinness_margin(const ThinSetSpec& U, std::size_t n_terms, int m, std::size_t block) {
    U.validate();
    check_grid_exponent(m);
    if (n_terms == 0 || block == 0) throw ConfigError("n_terms and block must be positive");
    n_terms = std::min(n_terms, U.arcs.size());
    const std::size_t M = grid_size(m);
    ThinnessReport r;
    r.m = m;
    r.n_terms = n_terms;
    r.block = block;
    r.partial.assign(n_terms, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        const double t = node_angle(m, j);
        bool inside = false;
        for (const auto& a : U.arcs) {
            if (circle_distance(t, a.center) < pi * a.length) {
                inside = true;
                break;
            }
        }
        if (inside) continue;
        double s = 0.0;
        for (std::size_t n = 0; n < n_terms; ++n) {
            const auto& a = U.arcs[n];
            const double d = (circle_distance(t, a.center) - pi * a.length / 2.0) / kTwoPi;
            s += a.length / d;
            r.partial[n] = std::max(r.partial[n], s);
        }
    }
    r.margin = r.partial.back();
    std::vector<double> inc;
    double prev = 0.0;
    for (std::size_t k = block; k <= n_terms; k += block) {
        inc.push_back(r.partial[k - 1] - prev);
        prev = r.partial[k - 1];
    }
    r.stabilizes = true;
    for (std::size_t i = 1; i < inc.size(); ++i) {
        if (inc[i - 1] <= 1e-14 * r.margin) continue;  // zero increments pass
        const double ratio = inc[i] / inc[i - 1];
        r.block_ratios.push_back(ratio);
        r.stabilizes = r.stabilizes && ratio <= 0.8;
    }
    return r;
}

WeightSpec build_w_kappa(const ThinSetSpec& U, double kappa, double floor_exponent) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be positive");
    U.validate();
    PiecewiseModulus p;
    p.default_modulus = 1.0;
    p.continuous = true;
    for (const auto& a : U.arcs) {
        ModulusPiece piece;
        piece.kind = ModulusPiece::Kind::power;
        const double half = pi * a.length;
        piece.start = a.center - half;
        piece.end = a.center + half;
        piece.center = a.center;
        piece.scale = half;
        piece.exponent = kappa;
        p.pieces.push_back(piece);
    }
    return WeightSpec{OuterSpec(p), floor_exponent};
}

// ---------------------------------------------------------------------------

double claim_epsilon(const ThinSetSpec& U, double kappa, double level) {
    const auto w = build_w_kappa(U, kappa);
    const double log_level = std::log(level);  // sup w = 1
    auto inside = [&](double eps) {
        for (const auto& a : U.arcs) {
            const double half = pi * a.length * eps;
            for (int i = -32; i <= 32; ++i) {
                if (w.log_weight.log_modulus_at(a.center + half * i / 32.0) >= log_level) return false;
            }
        }
        return true;
    };
    if (inside(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

namespace {

// Conjugate of v_eps at theta, summed arc by arc:
// (1/2pi) int_{eps Gamma_n} v(t) cot((theta - t)/2) dt with v = max(kappa log(|t - c|/half), -R).
// Valid for theta off U_eps; Gauss-Legendre on s = eps e^{-y} absorbs the log singularity.
class ClaimConjugate {
public:
    ClaimConjugate(const ThinSetSpec& U, double kappa, double epsilon, double R, bool refined)
        : U_(U), kappa_(kappa), eps_(epsilon), R_(R), refined_(refined) {
        s_floor_ = std::min(std::exp(-R / kappa), epsilon);
        y_max_ = std::log(epsilon / s_floor_);
        double a = 0.0;
        for (double b = 1.0; a < y_max_; b *= 2.0) {
            breaks_.emplace_back(a, std::min(b, y_max_));
            a = b;
        }
    }

    double operator()(double theta) const {
        double total = 0.0;
        for (const auto& arc : U_.arcs) {
            const double half = pi * arc.length;
            const double x = std::remainder(theta - arc.center, kTwoPi);
            auto kernel = [&](double s) {
                return 1.0 / std::tan((x - half * s) / 2.0) + 1.0 / std::tan((x + half * s) / 2.0);
            };
            double acc = integrate([&](double s) { return -R_ * kernel(s); }, 0.0, s_floor_);
            for (const auto& [a, b] : breaks_) {
                acc += integrate(
                    [&](double y) {
                        const double s = eps_ * std::exp(-y);
                        return kappa_ * (std::log(eps_) - y) * kernel(s) * s;
                    },
                    a, b);
            }
            total += half * acc / kTwoPi;
        }
        return total;
    }

private:
    template <class F>
    double integrate(F f, double a, double b) const {
        if (!(b > a)) return 0.0;
        if (refined_) return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
        return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
    }

    const ThinSetSpec& U_;
    double kappa_, eps_, R_;
    bool refined_;
    double s_floor_ = 0.0, y_max_ = 0.0;
    std::vector<std::pair<double, double>> breaks_;
};

// sup |v~_eps| over L+(1/2): arc-adapted points near every Gamma_n plus a uniform sweep.
double claim_sup_vtilde(const ThinSetSpec& U, const WeightSpec& w, double kappa, double epsilon, bool refined) {
    const ClaimConjugate vt(U, kappa, epsilon, w.floor_exponent, refined);
    const double log_thr = std::log(0.5) + std::log1p(-kExactLevelTol);
    const int density = refined ? 2 : 1;
    double best = 0.0;
    auto visit = [&](double theta) {
        if (w.log_weight.log_modulus_at(theta) < log_thr) return;
        for (const auto& arc : U.arcs) {
            if (circle_distance(theta, arc.center) <= epsilon * pi * arc.length) return;
        }
        best = std::max(best, std::abs(vt(theta)));
    };
    const double s0 = std::pow(0.5, 1.0 / kappa);
    const int inner = 32 * density;
    for (const auto& arc : U.arcs) {
        const double half = pi * arc.length;
        for (int side : {-1, 1}) {
            for (int i = 0; i <= inner; ++i) visit(arc.center + side * half * (s0 + (1.0 - s0) * i / inner));
            for (int i = 1; half * (1.0 + std::expm1(0.25 * i / density)) < pi; ++i) {
                visit(arc.center + side * half * (1.0 + std::expm1(0.25 * i / density)));
            }
        }
    }
    const std::size_t sweep = std::size_t{4096} * static_cast<std::size_t>(density);
    for (std::size_t j = 0; j < sweep; ++j) visit(kTwoPi * (static_cast<double>(j) + 0.5) / static_cast<double>(sweep));
    return best;
}

}  // namespace

ClaimReport verify_claim(const ThinSetSpec& U, double kappa, double epsilon, const ClaimConfig& cfg) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    U.validate();
    ClaimReport r;
    r.kappa = kappa;
    r.epsilon = epsilon;
    r.thinness = thinness_margin(U, cfg.n_terms, cfg.m);
    if (!r.thinness.stabilizes) r.flags.push_back("arc family is not thin at the configured depth");
    r.epsilon_kappa = claim_epsilon(U, kappa);
    r.epsilon_admissible = epsilon <= r.epsilon_kappa;
    if (!r.epsilon_admissible) {
        r.flags.push_back("epsilon must shrink: eps Gamma_n leaves L-(1/4) above eps_kappa = " +
                          std::to_string(r.epsilon_kappa));
    }
    const double R = cfg.floor_exponent;
    const double log_eps = std::log(epsilon);
    if (epsilon >= 1.0) r.flags.push_back("epsilon must shrink: the eps |log eps| envelope vanishes only as eps -> 0");

    const auto w = build_w_kappa(U, kappa, R);
    const std::size_t M = grid_size(cfg.m);
    const auto lw = w.log_samples(cfg.m);
    std::vector<double> u(lw), v(M, 0.0);
    std::vector<int> owner(M, -1);
    for (std::size_t j = 0; j < M; ++j) {
        const double t = node_angle(cfg.m, j);
        for (std::size_t n = 0; n < U.arcs.size(); ++n) {
            if (circle_distance(t, U.arcs[n].center) < epsilon * pi * U.arcs[n].length) {
                owner[j] = static_cast<int>(n);
                v[j] = lw[j];
                u[j] = 0.0;
                break;
            }
        }
    }
    auto cert = certificate_from_log(cfg.m, lw, 0.5, std::move(u), std::move(v), cfg.margin, kExactLevelTol);
    cert.provenance = Provenance::claim_construction;

    // per-arc integrals of |v_eps| = min(kappa |log s|, R) over |s| < eps, normalized measure
    boost::math::quadrature::tanh_sinh<double> ts;
    auto profile = [&](double s) { return std::min(kappa * std::abs(std::log(s)), R); };
    const double kink = std::exp(-R / kappa);
    const double integral = kink < epsilon ? R * kink + ts.integrate(profile, kink, epsilon) : R * epsilon;
    std::vector<double> grid_sum(U.arcs.size(), 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        if (owner[j] >= 0) grid_sum[static_cast<std::size_t>(owner[j])] += std::abs(cert.v[j]);
    }
    double v_l1 = 0.0;
    for (std::size_t n = 0; n < U.arcs.size(); ++n) {
        const auto& a = U.arcs[n];
        ArcIntegral ai;
        ai.n = n + 1;
        ai.quadrature = a.length * integral;
        ai.envelope = kappa * epsilon * std::abs(log_eps) * a.length;
        ai.grid = grid_sum[n] / static_cast<double>(M);
        v_l1 += ai.quadrature;
        if (ai.envelope > 0.0) r.fitted_constant = std::max(r.fitted_constant, ai.quadrature / ai.envelope);
        r.arcs.push_back(ai);
    }
    if (epsilon >= 1.0) r.fitted_constant = std::numeric_limits<double>::infinity();

    // grid nodes cannot resolve the deep arcs, so the conjugate is integrated arc by arc
    cert.v_l1 = v_l1;
    cert.sup_vtilde = claim_sup_vtilde(U, w, kappa, epsilon, false);
    cert.pass = cert.sup_vtilde < half_pi_threshold(cfg.margin);
    cert.status = cert.pass ? CertificateStatus::pass : CertificateStatus::fail;
    if (cfg.stability_check && cert.pass) {
        apply_stability_gate(cert, claim_sup_vtilde(U, w, kappa, epsilon, true));
    }
    r.certificate = std::move(cert);
    r.pass = r.certificate.status == CertificateStatus::pass && r.epsilon_admissible && r.thinness.stabilizes;
    return r;
}

}  // namespace hsat
