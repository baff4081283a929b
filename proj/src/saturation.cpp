#include "hsat/saturation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsat/errors.hpp"
#include "hsat/weights.hpp"

namespace hsat {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Prepared {
    int m = 0;
    double tol = kExactLevelTol;
    std::vector<double> lw;  ///< log|phi|, constant included
    double sup = 0.0;
    GridFunction phi = GridFunction::constant(kMinGridExp, 0.0);
    std::vector<cplx> h;  ///< z I c/|c|
    std::vector<double> sigma;

    bool constant_modulus() const {
        const auto [lo, hi] = std::minmax_element(lw.begin(), lw.end());
        return *hi - *lo <= std::log1p(tol);
    }
};

Prepared prepare(const SymbolSpec& spec, int m) {
    spec.validate();
    auto s = build_symbol(spec, m);
    Prepared P;
    P.m = m;
    P.tol = level_tolerance(spec);
    const double c = std::abs(spec.constant);
    const cplx phase = spec.constant / c;
    P.lw = s.log_modulus;
    for (double& x : P.lw) x += std::log(c);
    P.sup = std::exp(*std::max_element(P.lw.begin(), P.lw.end()));
    P.h.resize(P.lw.size());
    for (std::size_t j = 0; j < P.h.size(); ++j) P.h[j] = std::polar(1.0, node_angle(m, j)) * s.inner[j] * phase;
    P.phi = std::move(s.phi);
    P.sigma = spectrum(spec.blaschke, spec.singular);
    return P;
}

// One-sided estimates of nu', nu'' at node `at`, stepping away by `dir`.
std::pair<double, double> one_sided(const std::vector<double>& nu, std::size_t at, int dir, std::size_t avail,
                                    double h) {
    const std::size_t M = nu.size();
    auto get = [&](std::size_t k) { return nu[(at + M + static_cast<std::size_t>(dir) * k) % M]; };
    if (avail >= 3) {
        // dir = -1 steps back into the complement, so the derivative is taken in +theta
        const double d1 = (3.0 * get(0) - 4.0 * get(1) + get(2)) / (2.0 * h);
        const double d2 = (get(0) - 2.0 * get(1) + get(2)) / (h * h);
        return {dir < 0 ? d1 : -d1, d2};
    }
    if (avail == 2) {
        const double d1 = (get(0) - get(1)) / h;
        return {dir < 0 ? d1 : -d1, 0.0};
    }
    return {0.0, 0.0};
}

// nu = -arg h off Gamma, unwrapped per complementary arc; C^2 ramps across Gamma.
std::vector<double> build_nu(int m, const std::vector<cplx>& hv, const std::vector<Arc>& gamma) {
    const std::size_t M = hv.size();
    const double h = kTwoPi / static_cast<double>(M);
    std::vector<bool> in_gamma(M, false);
    for (const auto& a : gamma)
        for (std::size_t k = 0; k < a.length; ++k) in_gamma[(a.start + k) % M] = true;
    std::vector<double> nu(M, 0.0);
    std::vector<std::size_t> comp_len(M, 0);  // complement run length, indexed by run start
    for (std::size_t s = 0; s < M; ++s) {
        if (in_gamma[s] || !in_gamma[(s + M - 1) % M]) continue;
        double ph = std::arg(hv[s]);
        nu[s] = -ph;
        std::size_t k = (s + 1) % M, len = 1;
        while (!in_gamma[k]) {
            const double inc = std::arg(hv[k] / hv[(k + M - 1) % M]);
            if (std::abs(inc) > pi / 2) {
                throw ResolutionError("inner factor phase moves by " + fmt(inc) + " between adjacent nodes",
                                      std::min(m + 1, kMaxGridExp));
            }
            ph += inc;
            nu[k] = -ph;
            k = (k + 1) % M;
            ++len;
        }
        comp_len[s] = len;
    }
    auto run_length_ending_at = [&](std::size_t e) {
        std::size_t len = 0;
        while (len < M && !in_gamma[(e + M - len) % M]) ++len;
        return len;
    };
    for (const auto& g : gamma) {
        const std::size_t a = (g.start + M - 1) % M;
        const std::size_t b = (g.start + g.length) % M;
        const auto [da, dda] = one_sided(nu, a, -1, run_length_ending_at(a), h);
        const auto [db, ddb] = one_sided(nu, b, +1, comp_len[b], h);
        const double L = static_cast<double>(g.length + 1) * h;
        for (std::size_t q = 0; q < g.length; ++q) {
            const double x = static_cast<double>(q + 1) * h;
            const double s = x / L;
            const double r = s - std::sin(kTwoPi * s) / kTwoPi;
            const double left = nu[a] + da * x + 0.5 * dda * x * x;
            const double y = x - L;
            const double right = nu[b] + db * y + 0.5 * ddb * y * y;
            nu[(g.start + q) % M] = (1.0 - r) * left + r * right;
        }
    }
    return nu;
}

struct Construction {
    double delta = 0.0;
    double apical_epsilon = 0.0;
    double sup_vtilde = 0.0;
    std::vector<Arc> gamma;
    std::vector<cplx> F;  ///< z g1 g2
    double eps0 = 0.0;
};

// Minus-runs covering sigma(I) with two nodes of clearance, or the largest minus-run.
std::optional<std::vector<Arc>> choose_gamma(const Prepared& P, double delta, std::string* why) {
    const auto L = level_sets_log(P.m, P.lw, delta, P.tol);
    const auto runs = L.interior_minus(3);
    if (runs.empty()) {
        if (why) *why = "L-(" + fmt(delta) + ") has no interior arc";
        return std::nullopt;
    }
    std::vector<Arc> gamma;
    if (P.sigma.empty()) {
        gamma.push_back(*std::max_element(runs.begin(), runs.end(),
                                          [](const Arc& x, const Arc& y) { return x.length < y.length; }));
        return gamma;
    }
    for (double s : P.sigma) {
        auto it = std::find_if(runs.begin(), runs.end(), [&](const Arc& a) { return a.contains(s, 2); });
        if (it == runs.end()) {
            if (why) *why = "sigma(I) point " + fmt(s) + " is not inside L-(" + fmt(delta) + ")";
            return std::nullopt;
        }
        if (std::none_of(gamma.begin(), gamma.end(), [&](const Arc& a) { return a.start == it->start; })) {
            gamma.push_back(*it);
        }
    }
    return gamma;
}

std::optional<Construction> construct_at(const Prepared& P, double delta, double apical_margin,
                                         std::vector<std::string>& diag) {
    std::string why;
    auto gamma = choose_gamma(P, delta, &why);
    if (!gamma) {
        diag.push_back(why);
        return std::nullopt;
    }
    Construction C;
    C.delta = delta;
    C.gamma = std::move(*gamma);
    C.apical_epsilon = delta / 2.0;
    ApicalCertificate cert;
    try {
        cert = apical_from_distance_log(P.m, P.lw, delta, C.apical_epsilon, apical_margin, P.tol);
    } catch (const InapplicableError& e) {
        diag.push_back("level " + fmt(delta) + ": " + e.what());
        return std::nullopt;
    }
    if (!cert.pass) {
        diag.push_back("level " + fmt(delta) + ": apical certificate fails (sup |v~| = " + fmt(cert.sup_vtilde) + ")");
        return std::nullopt;
    }
    C.sup_vtilde = cert.sup_vtilde;
    const std::size_t M = P.lw.size();
    const auto nu = build_nu(P.m, P.h, C.gamma);
    const auto nut = conjugate_function(P.m, nu);
    const auto ut = conjugate_function(P.m, cert.u);
    C.F.resize(M);
    double g1max = 0.0, g2max = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const cplx g1 = std::exp(cplx{-nut[j], nu[j]});
        const cplx g2 = std::exp(cplx{-cert.u[j], -ut[j]});
        g1max = std::max(g1max, std::abs(g1));
        g2max = std::max(g2max, std::abs(g2));
        C.F[j] = std::polar(1.0, node_angle(P.m, j)) * g1 * g2;
    }
    C.eps0 = (1.0 - delta) * P.sup / (2.0 * g1max * g2max);
    return C;
}

double achieved(const Prepared& P, const std::vector<cplx>& F, double eps) {
    double s = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) s = std::max(s, std::abs(P.phi[j] - eps * std::conj(F[j])));
    return s;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::saturated: return "saturated";
        case Verdict::not_saturated: return "not_saturated";
        case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(Basis b) {
    switch (b) {
        case Basis::constant_modulus: return "constant_modulus";
        case Basis::continuous: return "continuous";
        case Basis::badapp: return "badapp";
        case Basis::outer: return "outer";
        case Basis::improver: return "improver";
        case Basis::none: return "none";
    }
    return "none";
}

double level_tolerance(const SymbolSpec& spec) { return spec.outer.exact() ? kExactLevelTol : kSampledLevelTol; }

// ---------------------------------------------------------------------------

SaturationVerdict classify_continuous(const SymbolSpec& spec, int m) {
    if (!spec.outer.continuous()) throw PreconditionError("outer modulus is not declared continuous");
    const auto P = prepare(spec, m);
    if (P.constant_modulus()) throw PreconditionError("outer modulus is constant; use the gap report");
    const auto L = level_sets_log(m, P.lw, 1.0, P.tol);
    ContinuousCheck c;
    c.spectrum = P.sigma;
    c.resolution = kTwoPi / static_cast<double>(grid_size(m));
    for (std::size_t j = 0; j < L.plus.size(); ++j)
        if (L.plus[j]) c.argmax.push_back(node_angle(m, j));
    c.separation = std::numeric_limits<double>::infinity();
    for (double s : c.spectrum) {
        for (double t : c.argmax) {
            const double d = circle_distance(s, t);
            if (d < c.separation) {
                c.separation = d;
                c.witness = s;
            }
        }
    }
    c.saturated = c.separation <= c.resolution;
    if (!c.saturated) c.witness.reset();
    SaturationVerdict v;
    v.m = m;
    v.sup = P.sup;
    v.level_tolerance = P.tol;
    if (c.saturated) {
        v.verdict = Verdict::saturated;
        v.basis = Basis::continuous;
        v.transcript.push_back("continuous modulus: sigma(I) meets the argmax set at " + fmt(*c.witness));
    } else {
        v.transcript.push_back("continuous modulus: sigma(I) is separated from the argmax set by " +
                               fmt(c.separation) + "; not-saturated candidate");
    }
    v.continuous = std::move(c);
    return v;
}

BadappTranscript badapp_hypothesis(const SymbolSpec& spec, const std::vector<double>& deltas, int m) {
    const auto P = prepare(spec, m);
    BadappTranscript t;
    t.m = m;
    t.pass = !deltas.empty();
    for (double d : deltas) {
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("badapp levels must lie in (0, 1)");
        const auto L = level_sets_log(m, P.lw, d, P.tol);
        BadappStep step;
        step.delta = d;
        const auto arcs = L.interior_plus(3);
        step.interior_arcs = arcs.size();
        for (double s : P.sigma) {
            if (std::any_of(arcs.begin(), arcs.end(), [&](const Arc& a) { return a.contains(s, 1); })) {
                step.witness = s;
                break;
            }
        }
        step.pass = step.witness.has_value();
        t.pass = t.pass && step.pass;
        t.steps.push_back(step);
    }
    return t;
}

ArcFamily ArcFamily::geometric(double base, double ratio, int count) {
    if (!(ratio > 0.0 && ratio < 1.0) || count < 1) throw ConfigError("arc family needs 0 < ratio < 1, count >= 1");
    ArcFamily f;
    f.base = base;
    for (int n = 1; n <= count; ++n) f.thetas.push_back(std::pow(ratio, n));
    f.validate();
    return f;
}

void ArcFamily::validate() const {
    if (thetas.empty()) throw ConfigError("arc family is empty");
    if (!std::isfinite(base)) throw ConfigError("arc family base must be finite");
    if (!(thetas.front() > 0.0 && thetas.front() <= pi)) throw ConfigError("theta_1 must lie in (0, pi]");
    for (std::size_t i = 1; i < thetas.size(); ++i) {
        if (!(thetas[i] > 0.0 && thetas[i] < thetas[i - 1])) throw ConfigError("thetas must decrease strictly");
    }
}

OuterTranscript outer_hypothesis(const SymbolSpec& spec, const ArcFamily& arcs, double a, double b, int m) {
    arcs.validate();
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) throw ConfigError("a and b must lie in (0, 1)");
    check_grid_exponent(m);
    auto nodes_in = [&](int mm, double th) {
        const double h = kTwoPi / static_cast<double>(grid_size(mm));
        return static_cast<std::size_t>(2.0 * th / h);  // lower bound, up to one node
    };
    const double smallest = arcs.thetas.back();
    if (nodes_in(m, smallest) < kOuterMinNodes) {
        int need = m;
        while (need < kMaxGridExp && nodes_in(need, smallest) < kOuterMinNodes + 1) ++need;
        throw ResolutionError("arc of half-width " + fmt(smallest) + " holds fewer than 16 nodes", need);
    }
    const auto P = prepare(spec, m);
    const auto L = level_sets_log(m, P.lw, 1.0, P.tol);
    OuterTranscript t;
    t.m = m;
    t.a = a;
    t.b = b;
    t.measured_a = t.measured_b = 1.0;
    const std::size_t M = grid_size(m);
    for (std::size_t n = 0; n < arcs.thetas.size(); ++n) {
        OuterStep s;
        s.n = n + 1;
        s.theta = arcs.thetas[n];
        std::size_t minus = 0, plus = 0;
        for (std::size_t j = 0; j < M; ++j) {
            if (circle_distance(node_angle(m, j), arcs.base) > s.theta) continue;
            ++s.nodes;
            if (L.plus[j]) {
                ++plus;
            } else {
                ++minus;
                s.minus_sup = std::max(s.minus_sup, std::exp(P.lw[j]));
            }
        }
        s.minus_fraction = static_cast<double>(minus) / static_cast<double>(s.nodes);
        s.plus_fraction = static_cast<double>(plus) / static_cast<double>(s.nodes);
        t.measured_a = std::min(t.measured_a, s.minus_fraction);
        t.measured_b = std::min(t.measured_b, s.plus_fraction);
        t.steps.push_back(s);
    }
    t.sup_near_base = t.steps.front().plus_fraction * static_cast<double>(t.steps.front().nodes) >= 3.0;
    if (!t.sup_near_base) t.notes.push_back("sup of |phi| is not attained on a set of positive measure near the base");
    t.limit_holds = t.steps.back().minus_sup <= kOuterLimitRatio * P.sup;
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
        if (t.steps[i].minus_sup > t.steps[i - 1].minus_sup * (1.0 + 1e-12)) t.limit_holds = false;
    }
    if (!t.limit_holds) t.notes.push_back("sup over Gamma cap L-(1) does not decrease to a small value");
    t.fractions_hold = t.measured_a >= a && t.measured_b >= b;
    if (!t.fractions_hold) {
        t.notes.push_back("measured fractions a = " + fmt(t.measured_a) + ", b = " + fmt(t.measured_b) +
                          " below the required " + fmt(a) + ", " + fmt(b));
    }
    t.pass = t.sup_near_base && t.limit_holds && t.fractions_hold;
    return t;
}

SymbolSpec dyadic_jump_symbol(int levels) {
    if (levels < 1 || levels > 24) throw ConfigError("levels must lie in [1, 24]");
    PiecewiseModulus p;
    p.default_modulus = 0.5;
    p.continuous = false;
    auto add = [&](double lo, double hi, double value) {
        ModulusPiece a;
        a.kind = ModulusPiece::Kind::constant;
        a.value = value;
        a.start = lo;
        a.end = hi;
        p.pieces.push_back(a);
        a.start = -hi;
        a.end = -lo;
        p.pieces.push_back(a);
    };
    for (int k = 0; k < levels; ++k) {
        add(std::ldexp(1.0, -2 * k - 1), std::ldexp(1.0, -2 * k), 1.0);
        add(std::ldexp(1.0, -2 * k - 2), std::ldexp(1.0, -2 * k - 1), std::ldexp(1.0, -(k + 1)));
    }
    const double core = std::ldexp(1.0, -2 * levels);
    ModulusPiece c;
    c.kind = ModulusPiece::Kind::constant;
    c.value = std::ldexp(1.0, -(levels + 1));
    c.start = -core;
    c.end = core;
    p.pieces.push_back(c);
    SymbolSpec s;
    s.outer = OuterSpec(p);
    return s;
}

// ---------------------------------------------------------------------------

ImproverResult construct_improver(const SymbolSpec& spec, double delta, const ImproverConfig& cfg) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("improver level must lie in (0, 1)");
    if (!(cfg.margin_target >= 0.0)) throw ConfigError("margin target must be nonnegative");
    const int m = cfg.grid_exponent;
    const auto P = prepare(spec, m);
    if (P.constant_modulus()) throw PreconditionError("constant modulus: L-(delta) is empty");
    std::string why;
    if (!choose_gamma(P, delta, &why)) throw PreconditionError(why);

    ImproverResult r;
    r.m = m;
    r.delta = delta;
    r.sup = P.sup;
    r.gain = -std::numeric_limits<double>::infinity();
    std::optional<Construction> best;
    double best_eps = 0.0;
    // the level is pushed toward 1 and eps scanned geometrically; the first
    // construction that clears the margin is not necessarily the best one
    for (int k = 0; k <= 6; ++k) {
        const double dl = 1.0 - (1.0 - delta) * std::ldexp(1.0, -k);
        auto C = construct_at(P, dl, cfg.apical_margin, r.diagnostics);
        if (!C) continue;
        for (int j = 48; j >= -160; --j) {
            const double eps = C->eps0 * std::exp2(j / 4.0);
            const double gain = P.sup - achieved(P, C->F, eps);
            if (gain > r.gain) {
                r.gain = gain;
                best_eps = eps;
                if (!best || best->delta != dl) best = *C;
            }
        }
    }
    if (!best) {
        throw PreconditionError("no apical certificate at any level in [" + fmt(delta) + ", 1)" +
                                (r.diagnostics.empty() ? "" : ": " + r.diagnostics.back()));
    }
    r.delta_used = best->delta;
    r.epsilon_used = best_eps;
    r.apical_epsilon = best->apical_epsilon;
    r.sup_vtilde = best->sup_vtilde;
    r.gamma = best->gamma;
    r.achieved_sup = P.sup - r.gain;
    std::vector<cplx> f(best->F.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = best_eps * best->F[j];
    r.f = GridFunction(m, std::move(f));
    r.nonpositive_energy = nonpositive_frequency_fraction(transform(r.f));

    r.success = r.gain > 0.0 && r.gain >= cfg.margin_target;
    if (!r.success) r.diagnostics.push_back("best gain " + fmt(r.gain) + " misses the margin " + fmt(cfg.margin_target));
    if (r.nonpositive_energy > 1e-8) {
        r.success = false;
        r.diagnostics.push_back("f carries relative energy " + fmt(r.nonpositive_energy) + " at n <= 0");
    }
    if (r.success && cfg.refine && m + 1 <= kMaxGridExp) {
        const auto Q = prepare(spec, m + 1);
        std::vector<std::string> sink;
        auto C = construct_at(Q, r.delta_used, cfg.apical_margin, sink);
        if (!C) {
            r.success = false;
            r.diagnostics.push_back("construction does not rebuild at m + 1");
        } else {
            r.refined_gain = Q.sup - achieved(Q, C->F, best_eps);
            if (!(*r.refined_gain > 0.0) || std::abs(*r.refined_gain - r.gain) >= kStabilityGate) {
                r.success = false;
                r.diagnostics.push_back("gain " + fmt(r.gain) + " does not re-verify at m + 1 (" +
                                        fmt(*r.refined_gain) + ")");
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

SaturationVerdict verdict_at(const SymbolSpec& spec, const SaturationConfig& cfg, int m) {
    SaturationVerdict v;
    const auto P = prepare(spec, m);
    v.m = m;
    v.sup = P.sup;
    v.level_tolerance = P.tol;
    auto note = [&](std::string s) { v.transcript.push_back(std::move(s)); };

    if (P.constant_modulus()) {
        v.verdict = Verdict::saturated;
        v.basis = Basis::constant_modulus;
        note("constant modulus: saturated");
        return v;
    }
    bool candidate = false;
    if (spec.outer.continuous()) {
        auto c = classify_continuous(spec, m);
        v.continuous = c.continuous;
        for (auto& s : c.transcript) note(s);
        if (c.verdict == Verdict::saturated) {
            v.verdict = Verdict::saturated;
            v.basis = Basis::continuous;
            return v;
        }
        candidate = true;
    } else {
        note("outer modulus not declared continuous: continuity criterion skipped");
    }
    v.badapp = badapp_hypothesis(spec, cfg.delta_grid, m);
    if (v.badapp->pass) {
        v.verdict = Verdict::saturated;
        v.basis = Basis::badapp;
        note("sigma(I) meets an open arc of L+(delta) at every sampled delta");
        return v;
    }
    note("badapp hypothesis fails at some sampled delta");
    if (cfg.arcs) {
        try {
            v.outer = outer_hypothesis(spec, *cfg.arcs, cfg.outer_a, cfg.outer_b,
                                       std::max(m, cfg.outer_grid_exponent));
            if (v.outer->pass) {
                v.verdict = Verdict::saturated;
                v.basis = Basis::outer;
                note("outer hypotheses hold on the configured arc family");
                return v;
            }
            note("outer hypotheses fail on the configured arc family");
        } catch (const ResolutionError& e) {
            note(std::string("outer hypotheses not checked: ") + e.what() + " (need m = " +
                 std::to_string(e.required_grid_exponent()) + ")");
        }
    }
    ImproverConfig ic;
    ic.grid_exponent = m;
    ic.margin_target = cfg.improver_margin_rel * P.sup;
    for (double d : cfg.improver_deltas) {
        try {
            auto r = construct_improver(spec, d, ic);
            if (r.success) {
                note("improver at delta = " + fmt(d) + " lowers the sup by " + fmt(r.gain));
                v.verdict = Verdict::not_saturated;
                v.basis = Basis::improver;
                v.improver = std::move(r);
                return v;
            }
            note("improver at delta = " + fmt(d) + " failed" +
                 (r.diagnostics.empty() ? "" : ": " + r.diagnostics.back()));
            if (!v.improver) v.improver = std::move(r);
        } catch (const PreconditionError& e) {
            note("improver at delta = " + fmt(d) + ": " + e.what());
        } catch (const ResolutionError& e) {
            note("improver at delta = " + fmt(d) + ": " + e.what());
        }
    }
    if (candidate) note("continuity criterion predicts not saturated, but no improver was verified");
    return v;
}

}  // namespace

SaturationVerdict saturation_verdict(const SymbolSpec& spec, const SaturationConfig& cfg) {
    SaturationVerdict v;
    try {
        v = verdict_at(spec, cfg, cfg.grid_exponent);
    } catch (const GridError& e) {
        v = verdict_at(spec, cfg, e.suggested_grid_exponent());
        v.transcript.insert(v.transcript.begin(), std::string(e.what()) + "; moved to m = " +
                                                      std::to_string(e.suggested_grid_exponent()));
    }
    if (cfg.include_gaps) {
        try {
            v.gaps = gap_report(spec, cfg.gap);
        } catch (const Error& e) {
            v.transcript.push_back(std::string("gap report unavailable: ") + e.what());
        }
    }
    return v;
}

}  // namespace hsat
