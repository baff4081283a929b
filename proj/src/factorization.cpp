#include "hsat/factorization.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsat/errors.hpp"

namespace hsat {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kRootOnCircleTol = 1e-6;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Angle reduced to [0, 2*pi).
double wrap_positive(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

// Roots of the polynomial on the unit circle, clustered, as logarithmic zeros.
std::vector<LogZero> unimodular_roots(const std::vector<cplx>& coeffs) {
    std::size_t lo = 0;
    std::size_t hi = coeffs.size();
    while (lo < hi && coeffs[lo] == cplx{}) ++lo;
    while (hi > lo && coeffs[hi - 1] == cplx{}) --hi;
    if (hi - lo < 2) return {};
    const auto d = static_cast<Eigen::Index>(hi - lo - 1);
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    const cplx lead = coeffs[hi - 1];
    for (Eigen::Index i = 0; i < d; ++i) {
        comp(0, i) = -coeffs[hi - 2 - static_cast<std::size_t>(i)] / lead;
        if (i + 1 < d) comp(i + 1, i) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<LogZero> out;
    for (Eigen::Index i = 0; i < d; ++i) {
        const cplx r = es.eigenvalues()(i);
        if (std::abs(std::abs(r) - 1.0) > kRootOnCircleTol) continue;
        const double a = std::arg(r);
        auto hit = std::find_if(out.begin(), out.end(),
                                [&](const LogZero& z) { return circle_distance(z.angle, a) < kRootOnCircleTol; });
        if (hit != out.end()) {
            hit->order += 1.0;
        } else {
            out.push_back({a, 1.0});
        }
    }
    return out;
}

double log_modulus_at_factor(const ModulusFactor& f, double theta) {
    return std::visit(
        overloaded{
            [&](const PolyModulus& p) { return std::log(std::abs(horner(p.coeffs, std::polar(1.0, theta)))); },
            [&](const TrigLogModulus& t) {
                double s = t.constant;
                for (std::size_t k = 0; k < t.cos.size(); ++k) s += t.cos[k] * std::cos(double(k + 1) * theta);
                for (std::size_t k = 0; k < t.sin.size(); ++k) s += t.sin[k] * std::sin(double(k + 1) * theta);
                return s;
            },
            [&](const PowerDistance& p) {
                return p.exponent * std::log(2.0 * std::abs(std::sin(0.5 * (theta - p.angle))));
            },
        },
        f);
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------

void BlaschkeSpec::validate() const {
    for (const auto& z : zeros) {
        require_finite(z.a.real(), "Blaschke zero");
        require_finite(z.a.imag(), "Blaschke zero");
        if (std::abs(z.a) >= 1.0 - kUnitTol) throw ConfigError("Blaschke zero must lie inside the unit disc");
        if (z.multiplicity < 1) throw ConfigError("Blaschke zero multiplicity must be positive");
    }
    for (double a : accumulation) require_finite(a, "accumulation angle");
}

BlaschkeSpec BlaschkeFamily::truncate(int count) const {
    if (!zero) throw ConfigError("Blaschke family has no zero parametrization");
    if (count < 0) throw ConfigError("truncation count must be non-negative");
    if (accumulation.empty()) throw ConfigError("infinite Blaschke family must declare its accumulation points");
    for (double alpha : accumulation) {
        require_finite(alpha, "accumulation angle");
        const cplx target = std::polar(1.0, alpha);
        double best = std::numeric_limits<double>::infinity();
        for (int j = 4; j <= 30; ++j) best = std::min(best, std::abs(zero(1 << j) - target));
        if (!(best <= 1e-6)) {
            throw ConfigError("declared accumulation point at angle " + std::to_string(alpha) +
                              " is not approached by the zero family");
        }
    }
    BlaschkeSpec b;
    b.accumulation = accumulation;
    b.zeros.reserve(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) b.zeros.push_back({zero(k), 1});
    b.validate();
    return b;
}

void SingularSpec::validate() const {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        require_finite(atoms[i].angle, "atom angle");
        if (!(atoms[i].mass > 0.0) || !std::isfinite(atoms[i].mass)) {
            throw ConfigError("atom mass must be positive and finite");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (circle_distance(atoms[i].angle, atoms[j].angle) < kUnitTol) {
                throw ConfigError("singular atoms must be pairwise distinct");
            }
        }
    }
}

// ---------------------------------------------------------------------------

bool ModulusPiece::contains(double theta) const {
    const double span = end - start;
    if (span >= kTwoPi) return true;
    return wrap_positive(theta - start) <= wrap_positive(span);
}

double ModulusPiece::log_modulus(double theta) const {
    if (kind == Kind::constant) return std::log(value);
    return exponent * std::log(circle_distance(theta, center) / scale);
}

std::string OuterSpec::kind() const {
    return std::visit(overloaded{[](const FormulaModulus&) { return std::string("formula"); },
                                 [](const PiecewiseModulus&) { return std::string("piecewise"); },
                                 [](const GridLogModulus&) { return std::string("grid"); }},
                      rep_);
}

std::vector<double> OuterSpec::log_modulus(int m) const {
    check_grid_exponent(m);
    const std::size_t M = grid_size(m);
    return std::visit(
        overloaded{
            [&](const FormulaModulus& f) {
                std::vector<double> u(M, 0.0);
                for (std::size_t j = 0; j < M; ++j) {
                    const double t = node_angle(m, j);
                    for (const auto& fac : f.factors) u[j] += log_modulus_at_factor(fac, t);
                }
                return u;
            },
            [&](const PiecewiseModulus& p) {
                std::vector<double> u(M, std::log(p.default_modulus));
                for (std::size_t j = 0; j < M; ++j) {
                    const double t = node_angle(m, j);
                    for (const auto& piece : p.pieces) {
                        if (piece.contains(t)) {
                            u[j] = piece.log_modulus(t);
                            break;
                        }
                    }
                }
                return u;
            },
            [&](const GridLogModulus& g) {
                if (g.m == m) return g.values;
                return resample_real(g.values, g.m, m);
            },
        },
        rep_);
}

double OuterSpec::log_modulus_at(double theta) const {
    return std::visit(
        overloaded{
            [&](const FormulaModulus& f) {
                double u = 0.0;
                for (const auto& fac : f.factors) u += log_modulus_at_factor(fac, theta);
                return u;
            },
            [&](const PiecewiseModulus& p) {
                for (const auto& piece : p.pieces) {
                    if (piece.contains(theta)) return piece.log_modulus(theta);
                }
                return std::log(p.default_modulus);
            },
            [](const GridLogModulus&) -> double {
                throw ConfigError("pointwise evaluation needs a closed-form modulus");
            },
        },
        rep_);
}

bool OuterSpec::exact() const { return !std::holds_alternative<GridLogModulus>(rep_); }

bool OuterSpec::continuous() const {
    return std::visit(overloaded{[](const FormulaModulus&) { return true; },
                                 [](const PiecewiseModulus& p) { return p.continuous; },
                                 [](const GridLogModulus& g) { return g.continuous; }},
                      rep_);
}

std::vector<LogZero> OuterSpec::log_zeros() const {
    std::vector<LogZero> out;
    auto add = [&out](LogZero z) {
        auto hit = std::find_if(out.begin(), out.end(),
                                [&](const LogZero& o) { return circle_distance(o.angle, z.angle) < kRootOnCircleTol; });
        if (hit != out.end()) {
            hit->order += z.order;
        } else {
            out.push_back(z);
        }
    };
    std::visit(overloaded{
                   [&](const FormulaModulus& f) {
                       for (const auto& fac : f.factors) {
                           if (const auto* p = std::get_if<PolyModulus>(&fac)) {
                               for (const auto& z : unimodular_roots(p->coeffs)) add(z);
                           } else if (const auto* d = std::get_if<PowerDistance>(&fac)) {
                               add({d->angle, d->exponent});
                           }
                       }
                   },
                   [&](const PiecewiseModulus& p) {
                       for (const auto& piece : p.pieces) {
                           if (piece.kind == ModulusPiece::Kind::power && piece.contains(piece.center)) {
                               add({piece.center, piece.exponent});
                           }
                       }
                   },
                   [](const GridLogModulus&) {},
               },
               rep_);
    return out;
}

void OuterSpec::validate() const {
    std::visit(overloaded{
                   [](const FormulaModulus& f) {
                       for (const auto& fac : f.factors) {
                           std::visit(overloaded{
                                          [](const PolyModulus& p) {
                                              bool any = false;
                                              for (const auto& c : p.coeffs) {
                                                  require_finite(c.real(), "polynomial coefficient");
                                                  require_finite(c.imag(), "polynomial coefficient");
                                                  any = any || c != cplx{};
                                              }
                                              if (!any) throw DomainError("polynomial modulus is identically zero");
                                          },
                                          [](const TrigLogModulus& t) {
                                              require_finite(t.constant, "log-modulus constant");
                                              for (double c : t.cos) require_finite(c, "log-modulus coefficient");
                                              for (double s : t.sin) require_finite(s, "log-modulus coefficient");
                                          },
                                          [](const PowerDistance& d) {
                                              require_finite(d.angle, "power angle");
                                              if (!(d.exponent > 0.0) || !std::isfinite(d.exponent)) {
                                                  throw ConfigError("power exponent must be positive");
                                              }
                                          },
                                      },
                                      fac);
                       }
                   },
                   [](const PiecewiseModulus& p) {
                       if (!(p.default_modulus > 0.0) || !std::isfinite(p.default_modulus)) {
                           throw ConfigError("default modulus must be positive and finite");
                       }
                       for (const auto& piece : p.pieces) {
                           require_finite(piece.start, "piece start");
                           require_finite(piece.end, "piece end");
                           if (piece.kind == ModulusPiece::Kind::constant) {
                               if (!(piece.value >= 0.0) || !std::isfinite(piece.value)) {
                                   throw ConfigError("piece modulus must be non-negative and finite");
                               }
                           } else {
                               require_finite(piece.center, "piece center");
                               if (!(piece.scale > 0.0) || !std::isfinite(piece.scale)) {
                                   throw ConfigError("piece scale must be positive");
                               }
                               if (!(piece.exponent > 0.0) || !std::isfinite(piece.exponent)) {
                                   throw ConfigError("piece exponent must be positive");
                               }
                           }
                       }
                   },
                   [](const GridLogModulus& g) {
                       check_grid_exponent(g.m);
                       if (g.values.size() != grid_size(g.m)) {
                           throw ConfigError("grid log-modulus has the wrong number of samples");
                       }
                       for (double v : g.values) {
                           if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
                               throw DomainError("grid log-modulus must be bounded above");
                           }
                       }
                   },
               },
               rep_);
}

OuterSpec OuterSpec::rotated(double alpha) const {
    return std::visit(
        overloaded{
            [&](const FormulaModulus& f) {
                FormulaModulus r;
                for (const auto& fac : f.factors) {
                    r.factors.push_back(std::visit(
                        overloaded{
                            [&](const PolyModulus& p) -> ModulusFactor {
                                PolyModulus q = p;
                                for (std::size_t k = 0; k < q.coeffs.size(); ++k) {
                                    q.coeffs[k] *= std::polar(1.0, -static_cast<double>(k) * alpha);
                                }
                                return q;
                            },
                            [&](const TrigLogModulus& t) -> ModulusFactor {
                                TrigLogModulus q;
                                q.constant = t.constant;
                                const std::size_t K = std::max(t.cos.size(), t.sin.size());
                                q.cos.assign(K, 0.0);
                                q.sin.assign(K, 0.0);
                                for (std::size_t k = 0; k < K; ++k) {
                                    const double a = k < t.cos.size() ? t.cos[k] : 0.0;
                                    const double b = k < t.sin.size() ? t.sin[k] : 0.0;
                                    const double ka = static_cast<double>(k + 1) * alpha;
                                    q.cos[k] = a * std::cos(ka) - b * std::sin(ka);
                                    q.sin[k] = a * std::sin(ka) + b * std::cos(ka);
                                }
                                return q;
                            },
                            [&](const PowerDistance& d) -> ModulusFactor {
                                return PowerDistance{d.angle + alpha, d.exponent};
                            },
                        },
                        fac));
                }
                return OuterSpec(r);
            },
            [&](const PiecewiseModulus& p) {
                PiecewiseModulus r = p;
                for (auto& piece : r.pieces) {
                    piece.start += alpha;
                    piece.end += alpha;
                    piece.center += alpha;
                }
                return OuterSpec(r);
            },
            [&](const GridLogModulus& g) {
                auto c = transform(GridFunction::from_real(g.m, g.values));
                for (long n = c.min_index(); n <= c.max_index(); ++n) {
                    c(n) *= n == c.min_index() ? cplx{} : std::polar(1.0, -static_cast<double>(n) * alpha);
                }
                GridLogModulus r = g;
                r.values = inverse(c).real_part();
                return OuterSpec(r);
            },
        },
        rep_);
}

// ---------------------------------------------------------------------------

void SymbolSpec::validate() const {
    require_finite(constant.real(), "constant");
    require_finite(constant.imag(), "constant");
    blaschke.validate();
    singular.validate();
    outer.validate();
}

SymbolSpec SymbolSpec::rotated(double alpha) const {
    SymbolSpec r = *this;
    const cplx rot = std::polar(1.0, alpha);
    for (auto& z : r.blaschke.zeros) {
        if (z.a == cplx{}) {
            // z -> e^{-i alpha} z leaves a unimodular constant behind
            r.constant *= std::polar(1.0, -alpha * z.multiplicity);
        } else {
            z.a *= rot;
        }
    }
    for (double& a : r.blaschke.accumulation) a += alpha;
    for (auto& atom : r.singular.atoms) atom.angle += alpha;
    r.outer = outer.rotated(alpha);
    return r;
}

SymbolSpec SymbolSpec::scaled(cplx c) const {
    SymbolSpec r = *this;
    r.constant *= c;
    return r;
}

// ---------------------------------------------------------------------------

GridFunction outer_from_log_modulus(int m, std::span<const double> log_w, std::span<const LogZero> hints) {
    check_grid_exponent(m);
    const std::size_t M = grid_size(m);
    if (log_w.size() != M) throw ConfigError("log-modulus sample count does not match grid");
    for (std::size_t j = 0; j < M; ++j) {
        if (!std::isfinite(log_w[j])) {
            throw DomainError("modulus must be positive and finite at node " + std::to_string(j));
        }
    }
    // Split off the logarithmic singularities: log|1 - e^{ix}| has conjugate
    // (x mod 2 pi - pi) / 2.
    std::vector<double> rest(log_w.begin(), log_w.end());
    std::vector<double> conj_sing(M, 0.0);
    for (const auto& h : hints) {
        for (std::size_t j = 0; j < M; ++j) {
            const double x = wrap_positive(node_angle(m, j) - h.angle);
            rest[j] -= h.order * std::log(2.0 * std::abs(std::sin(0.5 * x)));
            conj_sing[j] += h.order * 0.5 * (x - std::numbers::pi);
        }
    }
    const auto conj_rest = conjugate_function(m, rest);
    std::vector<cplx> phi(M);
    for (std::size_t j = 0; j < M; ++j) {
        phi[j] = std::exp(cplx{log_w[j], conj_rest[j] + conj_sing[j]});
    }
    return GridFunction(m, std::move(phi));
}

GridFunction outer_from_modulus(const GridFunction& w, std::span<const LogZero> hints) {
    if (!w.is_real()) throw DomainError("modulus must be real-valued");
    std::vector<double> u(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double v = w[j].real();
        if (!(v > 0.0)) throw DomainError("modulus must be positive at node " + std::to_string(j));
        u[j] = std::log(v);
    }
    return outer_from_log_modulus(w.exponent(), u, hints);
}

cplx eval_inner_boundary(const BlaschkeSpec& b, const SingularSpec& s, double theta) {
    const cplx z = std::polar(1.0, theta);
    cplx out{1.0, 0.0};
    for (const auto& zero : b.zeros) {
        cplx f;
        if (zero.a == cplx{}) {
            f = z;
        } else {
            const double r = std::abs(zero.a);
            f = (r / zero.a) * (zero.a - z) / (1.0 - std::conj(zero.a) * z);
        }
        for (int k = 0; k < zero.multiplicity; ++k) out *= f;
    }
    double phase = 0.0;
    for (const auto& atom : s.atoms) {
        const double half = 0.5 * (theta - atom.angle);
        const double sn = std::sin(half);
        if (sn == 0.0 || circle_distance(theta, atom.angle) == 0.0) {
            throw EvaluationError("inner factor evaluated at a singular atom (angle " +
                                  std::to_string(atom.angle) + ")");
        }
        phase -= atom.mass * std::cos(half) / sn;
    }
    return out * std::polar(1.0, phase);
}

std::vector<double> spectrum(const BlaschkeSpec& b, const SingularSpec& s) {
    std::vector<double> pts;
    for (double a : b.accumulation) pts.push_back(wrap_angle(a));
    for (const auto& atom : s.atoms) pts.push_back(wrap_angle(atom.angle));
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (out.empty() || circle_distance(out.back(), p) > kUnitTol) out.push_back(p);
    }
    if (out.size() > 1 && circle_distance(out.front(), out.back()) <= kUnitTol) out.pop_back();
    return out;
}

SymbolSamples build_symbol(const SymbolSpec& spec, int m, double floor_exponent) {
    check_grid_exponent(m);
    if (!(floor_exponent > 0.0) || !std::isfinite(floor_exponent)) {
        throw ConfigError("floor exponent must be positive");
    }
    const std::size_t M = grid_size(m);
    const double spacing = kTwoPi / static_cast<double>(M);
    for (const auto& atom : spec.singular.atoms) {
        for (std::size_t j = 0; j < M; ++j) {
            if (circle_distance(node_angle(m, j), atom.angle) < 1e-9 * spacing) {
                throw GridError("singular atom at angle " + std::to_string(atom.angle) + " sits on a grid node",
                                m + 1 <= kMaxGridExp ? m + 1 : m - 1);
            }
        }
    }

    SymbolSamples out{GridFunction::constant(m, 0.0), GridFunction::constant(m, 0.0),
                      GridFunction::constant(m, 0.0), {}, {}};
    out.floor.floor_log = -floor_exponent;
    out.log_modulus = spec.outer.log_modulus(m);
    for (double& u : out.log_modulus) {
        if (std::isnan(u)) throw DomainError("log-modulus is undefined at a grid node");
        if (u < -floor_exponent) {
            u = -floor_exponent;
            ++out.floor.floored_nodes;
        }
    }
    const auto hints = spec.outer.log_zeros();
    out.outer = outer_from_log_modulus(m, out.log_modulus, hints);

    std::vector<cplx> inner(M);
    std::vector<cplx> phi(M);
    for (std::size_t j = 0; j < M; ++j) {
        inner[j] = eval_inner_boundary(spec.blaschke, spec.singular, node_angle(m, j));
        phi[j] = spec.constant * inner[j] * out.outer[j];
    }
    out.inner = GridFunction(m, std::move(inner));
    out.phi = GridFunction(m, std::move(phi));
    return out;
}

GridFunction compose_symbol(const SymbolSpec& spec, int m) { return build_symbol(spec, m).phi; }

GridFunction sample_spec(const SymbolSpec& spec, int m) {
    spec.validate();
    return compose_symbol(spec, m);
}

std::vector<double> resample_real(std::span<const double> values, int from_m, int to_m) {
    check_grid_exponent(from_m);
    check_grid_exponent(to_m);
    if (values.size() != grid_size(from_m)) throw ConfigError("resample: sample count does not match grid");
    const auto src = transform(GridFunction::from_real(from_m, values));
    std::vector<cplx> dst(grid_size(to_m));
    FourierCoefficients c(to_m, std::move(dst));
    // Nyquist modes are dropped: they are not symmetric on either grid.
    const long keep = std::min(-src.min_index(), -c.min_index()) - 1;
    for (long n = -keep; n <= keep; ++n) c(n) = src(n);
    return inverse(c).real_part();
}

}  // namespace hsat
