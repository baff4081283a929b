#pragma once

// Weights on the circle: apical certificates w = exp(u + v) with |v~| small on
// a super-level set, A2 diagnostics, thin arc families and the w_kappa family.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsat/factorization.hpp"
#include "hsat/level_sets.hpp"

namespace hsat {

inline constexpr double kDefaultApicalMargin = 0.05;
inline constexpr double kStabilityGate = 0.02;
inline constexpr double kA2GrowthRatio = 1.5;

/// Weight given by a log-modulus descriptor, floored at -floor_exponent.
struct WeightSpec {
    OuterSpec log_weight;
    double floor_exponent = kDefaultFloorExponent;

    std::vector<double> log_samples(int m) const;
    GridFunction sample(int m) const;
    bool exact() const { return log_weight.exact(); }
    double level_tolerance() const { return exact() ? kExactLevelTol : kSampledLevelTol; }
};

enum class Provenance { numeric_split, lemma_distance, claim_construction };
enum class CertificateStatus { pass, fail, undecided };

std::string to_string(Provenance p);
std::string to_string(CertificateStatus s);

struct ApicalCertificate {
    int m = 0;
    double delta = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    double sup_vtilde = 0.0;  ///< max |v~| over L+_w(delta)
    double margin = kDefaultApicalMargin;
    bool pass = false;  ///< sup_vtilde (or the analytic bound) < pi/2 - margin
    CertificateStatus status = CertificateStatus::fail;
    Provenance provenance = Provenance::numeric_split;
    double u_sup = 0.0;  ///< ||u||_inf
    double v_l1 = 0.0;  ///< grid mean of |v|
    double reconstruction_error = 0.0;  ///< max relative |exp(u + v) - w|

    // lemma_distance
    double distance = 0.0;  ///< dist(L+(delta), L-(epsilon)); +inf when L-(epsilon) is empty
    double analytic_bound = 0.0;
    double floor_exponent = 0.0;  ///< R with exp(-R) <= epsilon

    /// sup_vtilde recomputed at m + 1, when the weight can be resampled.
    std::optional<double> refined_sup_vtilde;
};

/// Certificate for a given split; throws DomainError unless exp(u + v) = w to 1e-8.
ApicalCertificate apical_certificate(const GridFunction& w, double delta, std::span<const double> u,
                                     std::span<const double> v, double margin = kDefaultApicalMargin,
                                     double tolerance = kExactLevelTol);

/// Split u = max(log w, -R), v = R + min(log w, -R) (w normalized by its sup)
/// when L+(delta) and L-(epsilon) are separated. Throws InapplicableError when
/// the distance is below 4 grid spacings.
ApicalCertificate apical_from_distance(const WeightSpec& w, double delta, double epsilon, int m,
                                       double margin = kDefaultApicalMargin, bool stability_check = true);
ApicalCertificate apical_from_distance_log(int m, std::span<const double> log_w, double delta, double epsilon,
                                           double margin = kDefaultApicalMargin,
                                           double tolerance = kExactLevelTol);

struct A2Report {
    int max_depth = 0;
    std::vector<double> per_depth;  ///< sup over dyadic arcs of depth k
    std::vector<double> cumulative;  ///< sup over depths <= k (nondecreasing)
    double estimate = 0.0;
    bool growing = false;  ///< cumulative sup grows by > kA2GrowthRatio over some 3 consecutive depths
};

/// sup over dyadic arcs down to max_depth of avg(w) * avg(1/w), 1/w floored.
A2Report estimate_a2(const GridFunction& w, int max_depth, double floor_exponent = kDefaultFloorExponent);
A2Report estimate_a2(const WeightSpec& w, int m, int max_depth);

struct ThinArc {
    double center = 0.0;  ///< radians
    double length = 0.0;  ///< normalized: arc length / (2 pi)
};

struct ThinSetSpec {
    std::vector<ThinArc> arcs;

    /// Gamma_n = {2^-n < theta < 2^-n + a b^n}, n = 1..count.
    static ThinSetSpec dyadic(double a, double b, int count);
    void validate() const;
    double total_measure() const;
};

struct ThinnessReport {
    int m = 0;
    std::size_t n_terms = 0;
    double margin = 0.0;
    std::vector<double> partial;  ///< margin using the first k arcs, k = 1..n_terms
    std::size_t block = 3;
    std::vector<double> block_ratios;  ///< successive block increment ratios
    bool stabilizes = false;  ///< every block ratio <= 0.8
};

/// sup over nodes off U of sum_{n <= n_terms} |Gamma_n| / dist(theta, Gamma_n / 2),
/// distances normalized by 2 pi.
ThinnessReport thinness_margin(const ThinSetSpec& U, std::size_t n_terms, int m = 18, std::size_t block = 3);

/// w = (|theta - theta_n| / (pi |Gamma_n|))^kappa on Gamma_n, 1 off U.
WeightSpec build_w_kappa(const ThinSetSpec& U, double kappa, double floor_exponent = kDefaultFloorExponent);

struct ClaimConfig {
    int m = 17;
    std::size_t n_terms = 12;
    double margin = kDefaultApicalMargin;
    double floor_exponent = kDefaultFloorExponent;
    bool stability_check = true;
};

struct ArcIntegral {
    std::size_t n = 0;
    double quadrature = 0.0;  ///< normalized integral of |v_eps| over eps Gamma_n
    double grid = 0.0;  ///< grid Riemann sum of the same
    double envelope = 0.0;  ///< kappa eps |log eps| |Gamma_n|
};

struct ClaimReport {
    double kappa = 0.0;
    double epsilon = 0.0;
    double epsilon_kappa = 0.0;  ///< largest eps with eps Gamma_n inside L-(1/4)
    bool epsilon_admissible = false;
    std::vector<ArcIntegral> arcs;
    double fitted_constant = 0.0;  ///< max over arcs of quadrature / envelope
    ThinnessReport thinness;
    ApicalCertificate certificate;
    std::vector<std::string> flags;
    bool pass = false;
};

/// u_eps = 0 on U_eps = union of eps Gamma_n, log w elsewhere; v_eps = log w - u_eps.
ClaimReport verify_claim(const ThinSetSpec& U, double kappa, double epsilon, const ClaimConfig& cfg = {});

/// Largest eps (by bisection) such that w < level * sup on every eps Gamma_n.
double claim_epsilon(const ThinSetSpec& U, double kappa, double level = 0.25);

}  // namespace hsat
