#pragma once

// Inner and outer building blocks and their composition phi = C * B * S * Phi.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hsat/symbol.hpp"

namespace hsat {

inline constexpr double kDefaultFloorExponent = 40.0;  // R_max

struct BlaschkeZero {
    cplx a;
    int multiplicity = 1;
};

/// Finite Blaschke product, or a finite truncation of an infinite one together
/// with its declared accumulation points (angles in radians).
struct BlaschkeSpec {
    std::vector<BlaschkeZero> zeros;
    std::vector<double> accumulation;

    void validate() const;
};

/// Parametrized infinite zero family k -> a_k (k >= 1). `truncate` keeps the
/// first `count` zeros and checks every declared accumulation point against
/// the tail of the family.
struct BlaschkeFamily {
    std::function<cplx(int)> zero;
    std::vector<double> accumulation;

    BlaschkeSpec truncate(int count) const;
};

struct SingularAtom {
    double angle = 0.0;
    double mass = 1.0;
};

/// Singular inner function with a finite atomic measure.
struct SingularSpec {
    std::vector<SingularAtom> atoms;

    void validate() const;
};

/// Logarithmic zero of a modulus: |w| ~ |e^{i theta} - e^{i angle}|^order.
struct LogZero {
    double angle = 0.0;
    double order = 1.0;
};

/// |p(e^{i theta})| for a polynomial with ascending coefficients.
struct PolyModulus {
    std::vector<cplx> coeffs;
};

/// log-modulus a0 + sum_k (cos_k cos k theta + sin_k sin k theta), k >= 1.
struct TrigLogModulus {
    double constant = 0.0;
    std::vector<double> cos;
    std::vector<double> sin;
};

/// |e^{i theta} - e^{i angle}|^exponent with exponent > 0.
struct PowerDistance {
    double angle = 0.0;
    double exponent = 1.0;
};

using ModulusFactor = std::variant<PolyModulus, TrigLogModulus, PowerDistance>;

/// Product of closed-form factors; always continuous.
struct FormulaModulus {
    std::vector<ModulusFactor> factors;
};

struct ModulusPiece {
    enum class Kind { constant, power };
    Kind kind = Kind::constant;
    double start = 0.0;  ///< arc [start, end] traversed counterclockwise
    double end = 0.0;
    double value = 1.0;  ///< constant modulus
    double center = 0.0;  ///< power: (|theta - center| / scale)^exponent
    double scale = 1.0;
    double exponent = 1.0;

    bool contains(double theta) const;
    double log_modulus(double theta) const;
};

/// Modulus given arc by arc; first matching piece wins, `default_modulus`
/// elsewhere.
struct PiecewiseModulus {
    double default_modulus = 1.0;
    std::vector<ModulusPiece> pieces;
    bool continuous = false;
};

/// Sampled log-modulus; resampled spectrally to other grid sizes.
struct GridLogModulus {
    int m = 0;
    std::vector<double> values;
    bool continuous = false;
};

class OuterSpec {
public:
    using Representation = std::variant<FormulaModulus, PiecewiseModulus, GridLogModulus>;

    OuterSpec() = default;
    explicit OuterSpec(Representation rep) : rep_(std::move(rep)) {}

    const Representation& representation() const noexcept { return rep_; }
    std::string kind() const;

    /// Unfloored log|Phi| on the offset grid.
    std::vector<double> log_modulus(int m) const;
    /// Pointwise log|Phi(e^{i theta})|; closed-form descriptors only.
    double log_modulus_at(double theta) const;
    /// Closed-form descriptors (formula, piecewise) are exact; grids are sampled.
    bool exact() const;
    bool continuous() const;
    std::vector<LogZero> log_zeros() const;
    void validate() const;
    OuterSpec rotated(double alpha) const;

private:
    Representation rep_ = FormulaModulus{};
};

struct SymbolSpec {
    cplx constant{1.0, 0.0};
    BlaschkeSpec blaschke;
    SingularSpec singular;
    OuterSpec outer;

    void validate() const;
    /// phi(e^{i(theta - alpha)}).
    SymbolSpec rotated(double alpha) const;
    SymbolSpec scaled(cplx c) const;
};

struct FloorRecord {
    double floor_log = -kDefaultFloorExponent;
    std::size_t floored_nodes = 0;
};

struct SymbolSamples {
    GridFunction phi;
    GridFunction outer;
    GridFunction inner;  ///< B * S, unimodular
    std::vector<double> log_modulus;  ///< floored log|Phi|
    FloorRecord floor;
};

/// Phi = exp(u + i u~), u = log w. Known logarithmic zeros of w are split off
/// and conjugated in closed form; the remainder goes through the FFT.
GridFunction outer_from_modulus(const GridFunction& w, std::span<const LogZero> hints = {});
GridFunction outer_from_log_modulus(int m, std::span<const double> log_w,
                                    std::span<const LogZero> hints = {});

/// B(e^{i theta}) * S(e^{i theta}). Throws EvaluationError at an atom.
cplx eval_inner_boundary(const BlaschkeSpec& b, const SingularSpec& s, double theta);

/// sigma(I): declared accumulation points and atom locations, as angles in
/// [-pi, pi), sorted and deduplicated.
std::vector<double> spectrum(const BlaschkeSpec& b, const SingularSpec& s);

SymbolSamples build_symbol(const SymbolSpec& spec, int m, double floor_exponent = kDefaultFloorExponent);
GridFunction compose_symbol(const SymbolSpec& spec, int m);

/// compose_symbol with an explicit check that no atom coincides with a node.
GridFunction sample_spec(const SymbolSpec& spec, int m);

/// Spectral resampling of a real periodic sequence between grid sizes.
std::vector<double> resample_real(std::span<const double> values, int from_m, int to_m);

}  // namespace hsat
