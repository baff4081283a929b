#include "hsat/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "fft.hpp"
#include "hsat/errors.hpp"

namespace hsat {

void check_grid_exponent(int m) {
    if (m < kMinGridExp || m > kMaxGridExp) {
        throw ConfigError("grid exponent " + std::to_string(m) + " outside [" +
                          std::to_string(kMinGridExp) + ", " + std::to_string(kMaxGridExp) + "]");
    }
}

double wrap_angle(double theta) {
    double r = std::fmod(theta + std::numbers::pi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r - std::numbers::pi;
}

double circle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

namespace {

template <typename T>
T pairwise(std::span<const T> v) {
    if (v.size() <= 8) {
        T s{};
        for (const T& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

// Index of frequency n in FFT storage.
inline std::size_t fft_slot(long n, std::size_t M) {
    return static_cast<std::size_t>(n < 0 ? n + static_cast<long>(M) : n);
}

inline long frequency_of_slot(std::size_t k, std::size_t M) {
    return k < M / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(M);
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values); }
cplx pairwise_sum(std::span<const cplx> values) { return pairwise(values); }

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HANKEL_SATURATE_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(int m, std::vector<cplx> samples) : m_(m), samples_(std::move(samples)) {
    check_grid_exponent(m);
    if (samples_.size() != grid_size(m)) {
        throw ConfigError("grid function with " + std::to_string(samples_.size()) +
                          " samples does not match grid size " + std::to_string(grid_size(m)));
    }
    for (const cplx& s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("grid function samples must be finite");
        }
    }
}

GridFunction GridFunction::from_real(int m, std::span<const double> values) {
    std::vector<cplx> s(values.begin(), values.end());
    return GridFunction(m, std::move(s));
}

GridFunction GridFunction::sample(int m, const std::function<cplx(double)>& f) {
    check_grid_exponent(m);
    const std::size_t M = grid_size(m);
    std::vector<cplx> s(M);
    for (std::size_t j = 0; j < M; ++j) s[j] = f(node_angle(m, j));
    return GridFunction(m, std::move(s));
}

GridFunction GridFunction::constant(int m, cplx value) {
    check_grid_exponent(m);
    return GridFunction(m, std::vector<cplx>(grid_size(m), value));
}

bool GridFunction::is_real(double tol) const {
    const double scale = std::max(1.0, sup_modulus());
    return std::all_of(samples_.begin(), samples_.end(),
                       [&](const cplx& s) { return std::abs(s.imag()) <= tol * scale; });
}

std::vector<double> GridFunction::real_part() const {
    std::vector<double> r(samples_.size());
    std::transform(samples_.begin(), samples_.end(), r.begin(), [](const cplx& s) { return s.real(); });
    return r;
}

std::vector<double> GridFunction::modulus() const {
    std::vector<double> r(samples_.size());
    std::transform(samples_.begin(), samples_.end(), r.begin(), [](const cplx& s) { return std::abs(s); });
    return r;
}

double GridFunction::sup_modulus() const {
    double s = 0.0;
    for (const cplx& v : samples_) s = std::max(s, std::abs(v));
    return s;
}

FourierCoefficients::FourierCoefficients(int m, std::vector<cplx> by_index)
    : m_(m), coeffs_(std::move(by_index)) {
    check_grid_exponent(m);
    if (coeffs_.size() != grid_size(m)) throw ConfigError("coefficient count does not match grid size");
}

// ---------------------------------------------------------------------------

FourierCoefficients transform(const GridFunction& g) {
    const int m = g.exponent();
    const std::size_t M = g.size();
    std::vector<cplx> work(g.samples().begin(), g.samples().end());
    detail::fft_forward(work);
    std::vector<cplx> out(M);
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t k = 0; k < M; ++k) {
        const long n = frequency_of_slot(k, M);
        const cplx twiddle = std::polar(1.0, -std::numbers::pi * static_cast<double>(n) / static_cast<double>(M));
        out[static_cast<std::size_t>(n + static_cast<long>(M / 2))] = work[k] * twiddle * inv;
    }
    return FourierCoefficients(m, std::move(out));
}

GridFunction inverse(const FourierCoefficients& c) {
    const std::size_t M = c.size();
    std::vector<cplx> work(M);
    for (long n = c.min_index(); n <= c.max_index(); ++n) {
        const cplx twiddle = std::polar(1.0, std::numbers::pi * static_cast<double>(n) / static_cast<double>(M));
        work[fft_slot(n, M)] = c(n) * twiddle;
    }
    detail::fft_backward(work);
    return GridFunction(c.exponent(), std::move(work));
}

namespace {

// Applies a real-frequency multiplier in FFT slot space. The offset-grid
// phase factors cancel for diagonal multipliers, so they are skipped.
template <typename Mult>
std::vector<cplx> apply_multiplier(std::span<const cplx> samples, Mult&& mult) {
    const std::size_t M = samples.size();
    std::vector<cplx> work(samples.begin(), samples.end());
    detail::fft_forward(work);
    for (std::size_t k = 0; k < M; ++k) work[k] *= mult(frequency_of_slot(k, M));
    detail::fft_backward(work);
    const double inv = 1.0 / static_cast<double>(M);
    for (cplx& w : work) w *= inv;
    return work;
}

}  // namespace

std::vector<double> conjugate_function(int m, std::span<const double> u) {
    check_grid_exponent(m);
    const std::size_t M = grid_size(m);
    if (u.size() != M) throw ConfigError("conjugate_function: sample count does not match grid");
    std::vector<cplx> s(u.begin(), u.end());
    const long nyquist = -static_cast<long>(M / 2);
    auto out = apply_multiplier(s, [nyquist](long n) -> cplx {
        if (n == 0 || n == nyquist) return {0.0, 0.0};
        return n > 0 ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
    });
    std::vector<double> r(M);
    for (std::size_t j = 0; j < M; ++j) r[j] = out[j].real();
    return r;
}

GridFunction conjugate_function(const GridFunction& u) {
    if (!u.is_real()) throw DomainError("conjugate_function requires a real-valued input");
    const auto re = u.real_part();
    const auto r = conjugate_function(u.exponent(), re);
    return GridFunction::from_real(u.exponent(), r);
}

GridFunction project_analytic(const GridFunction& g) {
    auto out = apply_multiplier(g.samples(), [](long n) { return n >= 0 ? cplx{1.0} : cplx{0.0}; });
    return GridFunction(g.exponent(), std::move(out));
}

GridFunction project_coanalytic(const GridFunction& g) {
    auto out = apply_multiplier(g.samples(), [](long n) { return n <= 0 ? cplx{1.0} : cplx{0.0}; });
    return GridFunction(g.exponent(), std::move(out));
}

NormBundle norms(const GridFunction& g) {
    const auto c = transform(g);
    const std::size_t M = g.size();
    std::vector<double> energy(M);
    std::vector<double> tail(M, 0.0);
    const long quarter = static_cast<long>(M / 4);
    for (long n = c.min_index(); n <= c.max_index(); ++n) {
        const auto i = static_cast<std::size_t>(n - c.min_index());
        energy[i] = std::norm(c(n));
        if (std::labs(n) > quarter) tail[i] = energy[i];
    }
    const auto mod = g.modulus();
    NormBundle b;
    b.m = g.exponent();
    b.l2 = std::sqrt(pairwise_sum(energy));
    b.l1 = pairwise_sum(mod) / static_cast<double>(M);
    b.sup = *std::max_element(mod.begin(), mod.end());
    b.tail_energy = pairwise_sum(tail);
    return b;
}

namespace {

double frequency_fraction(const FourierCoefficients& c, bool include_zero) {
    std::vector<double> all(c.size());
    std::vector<double> neg(c.size(), 0.0);
    for (long n = c.min_index(); n <= c.max_index(); ++n) {
        const auto i = static_cast<std::size_t>(n - c.min_index());
        all[i] = std::norm(c(n));
        if (n < 0 || (include_zero && n == 0)) neg[i] = all[i];
    }
    const double total = pairwise_sum(all);
    return total > 0.0 ? pairwise_sum(neg) / total : 0.0;
}

}  // namespace

double negative_frequency_fraction(const FourierCoefficients& c) { return frequency_fraction(c, false); }
double nonpositive_frequency_fraction(const FourierCoefficients& c) { return frequency_fraction(c, true); }

}  // namespace hsat
