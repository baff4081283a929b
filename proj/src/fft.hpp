#pragma once

#include <complex>
#include <span>

namespace hsat::detail {

/// In-place unnormalized DFT: X_k = sum_j x_j exp(-2 pi i jk/n).
void fft_forward(std::span<std::complex<double>> data);
/// In-place unnormalized inverse DFT (no 1/n factor).
void fft_backward(std::span<std::complex<double>> data);

}  // namespace hsat::detail
