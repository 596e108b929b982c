#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qwalk::detail {

/// Unnormalized DFT with positive exponent: out[k] = sum_j in[j] exp(+2 pi i j k / n).
std::vector<std::complex<double>> dft_positive(std::span<const std::complex<double>> in);

} // namespace qwalk::detail
