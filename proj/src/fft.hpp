#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace riesz::detail {

enum class FftSign { forward = -1, backward = +1 };

// Unnormalized in-place DFT of an M or M x M row-major array.
void fft_inplace(std::span<std::complex<double>> data, int dimension, std::size_t m,
                 FftSign sign);

}  // namespace riesz::detail
