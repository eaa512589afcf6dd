#pragma once

#include <complex>
#include <span>
#include <vector>

namespace irsense {

using cd = std::complex<double>;

/// X[n] = sum_t x[t] exp(-j 2 pi n t / N), unnormalized.
std::vector<cd> dft(std::span<const cd> x);

/// x[t] = sum_n X[n] exp(+j 2 pi n t / N), unnormalized (no 1/N).
std::vector<cd> idft_unnormalized(std::span<const cd> x);

}  // namespace irsense
