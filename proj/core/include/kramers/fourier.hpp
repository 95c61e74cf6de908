#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kramers::fourier {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

// Unitary transforms with x̂_k = N^{-1/2} Σ_j x_j e^{-2πi jk/N}, j = 0..N-1.
// Power-of-two lengths go through an iterative radix-2 FFT, everything else
// through the direct O(N²) sum.
std::vector<Complex> forward(std::span<const Complex> x);
std::vector<Complex> inverse(std::span<const Complex> x_hat);

std::vector<Complex> forward_real(std::span<const double> x);

// Both paths are exposed so they can be checked against each other.
std::vector<Complex> dft(std::span<const Complex> x, bool inverse);
std::vector<Complex> fft_radix2(std::span<const Complex> x, bool inverse);

}  // namespace kramers::fourier
