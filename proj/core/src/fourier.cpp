#include "kramers/fourier.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace kramers::fourier {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<Complex> dft(std::span<const Complex> x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      // reduce jk mod N before forming the angle to keep the phase exact
      const auto m = static_cast<double>((j * k) % n);
      const double angle = sign * 2.0 * std::numbers::pi * m / static_cast<double>(n);
      acc += x[j] * Complex(std::cos(angle), std::sin(angle));
    }
    out[k] = acc * scale;
  }
  return out;
}

std::vector<Complex> fft_radix2(std::span<const Complex> x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<Complex> a(x.begin(), x.end());
  if (n <= 1) return a;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t t = 0; t < half; ++t) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(len);
        const Complex w(std::cos(angle), std::sin(angle));
        const Complex u = a[start + t];
        const Complex v = a[start + t + half] * w;
        a[start + t] = u + v;
        a[start + t + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : a) v *= scale;
  return a;
}

std::vector<Complex> forward(std::span<const Complex> x) {
  return is_power_of_two(x.size()) ? fft_radix2(x, false) : dft(x, false);
}

std::vector<Complex> inverse(std::span<const Complex> x_hat) {
  return is_power_of_two(x_hat.size()) ? fft_radix2(x_hat, true) : dft(x_hat, true);
}

std::vector<Complex> forward_real(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return forward(c);
}

}  // namespace kramers::fourier
