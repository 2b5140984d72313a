#ifndef RADOPT_SRFT_HPP
#define RADOPT_SRFT_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "radopt/matrix.hpp"
#include "radopt/rng.hpp"

namespace radopt {

// Subsampled randomized Fourier transform mapping R^p -> R^ell:
// sign-flip the input, take a unitary real-input FFT, stack the independent
// real/imaginary parts into a real coefficient pool (sqrt(2) weights except
// the purely real DC/Nyquist slots), subsample ell distinct slots, and
// rescale so E ||apply(g)||^2 = ||g||^2 over the randomness.
//
// Inputs whose length is not a power of two are zero-padded to fft_len and
// the scale becomes sqrt(fft_len/ell), which preserves the expected
// isometry.
struct SrftSketch {
  std::size_t p = 0;
  std::size_t ell = 0;
  std::size_t fft_len = 0;
  double scale = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> signs;                // p entries in {-1, +1}
  std::vector<std::size_t> sample_indices;  // ell distinct slots in [0, fft_len)

  // precomputed FFT tables
  std::vector<std::size_t> bitrev;
  std::vector<std::complex<double>> twiddles;
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t k = 1;
  while (k < n) k <<= 1;
  return k;
}

// In-place iterative radix-2 FFT (decimation in time), unnormalized.
inline void fft_pow2(std::vector<std::complex<double>>& x, const SrftSketch& s) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = s.bitrev[i];
    if (j > i) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> w = s.twiddles[k * step];
        const std::complex<double> u = x[start + k];
        const std::complex<double> t = w * x[start + k + half];
        x[start + k] = u + t;
        x[start + k + half] = u - t;
      }
    }
  }
}

}  // namespace detail

inline SrftSketch srft_new(std::size_t p, std::size_t tau, std::size_t oversample,
                           std::uint64_t seed) {
  require(p >= 1, "srft_new: dimension must be positive");
  require(tau + oversample >= 1, "srft_new: sketch needs at least one row");
  require(tau + oversample <= p, "srft_new: tau + oversample exceeds dimension");

  SrftSketch s;
  s.p = p;
  s.ell = tau + oversample;
  s.fft_len = detail::next_pow2(p);
  s.scale = std::sqrt(static_cast<double>(s.fft_len) / static_cast<double>(s.ell));
  s.seed = seed;

  Rng sign_rng(substream_seed(seed, "srft-signs"));
  s.signs.resize(p);
  for (double& x : s.signs) x = sign_rng.sign();

  // partial Fisher-Yates over the coefficient slots
  Rng idx_rng(substream_seed(seed, "srft-subsample"));
  std::vector<std::size_t> slots(s.fft_len);
  for (std::size_t i = 0; i < s.fft_len; ++i) slots[i] = i;
  s.sample_indices.resize(s.ell);
  for (std::size_t i = 0; i < s.ell; ++i) {
    const std::size_t j = i + idx_rng.uniform_index(s.fft_len - i);
    std::swap(slots[i], slots[j]);
    s.sample_indices[i] = slots[i];
  }

  const std::size_t n = s.fft_len;
  s.bitrev.assign(n, 0);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    s.bitrev[i] = r;
  }
  s.twiddles.resize(std::max<std::size_t>(n / 2, 1));
  for (std::size_t k = 0; k < s.twiddles.size(); ++k) {
    const double ang = -6.283185307179586476925286766559 * static_cast<double>(k) /
                       static_cast<double>(n);
    s.twiddles[k] = {std::cos(ang), std::sin(ang)};
  }
  return s;
}

inline DenseVector srft_apply(const SrftSketch& s, const DenseVector& g) {
  require(g.size() == s.p, "srft_apply: input length mismatch");
  const std::size_t n = s.fft_len;
  std::vector<std::complex<double>> x(n, {0.0, 0.0});
  for (std::size_t i = 0; i < s.p; ++i) x[i] = {s.signs[i] * g[i], 0.0};
  if (n > 1) detail::fft_pow2(x, s);

  const double unit = 1.0 / std::sqrt(static_cast<double>(n));
  const double r2 = std::sqrt(2.0);
  DenseVector y(s.ell);
  for (std::size_t i = 0; i < s.ell; ++i) {
    const std::size_t k = s.sample_indices[i];
    double v;
    if (k == 0) {
      v = x[0].real();
    } else if (n % 2 == 0 && k == n - 1) {
      v = x[n / 2].real();
    } else if (k % 2 == 1) {
      v = r2 * x[(k + 1) / 2].real();
    } else {
      v = r2 * x[k / 2].imag();
    }
    y[i] = s.scale * unit * v;
  }
  return y;
}

}  // namespace radopt

#endif  // RADOPT_SRFT_HPP
