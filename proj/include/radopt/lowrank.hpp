#ifndef RADOPT_LOWRANK_HPP
#define RADOPT_LOWRANK_HPP

#include <cstddef>

#include "radopt/linalg.hpp"
#include "radopt/matrix.hpp"
#include "radopt/srft.hpp"

namespace radopt {

// Streaming sketch of the gradient outer-product accumulator:
// g_sketch = sum_t g_t (Pi g_t)^T, a p x ell matrix.
struct SketchAccumulator {
  DenseMatrix g_sketch;
  long t = 0;

  SketchAccumulator() = default;
  SketchAccumulator(std::size_t p, std::size_t ell) : g_sketch(p, ell) {}
};

// Truncated factors of the accumulator: sigma holds the leading tau
// singular values (descending), v the matching p x tau orthonormal basis.
struct LowRankFactors {
  DenseMatrix v;
  DenseVector sigma;
};

inline void accumulate(SketchAccumulator& acc, const DenseVector& g,
                       const DenseVector& g_sketched) {
  require(g.size() == acc.g_sketch.rows() && g_sketched.size() == acc.g_sketch.cols(),
          "accumulate: dimension mismatch");
  rank1_add(acc.g_sketch, g, g_sketched);
  ++acc.t;
}

namespace detail {

inline LowRankFactors truncate_factors(const SvdResult& svd, const DenseMatrix& basis,
                                       std::size_t tau, bool basis_is_v) {
  // basis_is_v: W already lives in R^p; otherwise V = basis * W.
  LowRankFactors f;
  f.sigma.assign(tau, 0.0);
  for (std::size_t k = 0; k < tau; ++k) f.sigma[k] = svd.sigma[k];

  const std::size_t p = basis.rows();
  f.v = DenseMatrix(p, tau);
  if (basis_is_v) {
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < tau; ++k) f.v(i, k) = svd.w(i, k);
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      const double* bi = basis.row(i);
      for (std::size_t k = 0; k < tau; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < basis.cols(); ++m) s += bi[m] * svd.w(m, k);
        f.v(i, k) = s;
      }
    }
  }
  return f;
}

}  // namespace detail

// Two-stage randomized SVD of a dense symmetric PSD matrix: sketch the
// range (G Pi^T), orthonormalize, project, and take the small SVD. The
// trailing singular values past tau are discarded.
inline LowRankFactors randomized_svd_dense(const DenseMatrix& g, const SrftSketch& sketch,
                                           std::size_t tau) {
  const std::size_t p = g.rows();
  require(g.cols() == p, "randomized_svd_dense: matrix must be square");
  require(sketch.p == p, "randomized_svd_dense: sketch dimension mismatch");
  require(tau <= sketch.ell && sketch.ell <= p, "randomized_svd_dense: need tau <= ell <= p");
  const double diag_floor = -1e-10 * (1.0 + g.max_abs());
  for (std::size_t i = 0; i < p; ++i)
    require(g(i, i) >= diag_floor, "randomized_svd_dense: matrix not PSD");

  DenseMatrix sketched(p, sketch.ell);
  DenseVector row(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) row[j] = g(i, j);
    const DenseVector y = srft_apply(sketch, row);
    for (std::size_t j = 0; j < sketch.ell; ++j) sketched(i, j) = y[j];
  }
  const QrFactors qr = qr_decompose(sketched);
  const DenseMatrix b = matmul_at_b(qr.q, g);  // ell x p
  const SvdResult svd = svd_small(b);
  return detail::truncate_factors(svd, qr.q, tau, /*basis_is_v=*/true);
}

// Sketched-accumulator variant: B = g_sketch^T Q is only ell x ell and the
// p-dimensional basis is recovered as V = Q W. `qr` must hold current
// factors of acc.g_sketch (rank-one updated by the caller).
inline LowRankFactors randomized_svd_sketched(const SketchAccumulator& acc, const QrFactors& qr,
                                              std::size_t tau, bool debug_check = false) {
  const std::size_t p = acc.g_sketch.rows();
  const std::size_t ell = acc.g_sketch.cols();
  require(qr.q.rows() == p && qr.q.cols() == ell, "randomized_svd_sketched: factor shape mismatch");
  require(tau <= ell, "randomized_svd_sketched: tau exceeds sketch size");
  if (debug_check) {
    const double err = frobenius_distance(matmul(qr.q, qr.r), acc.g_sketch);
    if (err > 1e-6 * (1.0 + acc.g_sketch.frobenius_norm()))
      throw std::logic_error("randomized_svd_sketched: stale QR factors");
  }
  const DenseMatrix b = matmul_at_b(acc.g_sketch, qr.q);  // ell x ell
  const SvdResult svd = svd_small(b);
  return detail::truncate_factors(svd, qr.q, tau, /*basis_is_v=*/false);
}

// Error radius of the randomized range finder: sqrt(1 + 7p/tau) * sigma_{k+1}.
inline double approx_error_radius(std::size_t p, std::size_t tau, double sigma_kplus1) {
  require(tau >= 1 && p >= tau, "approx_error_radius: need 1 <= tau <= p");
  require(sigma_kplus1 >= 0.0, "approx_error_radius: singular value must be nonnegative");
  return std::sqrt(1.0 + 7.0 * static_cast<double>(p) / static_cast<double>(tau)) * sigma_kplus1;
}

// Spectral norm of G - Q Q^T G for an orthonormal basis Q.
inline double range_error(const DenseMatrix& g, const DenseMatrix& q) {
  require(q.rows() == g.rows(), "range_error: dimension mismatch");
  DenseMatrix resid = g;
  if (q.cols() > 0) {
    const DenseMatrix qtg = matmul_at_b(q, g);
    const DenseMatrix proj = matmul(q, qtg);
    for (std::size_t i = 0; i < resid.data().size(); ++i) resid.data()[i] -= proj.data()[i];
  }
  return spectral_norm(resid);
}

}  // namespace radopt

#endif  // RADOPT_LOWRANK_HPP
