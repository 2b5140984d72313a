#ifndef RADOPT_LINALG_HPP
#define RADOPT_LINALG_HPP

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include "radopt/matrix.hpp"

namespace radopt {

struct SingularityError : std::runtime_error {
  explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SymmetricEig {
  DenseVector eigenvalues;   // descending
  DenseMatrix eigenvectors;  // columns, orthonormal
};

struct QrFactors {
  DenseMatrix q;  // p x l, orthonormal columns
  DenseMatrix r;  // l x l, upper triangular
};

struct SvdResult {
  DenseMatrix u;      // m x r
  DenseVector sigma;  // r, descending, nonnegative
  DenseMatrix w;      // n x r
};

namespace detail {

// Largest-magnitude entry of each column is made nonnegative (first index
// wins ties), so factorizations are deterministic.
inline void fix_column_signs(DenseMatrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (m(arg, j) < 0.0) {
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
    }
  }
}

// Next canonical basis vector orthogonalized against the first `ncols`
// columns of q, scanning from e_{ncols} cyclically. Used when a
// factorization runs out of rank.
inline DenseVector fallback_column(const DenseMatrix& q, std::size_t ncols) {
  const std::size_t p = q.rows();
  DenseVector best;
  double best_norm = -1.0;
  for (std::size_t step = 0; step < p; ++step) {
    const std::size_t m = (ncols + step) % p;
    DenseVector w(p, 0.0);
    w[m] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < ncols; ++j) {
        double h = 0.0;
        for (std::size_t i = 0; i < p; ++i) h += q(i, j) * w[i];
        for (std::size_t i = 0; i < p; ++i) w[i] -= h * q(i, j);
      }
    }
    const double nw = norm2(w);
    if (nw > 0.3) {
      for (double& x : w) x /= nw;
      return w;
    }
    if (nw > best_norm) {
      best_norm = nw;
      best = std::move(w);
    }
  }
  // no candidate clears the quick-accept bar (nearly complete basis);
  // take the best survivor as long as it is numerically usable
  if (best_norm > 1e-8) {
    for (double& x : best) x /= best_norm;
    return best;
  }
  throw std::runtime_error("fallback_column: no basis vector survives projection");
}

inline void rotate_rows(DenseMatrix& m, std::size_t i, std::size_t j, double c, double s) {
  double* ri = m.row(i);
  double* rj = m.row(j);
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const double a = ri[k], b = rj[k];
    ri[k] = c * a - s * b;
    rj[k] = s * a + c * b;
  }
}

inline void rotate_cols(DenseMatrix& m, std::size_t i, std::size_t j, double c, double s) {
  for (std::size_t k = 0; k < m.rows(); ++k) {
    double* r = m.row(k);
    const double a = r[i], b = r[j];
    r[i] = c * a - s * b;
    r[j] = s * a + c * b;
  }
}

}  // namespace detail

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Converged when the
// off-diagonal Frobenius mass falls below 1e-12 * ||A||_F. Eigenvalues are
// returned descending with sign-fixed orthonormal eigenvectors.
inline SymmetricEig sym_eig(const DenseMatrix& a_in) {
  require(a_in.rows() == a_in.cols() && a_in.rows() >= 1, "sym_eig: matrix must be square");
  const std::size_t n = a_in.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(a_in(i, j) - a_in(j, i)) <= 1e-10,
              "sym_eig: matrix not symmetric within 1e-10");

  DenseMatrix a = a_in;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = v;
    }
  DenseMatrix e = DenseMatrix::identity(n);
  const double norm_a = a.frobenius_norm();
  const double conv = 1e-12 * std::max(norm_a, DBL_MIN);
  const double elem_tol = conv / static_cast<double>(n);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off2 += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off2) <= conv) break;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double apq = a(i, j);
        if (std::abs(apq) <= elem_tol) continue;
        const double app = a(i, i), aqq = a(j, j);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau)));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          const double aki = a(k, i), akj = a(k, j);
          a(k, i) = a(i, k) = c * aki - s * akj;
          a(k, j) = a(j, k) = s * aki + c * akj;
        }
        a(i, i) = app - t * apq;
        a(j, j) = aqq + t * apq;
        a(i, j) = a(j, i) = 0.0;
        detail::rotate_cols(e, i, j, c, s);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymmetricEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = e(i, order[k]);
  }
  detail::fix_column_signs(out.eigenvectors);
  return out;
}

// Applies (delta*I + A^{1/2})^{-1} to g for symmetric PSD A.
inline DenseVector psd_inv_sqrt_apply(const DenseMatrix& a, double delta, const DenseVector& g) {
  require(delta >= 0.0, "psd_inv_sqrt_apply: delta must be nonnegative");
  require(g.size() == a.rows(), "psd_inv_sqrt_apply: vector length mismatch");
  SymmetricEig se = sym_eig(a);
  for (double& lam : se.eigenvalues) {
    require(lam >= -1e-10, "psd_inv_sqrt_apply: matrix not PSD");
    lam = std::max(lam, 0.0);
  }
  if (delta == 0.0 && se.eigenvalues.back() <= 0.0)
    throw SingularityError("psd_inv_sqrt_apply: singular matrix with delta = 0");
  DenseVector c = matvec_t(se.eigenvectors, g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] /= std::sqrt(se.eigenvalues[i]) + delta;
  return matvec(se.eigenvectors, c);
}

// Thin QR by modified Gram-Schmidt with reorthogonalization. Columns whose
// residual falls below 1e-12 * ||A||_F get a zero R diagonal and a canonical
// fallback direction in Q, so Q keeps orthonormal columns at any rank.
inline QrFactors qr_decompose(const DenseMatrix& a) {
  const std::size_t p = a.rows(), l = a.cols();
  require(p >= l, "qr_decompose: need rows >= cols");
  QrFactors f{DenseMatrix(p, l), DenseMatrix(l, l)};
  const double drop_tol = 1e-12 * a.frobenius_norm();

  for (std::size_t k = 0; k < l; ++k) {
    DenseVector v = a.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        double h = 0.0;
        for (std::size_t i = 0; i < p; ++i) h += f.q(i, j) * v[i];
        for (std::size_t i = 0; i < p; ++i) v[i] -= h * f.q(i, j);
        f.r(j, k) += h;
      }
    }
    const double rkk = norm2(v);
    if (rkk > drop_tol) {
      f.r(k, k) = rkk;
      for (std::size_t i = 0; i < p; ++i) f.q(i, k) = v[i] / rkk;
    } else {
      f.r(k, k) = 0.0;
      f.q.set_col(k, detail::fallback_column(f.q, k));
    }
  }

  for (std::size_t k = 0; k < l; ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double x = std::abs(f.q(i, k));
      if (x > best) {
        best = x;
        arg = i;
      }
    }
    if (f.q(arg, k) < 0.0) {
      for (std::size_t i = 0; i < p; ++i) f.q(i, k) = -f.q(i, k);
      for (std::size_t j = 0; j < l; ++j) f.r(k, j) = -f.r(k, j);
    }
  }
  return f;
}

namespace detail {

// Givens pair (c, s) such that [c -s; s c]^T ... applied via rotate_rows
// maps (a, b) to (r, 0).
inline void givens(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  const double r = std::hypot(a, b);
  c = a / r;
  s = -b / r;
}

}  // namespace detail

// Rank-one QR update: factors of A become factors of A + u v^T using two
// Givens passes (Golub & Van Loan, sec. 12.5 scheme adapted to thin Q).
// Cost O(p*l + l^2). Column signs may differ from a fresh decomposition.
inline QrFactors qr_rank1_update(const QrFactors& f, const DenseVector& u, const DenseVector& v) {
  const std::size_t p = f.q.rows(), l = f.q.cols();
  require(f.r.rows() == l && f.r.cols() == l, "qr_rank1_update: inconsistent factors");
  require(u.size() == p && v.size() == l, "qr_rank1_update: dimension mismatch");
  if (l == 0) return f;

  const double nu = norm2(u);
  if (nu == 0.0 || norm2(v) == 0.0) return f;

  DenseVector w(l, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const double* qi = f.q.row(i);
    for (std::size_t j = 0; j < l; ++j) w[j] += qi[j] * u[i];
  }
  DenseVector resid(u);
  for (std::size_t i = 0; i < p; ++i) {
    const double* qi = f.q.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < l; ++j) s += qi[j] * w[j];
    resid[i] -= s;
  }
  const double rho = norm2(resid);
  const bool extend = rho > 1e-13 * nu;
  const std::size_t m = extend ? l + 1 : l;  // rows of the working R

  DenseMatrix q(p, m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < l; ++j) q(i, j) = f.q(i, j);
  DenseMatrix r(m, l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) r(i, j) = f.r(i, j);

  DenseVector we(m);
  for (std::size_t j = 0; j < l; ++j) we[j] = w[j];
  if (extend) {
    we[l] = rho;
    for (std::size_t i = 0; i < p; ++i) q(i, l) = resid[i] / rho;
  }

  // Sweep 1: rotate we onto e_0; R becomes upper Hessenberg.
  for (std::size_t k = m; k-- > 1;) {
    if (we[k] == 0.0) continue;
    double c, s;
    detail::givens(we[k - 1], we[k], c, s);
    we[k - 1] = c * we[k - 1] - s * we[k];
    we[k] = 0.0;
    detail::rotate_rows(r, k - 1, k, c, s);
    detail::rotate_cols(q, k - 1, k, c, s);
  }
  for (std::size_t j = 0; j < l; ++j) r(0, j) += we[0] * v[j];

  // Sweep 2: restore upper triangular form.
  for (std::size_t k = 0; k + 1 < m && k < l; ++k) {
    if (r(k + 1, k) == 0.0) continue;
    double c, s;
    detail::givens(r(k, k), r(k + 1, k), c, s);
    detail::rotate_rows(r, k, k + 1, c, s);
    detail::rotate_cols(q, k, k + 1, c, s);
    r(k + 1, k) = 0.0;
  }

  QrFactors out{DenseMatrix(p, l), DenseMatrix(l, l)};
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < l; ++j) out.q(i, j) = q(i, j);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i; j < l; ++j) out.r(i, j) = r(i, j);
  for (std::size_t k = 0; k < l; ++k) {
    if (out.r(k, k) < 0.0) {
      for (std::size_t i = 0; i < p; ++i) out.q(i, k) = -out.q(i, k);
      for (std::size_t j = k; j < l; ++j) out.r(k, j) = -out.r(k, j);
    }
  }
  return out;
}

// SVD of a small dense matrix through the Gram matrix of the shorter side.
inline SvdResult svd_small(const DenseMatrix& b) {
  const std::size_t m = b.rows(), n = b.cols();
  require(m >= 1 && n >= 1, "svd_small: empty matrix");
  const std::size_t r = std::min(m, n);

  SvdResult out;
  out.sigma.assign(r, 0.0);
  if (b.max_abs() == 0.0) {
    out.u = DenseMatrix(m, r);
    out.w = DenseMatrix(n, r);
    for (std::size_t k = 0; k < r; ++k) {
      out.u(k, k) = 1.0;
      out.w(k, k) = 1.0;
    }
    return out;
  }

  const bool rows_short = m <= n;
  const DenseMatrix gram = rows_short ? matmul(b, b.transposed()) : matmul_at_b(b, b);
  SymmetricEig se = sym_eig(gram);
  for (std::size_t k = 0; k < r; ++k) out.sigma[k] = std::sqrt(std::max(se.eigenvalues[k], 0.0));

  DenseMatrix& primary = rows_short ? out.u : out.w;
  DenseMatrix& derived = rows_short ? out.w : out.u;
  primary = DenseMatrix(rows_short ? m : n, r);
  for (std::size_t i = 0; i < primary.rows(); ++i)
    for (std::size_t k = 0; k < r; ++k) primary(i, k) = se.eigenvectors(i, k);

  const std::size_t dlen = rows_short ? n : m;
  derived = DenseMatrix(dlen, r);
  const double sig_tol = 1e-13 * out.sigma[0];
  for (std::size_t k = 0; k < r; ++k) {
    DenseVector col;
    if (out.sigma[k] > sig_tol) {
      const DenseVector pk = primary.col(k);
      col = rows_short ? matvec_t(b, pk) : matvec(b, pk);
      for (double& x : col) x /= out.sigma[k];
      // reorthogonalize against earlier columns; near-equal singular values
      // otherwise leak into each other
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) {
          double h = 0.0;
          for (std::size_t i = 0; i < dlen; ++i) h += derived(i, j) * col[i];
          for (std::size_t i = 0; i < dlen; ++i) col[i] -= h * derived(i, j);
        }
      }
      const double nc = norm2(col);
      if (nc > 0.1) {
        for (double& x : col) x /= nc;
      } else {
        col = detail::fallback_column(derived, k);
      }
    } else {
      col = detail::fallback_column(derived, k);
    }
    derived.set_col(k, col);
  }
  return out;
}

// Largest singular value by power iteration on A^T A. Deterministic start,
// relative accuracy ~1e-6 or better.
inline double spectral_norm(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0) return 0.0;
  const std::size_t n = a.cols();
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + 0.1 * static_cast<double>((7 * i + 3) % 13);
  double nv = norm2(v);
  for (double& x : v) x /= nv;

  double prev = 0.0;
  int stable = 0;
  for (int it = 0; it < 20000; ++it) {
    DenseVector av = matvec(a, v);
    const double rho = dot(av, av);  // = sigma_1^2 at convergence
    DenseVector atav = matvec_t(a, av);
    const double na = norm2(atav);
    if (na == 0.0) return std::sqrt(std::max(rho, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i] = atav[i] / na;
    if (std::abs(rho - prev) <= 1e-13 * std::max(rho, DBL_MIN)) {
      if (++stable >= 3) return std::sqrt(rho);
    } else {
      stable = 0;
    }
    prev = rho;
  }
  return std::sqrt(prev);
}

// ---- rank-one eigendecomposition update ----
//
// Maintains E diag(d) E^T = G across the append G <- G + g g^T without a
// full re-decomposition: deflation + secular equation + explicit
// eigenvector reconstruction (Bunch/Nielsen/Sorensen with the Gu-Eisenstat
// z-recomputation for numerically orthogonal vectors). d is ascending.
// Cost O(p k^2) with k the non-deflated count; axis-aligned updates deflate
// completely and are exact.

namespace detail {

struct SecularRoot {
  std::size_t anchor;  // index into the active d array
  double offset;       // root = d[anchor] + offset
};

// Root of 1 + rho * sum z_i^2 / (d_i - mu) on (d_j, upper). Solved in the
// offset from the nearer pole: bracketed Newton with bisection fallback.
inline SecularRoot secular_root(const DenseVector& d, const DenseVector& z, double rho,
                                std::size_t j, double upper_gap) {
  const std::size_t k = d.size();
  const bool last = (j + 1 == k);
  const double gap = last ? upper_gap : d[j + 1] - d[j];

  // pick anchor by the sign of f at the interval midpoint
  double fmid = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double den = (d[i] - d[j]) - 0.5 * gap;
    fmid += rho * z[i] * z[i] / den;
  }
  std::size_t anchor;
  double lo, hi;  // bracket in offset coordinates
  if (last || fmid > 0.0) {
    anchor = j;  // root in (d_j, mid]
    lo = 0.0;
    hi = last && fmid <= 0.0 ? gap : 0.5 * gap;
  } else {
    anchor = j + 1;  // root in (mid, d_{j+1})
    lo = -0.5 * gap;
    hi = 0.0;
  }

  auto eval = [&](double t, double& f, double& df) {
    f = 1.0;
    df = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double den = (d[i] - d[anchor]) - t;
      const double q = z[i] * z[i] / den;
      f += rho * q;
      df += rho * q / den;
    }
  };

  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 160; ++it) {
    double f, df;
    eval(t, f, df);
    if (f > 0.0) {
      // f increasing in t (df = rho*sum z^2/den^2 > 0): root below t
      hi = t;
    } else {
      lo = t;
    }
    double tn = t - f / df;
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= 2.0 * DBL_EPSILON * std::abs(t) + DBL_MIN) {
      t = tn;
      break;
    }
    t = tn;
  }
  return {anchor, t};
}

}  // namespace detail

inline void rank1_eig_update(DenseVector& d, DenseMatrix& e, const DenseVector& g) {
  const std::size_t p = d.size();
  require(e.rows() == p && e.cols() == p, "rank1_eig_update: inconsistent decomposition");
  require(g.size() == p, "rank1_eig_update: dimension mismatch");
  for (std::size_t i = 0; i + 1 < p; ++i)
    require(d[i] <= d[i + 1], "rank1_eig_update: eigenvalues must be ascending");

  DenseVector h = matvec_t(e, g);
  const double rho = dot(h, h);
  if (rho == 0.0) return;
  const double hnorm = std::sqrt(rho);
  DenseVector z(p);
  for (std::size_t i = 0; i < p; ++i) z[i] = h[i] / hnorm;

  const double scale = std::max({std::abs(d[0]), std::abs(d[p - 1]), rho});
  const double tol = 8.0 * DBL_EPSILON * scale;

  std::vector<char> active(p, 1);
  for (std::size_t i = 0; i < p; ++i) {
    if (rho * std::abs(z[i]) <= tol) {
      active[i] = 0;
      z[i] = 0.0;
    }
  }
  // merge near-equal diagonal pairs: rotate the z mass of prev into i, deflate prev
  {
    std::size_t prev = p;  // last active index seen
    for (std::size_t i = 0; i < p; ++i) {
      if (!active[i]) continue;
      if (prev < p && d[i] - d[prev] <= tol) {
        const double zi = z[prev], zj = z[i];
        const double r = std::hypot(zi, zj);
        const double c = zj / r, s = zi / r;
        detail::rotate_cols(e, prev, i, c, s);
        const double di = d[prev], dj = d[i];
        d[prev] = c * c * di + s * s * dj;
        d[i] = s * s * di + c * c * dj;
        z[i] = r;
        z[prev] = 0.0;
        active[prev] = 0;
      }
      prev = i;
    }
  }

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p; ++i)
    if (active[i]) idx.push_back(i);
  const std::size_t k = idx.size();
  if (k == 0) return;

  if (k == 1) {
    d[idx[0]] += rho * z[idx[0]] * z[idx[0]];
  } else {
    DenseVector da(k), za(k);
    for (std::size_t i = 0; i < k; ++i) {
      da[i] = d[idx[i]];
      za[i] = z[idx[i]];
    }
    double zmass = 0.0;
    for (double x : za) zmass += x * x;

    std::vector<detail::SecularRoot> roots(k);
    for (std::size_t j = 0; j < k; ++j)
      roots[j] = detail::secular_root(da, za, rho, j, rho * zmass);

    // Gu-Eisenstat: recompute z from the roots so the eigenvectors below
    // come out orthogonal to working precision.
    DenseVector zh(k);
    for (std::size_t i = 0; i < k; ++i) {
      double prod = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double mu_minus_di = (da[roots[j].anchor] - da[i]) + roots[j].offset;
        if (j == i) {
          prod *= mu_minus_di;
        } else {
          prod *= mu_minus_di / (da[j] - da[i]);
        }
      }
      zh[i] = (za[i] >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::abs(prod));
    }

    DenseMatrix u(k, k);
    for (std::size_t j = 0; j < k; ++j) {
      double nn = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double den = (da[i] - da[roots[j].anchor]) - roots[j].offset;
        const double x = zh[i] / den;
        u(i, j) = x;
        nn += x * x;
      }
      nn = std::sqrt(nn);
      for (std::size_t i = 0; i < k; ++i) u(i, j) /= nn;
    }

    // back-transform the active eigenvector block: E_active <- E_active * U
    DenseMatrix eb(p, k);
    for (std::size_t i = 0; i < p; ++i) {
      const double* er = e.row(i);
      for (std::size_t j = 0; j < k; ++j) eb(i, j) = er[idx[j]];
    }
    DenseMatrix enew = matmul(eb, u);
    for (std::size_t i = 0; i < p; ++i) {
      double* er = e.row(i);
      for (std::size_t j = 0; j < k; ++j) er[idx[j]] = enew(i, j);
    }
    for (std::size_t j = 0; j < k; ++j) d[idx[j]] = da[roots[j].anchor] + roots[j].offset;
  }

  // restore global ascending order (deflated and updated values interleave)
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  bool sorted = true;
  for (std::size_t i = 0; i < p; ++i)
    if (order[i] != i) sorted = false;
  if (!sorted) {
    DenseVector ds(p);
    DenseMatrix es(p, p);
    for (std::size_t j = 0; j < p; ++j) {
      ds[j] = d[order[j]];
      for (std::size_t i = 0; i < p; ++i) es(i, j) = e(i, order[j]);
    }
    d = std::move(ds);
    e = std::move(es);
  }
}

}  // namespace radopt

#endif  // RADOPT_LINALG_HPP
