#ifndef RADOPT_MATRIX_HPP
#define RADOPT_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace radopt {

using DenseVector = std::vector<double>;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Row-major dense matrix. Zero rows/columns are allowed (empty bases).
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  DenseVector col(std::size_t j) const {
    DenseVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(std::size_t j, const DenseVector& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// ---- vector helpers ----

inline double dot(const DenseVector& a, const DenseVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const DenseVector& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const DenseVector& x, DenseVector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline DenseVector scaled(const DenseVector& x, double alpha) {
  DenseVector y(x);
  for (double& v : y) v *= alpha;
  return y;
}

inline bool all_finite(const DenseVector& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// ---- matrix-vector / matrix-matrix kernels ----

inline DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  require(x.size() == a.cols(), "matvec: dimension mismatch");
  DenseVector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline DenseVector matvec_t(const DenseMatrix& a, const DenseVector& x) {
  require(x.size() == a.rows(), "matvec_t: dimension mismatch");
  DenseVector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * r[j];
  }
  return y;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

// A^T * B without forming the transpose.
inline DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_at_b: dimension mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* ci = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

// A += scale * u v^T
inline void rank1_add(DenseMatrix& a, const DenseVector& u, const DenseVector& v,
                      double scale = 1.0) {
  require(u.size() == a.rows() && v.size() == a.cols(), "rank1_add: dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double s = scale * u[i];
    if (s == 0.0) continue;
    double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] += s * v[j];
  }
}

inline double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_distance: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace radopt

#endif  // RADOPT_MATRIX_HPP
