#ifndef RADOPT_PROBLEMS_HPP
#define RADOPT_PROBLEMS_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "radopt/linalg.hpp"
#include "radopt/matrix.hpp"
#include "radopt/rng.hpp"

namespace radopt {

// Covariance with the power-law spectrum lambda_j = lambda0 * j^{-alpha}.
struct CovarianceSpec {
  std::size_t p = 0;
  double lambda0 = 30.0;
  double alpha = 1.3;
};

struct Covariance {
  DenseVector eigenvalues;  // lambda0 * j^{-alpha}, j = 1..p
  DenseMatrix rotation;     // seeded random orthogonal basis
};

inline Covariance gen_covariance(const CovarianceSpec& spec, std::uint64_t seed) {
  require(spec.p >= 1 && spec.lambda0 > 0.0 && spec.alpha >= 0.0,
          "gen_covariance: invalid spec");
  Covariance cov;
  cov.eigenvalues.resize(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j)
    cov.eigenvalues[j] = spec.lambda0 * std::pow(static_cast<double>(j + 1), -spec.alpha);

  Rng rng(substream_seed(seed, "covariance-rotation"));
  DenseMatrix gauss(spec.p, spec.p);
  for (double& x : gauss.data()) x = rng.normal();
  cov.rotation = qr_decompose(gauss).q;
  return cov;
}

// tr(Sigma) / ||Sigma|| for a nonnegative spectrum.
inline double effective_rank(const DenseVector& eigenvalues) {
  require(!eigenvalues.empty(), "effective_rank: empty spectrum");
  double sum = 0.0, top = 0.0;
  for (double lam : eigenvalues) {
    require(lam >= 0.0, "effective_rank: eigenvalues must be nonnegative");
    sum += lam;
    top = std::max(top, lam);
  }
  require(top > 0.0, "effective_rank: all-zero spectrum");
  return sum / top;
}

struct Dataset {
  DenseMatrix x;  // n x p
  DenseVector y;  // +-1 class labels (or regression targets)
  std::vector<std::size_t> train_idx, test_idx;
  std::uint64_t seed = 0;
  CovarianceSpec spec;
  double separation = 0.0;
};

// Two balanced Gaussian classes N(mu_c, Sigma) with means +-(s/2) * u1 along
// the top eigenvector of Sigma. Split is a seeded 80/20 permutation.
inline Dataset gen_classification(std::size_t n, const CovarianceSpec& spec,
                                  double class_separation, std::uint64_t seed) {
  require(n >= 2 && n % 2 == 0, "gen_classification: n must be even");
  const Covariance cov = gen_covariance(spec, seed);
  const std::size_t p = spec.p;

  Dataset ds;
  ds.seed = seed;
  ds.spec = spec;
  ds.separation = class_separation;
  ds.x = DenseMatrix(n, p);
  ds.y.resize(n);

  DenseVector sqrt_lam(p);
  for (std::size_t j = 0; j < p; ++j) sqrt_lam[j] = std::sqrt(cov.eigenvalues[j]);

  Rng rng(substream_seed(seed, "samples"));
  DenseVector z(p);
  for (std::size_t i = 0; i < n; ++i) {
    const double label = i < n / 2 ? 1.0 : -1.0;
    ds.y[i] = label;
    for (std::size_t j = 0; j < p; ++j) z[j] = sqrt_lam[j] * rng.normal();
    double* row = ds.x.row(i);
    const double mu = label * 0.5 * class_separation;
    for (std::size_t r = 0; r < p; ++r) {
      double s = mu * cov.rotation(r, 0);
      const double* rot_r = cov.rotation.row(r);
      for (std::size_t j = 0; j < p; ++j) s += rot_r[j] * z[j];
      row[r] = s;
    }
  }

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng split_rng(substream_seed(seed, "split"));
  split_rng.shuffle(perm);
  const std::size_t ntrain = (n * 8) / 10;
  ds.train_idx.assign(perm.begin(), perm.begin() + ntrain);
  ds.test_idx.assign(perm.begin() + ntrain, perm.end());
  return ds;
}

// ---- single-sample losses (descent convention: grad = d loss / d beta) ----

struct LossGrad {
  double loss = 0.0;
  DenseVector grad;
};

inline LossGrad least_squares_grad(const DenseVector& x, double y, const DenseVector& beta) {
  require(x.size() == beta.size(), "least_squares_grad: dimension mismatch");
  const double resid = y - dot(x, beta);
  LossGrad out;
  out.loss = 0.5 * resid * resid;
  out.grad = scaled(x, -resid);
  return out;
}

namespace detail {

inline double log1p_exp(double t) {  // log(1 + e^t) without overflow
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace detail

inline LossGrad logistic_grad(const DenseVector& x, double y, const DenseVector& beta) {
  require(x.size() == beta.size(), "logistic_grad: dimension mismatch");
  require(y == 1.0 || y == -1.0, "logistic_grad: label must be +-1");
  const double margin = y * dot(x, beta);
  LossGrad out;
  out.loss = detail::log1p_exp(-margin);
  out.grad = scaled(x, -y * detail::sigmoid(-margin));
  return out;
}

// ---- multilayer perceptron with softmax cross-entropy ----

struct MlpSpec {
  std::vector<std::size_t> widths;  // input, hidden..., classes
  enum class Activation { relu, tanh } activation = Activation::tanh;

  std::size_t layers() const { return widths.size() - 1; }
  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l + 1] * (widths[l] + 1);
    return n;
  }
};

struct MlpBatch {
  const DenseMatrix* inputs = nullptr;      // b x input_width
  std::vector<std::size_t> sample_indices;  // rows of inputs
  std::vector<std::size_t> labels;          // class index per selected row
};

// Mean softmax cross-entropy over the batch plus its gradient by
// reverse-mode accumulation. Parameter layout per layer: W row-major, then b.
inline LossGrad mlp_loss_grad(const MlpSpec& spec, const DenseVector& params,
                              const MlpBatch& batch) {
  require(spec.widths.size() >= 2, "mlp_loss_grad: need at least one layer");
  for (std::size_t w : spec.widths) require(w >= 1, "mlp_loss_grad: widths must be positive");
  require(params.size() == spec.param_count(), "mlp_loss_grad: parameter size mismatch");
  require(!batch.sample_indices.empty(), "mlp_loss_grad: empty batch");
  require(batch.sample_indices.size() == batch.labels.size(),
          "mlp_loss_grad: labels do not match batch");
  require(batch.inputs && batch.inputs->cols() == spec.widths.front(),
          "mlp_loss_grad: input width mismatch");

  const std::size_t nl = spec.layers();
  std::vector<std::size_t> w_off(nl), b_off(nl);
  {
    std::size_t off = 0;
    for (std::size_t l = 0; l < nl; ++l) {
      w_off[l] = off;
      off += spec.widths[l + 1] * spec.widths[l];
      b_off[l] = off;
      off += spec.widths[l + 1];
    }
  }

  LossGrad out;
  out.grad.assign(params.size(), 0.0);
  const double bsz = static_cast<double>(batch.sample_indices.size());

  std::vector<DenseVector> act(nl + 1), pre(nl);
  for (std::size_t s = 0; s < batch.sample_indices.size(); ++s) {
    const std::size_t row = batch.sample_indices[s];
    const std::size_t label = batch.labels[s];
    require(label < spec.widths.back(), "mlp_loss_grad: label out of range");

    act[0].assign(batch.inputs->row(row), batch.inputs->row(row) + spec.widths.front());
    for (std::size_t l = 0; l < nl; ++l) {
      const std::size_t in = spec.widths[l], outw = spec.widths[l + 1];
      pre[l].assign(outw, 0.0);
      for (std::size_t i = 0; i < outw; ++i) {
        const double* w = params.data() + w_off[l] + i * in;
        double z = params[b_off[l] + i];
        for (std::size_t j = 0; j < in; ++j) z += w[j] * act[l][j];
        pre[l][i] = z;
      }
      if (l + 1 == nl) {
        act[l + 1] = pre[l];  // logits
      } else {
        act[l + 1].resize(outw);
        for (std::size_t i = 0; i < outw; ++i)
          act[l + 1][i] = spec.activation == MlpSpec::Activation::tanh
                              ? std::tanh(pre[l][i])
                              : std::max(pre[l][i], 0.0);
      }
    }

    const DenseVector& logits = act[nl];
    double zmax = logits[0];
    for (double v : logits) zmax = std::max(zmax, v);
    double lse = 0.0;
    for (double v : logits) lse += std::exp(v - zmax);
    lse = zmax + std::log(lse);
    out.loss += (lse - logits[label]) / bsz;

    DenseVector delta(logits.size());
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] = (std::exp(logits[i] - lse) - (i == label ? 1.0 : 0.0)) / bsz;

    for (std::size_t l = nl; l-- > 0;) {
      const std::size_t in = spec.widths[l], outw = spec.widths[l + 1];
      for (std::size_t i = 0; i < outw; ++i) {
        double* gw = out.grad.data() + w_off[l] + i * in;
        const double di = delta[i];
        for (std::size_t j = 0; j < in; ++j) gw[j] += di * act[l][j];
        out.grad[b_off[l] + i] += di;
      }
      if (l == 0) break;
      DenseVector prev(in, 0.0);
      for (std::size_t i = 0; i < outw; ++i) {
        const double* w = params.data() + w_off[l] + i * in;
        const double di = delta[i];
        for (std::size_t j = 0; j < in; ++j) prev[j] += di * w[j];
      }
      for (std::size_t j = 0; j < in; ++j) {
        const double z = pre[l - 1][j];
        prev[j] *= spec.activation == MlpSpec::Activation::tanh
                       ? 1.0 - std::tanh(z) * std::tanh(z)
                       : (z > 0.0 ? 1.0 : 0.0);
      }
      delta = std::move(prev);
    }
  }
  return out;
}

// Seeded Gaussian init scaled by 1/sqrt(fan_in); biases start at zero.
inline DenseVector mlp_init_params(const MlpSpec& spec, std::uint64_t seed) {
  DenseVector params(spec.param_count(), 0.0);
  Rng rng(substream_seed(seed, "mlp-init"));
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.widths[l]));
    for (std::size_t k = 0; k < spec.widths[l + 1] * spec.widths[l]; ++k)
      params[off + k] = scale * rng.normal();
    off += spec.widths[l + 1] * (spec.widths[l] + 1);
  }
  return params;
}

// ---- finite-sum stochastic objectives over a dataset ----

class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::size_t num_samples() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double loss_grad(std::size_t i, const DenseVector& beta, DenseVector& grad) const = 0;
  virtual double loss(std::size_t i, const DenseVector& beta) const = 0;

  double mean_loss(const DenseVector& beta, const std::vector<std::size_t>& idx) const {
    require(!idx.empty(), "mean_loss: empty index set");
    double s = 0.0;
    for (std::size_t i : idx) s += loss(i, beta);
    return s / static_cast<double>(idx.size());
  }

  DenseVector mean_gradient(const DenseVector& beta, const std::vector<std::size_t>& idx) const {
    require(!idx.empty(), "mean_gradient: empty index set");
    DenseVector acc(dim(), 0.0), g(dim());
    for (std::size_t i : idx) {
      loss_grad(i, beta, g);
      axpy(1.0, g, acc);
    }
    for (double& x : acc) x /= static_cast<double>(idx.size());
    return acc;
  }
};

class LogisticProblem : public Problem {
 public:
  explicit LogisticProblem(const Dataset& ds) : ds_(&ds) {}
  std::size_t num_samples() const override { return ds_->x.rows(); }
  std::size_t dim() const override { return ds_->x.cols(); }

  double loss_grad(std::size_t i, const DenseVector& beta, DenseVector& grad) const override {
    const double* x = ds_->x.row(i);
    const double y = ds_->y[i];
    double m = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) m += x[j] * beta[j];
    const double coef = -y * detail::sigmoid(-y * m);
    grad.resize(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) grad[j] = coef * x[j];
    return detail::log1p_exp(-y * m);
  }

  double loss(std::size_t i, const DenseVector& beta) const override {
    const double* x = ds_->x.row(i);
    double m = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) m += x[j] * beta[j];
    return detail::log1p_exp(-ds_->y[i] * m);
  }

 private:
  const Dataset* ds_;
};

class LeastSquaresProblem : public Problem {
 public:
  explicit LeastSquaresProblem(const Dataset& ds) : ds_(&ds) {}
  std::size_t num_samples() const override { return ds_->x.rows(); }
  std::size_t dim() const override { return ds_->x.cols(); }

  double loss_grad(std::size_t i, const DenseVector& beta, DenseVector& grad) const override {
    const double* x = ds_->x.row(i);
    double m = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) m += x[j] * beta[j];
    const double resid = ds_->y[i] - m;
    grad.resize(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) grad[j] = -resid * x[j];
    return 0.5 * resid * resid;
  }

  double loss(std::size_t i, const DenseVector& beta) const override {
    const double* x = ds_->x.row(i);
    double m = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) m += x[j] * beta[j];
    const double resid = ds_->y[i] - m;
    return 0.5 * resid * resid;
  }

 private:
  const Dataset* ds_;
};

class MlpProblem : public Problem {
 public:
  MlpProblem(MlpSpec spec, const Dataset& ds) : spec_(std::move(spec)), ds_(&ds) {
    require(spec_.widths.front() == ds.x.cols(), "MlpProblem: input width mismatch");
  }
  const MlpSpec& spec() const { return spec_; }
  std::size_t num_samples() const override { return ds_->x.rows(); }
  std::size_t dim() const override { return spec_.param_count(); }

  double loss_grad(std::size_t i, const DenseVector& beta, DenseVector& grad) const override {
    const LossGrad lg = mlp_loss_grad(spec_, beta, batch_of(i));
    grad = lg.grad;
    return lg.loss;
  }

  double loss(std::size_t i, const DenseVector& beta) const override {
    // forward-only would do; reuse the full pass for simplicity at these sizes
    return mlp_loss_grad(spec_, beta, batch_of(i)).loss;
  }

 private:
  MlpBatch batch_of(std::size_t i) const {
    MlpBatch b;
    b.inputs = &ds_->x;
    b.sample_indices = {i};
    b.labels = {ds_->y[i] > 0.0 ? std::size_t{1} : std::size_t{0}};
    return b;
  }

  MlpSpec spec_;
  const Dataset* ds_;
};

// ---- dataset persistence ----
//
// Text format, byte-stable for golden tests:
//   line 1: "radopt-dataset v1 n=<n> p=<p> seed=<seed> lambda0=<g17>
//            alpha=<g17> separation=<g17>"
//   then n lines: y x_1 ... x_p, each value printed with %.17g.
// The train/test split is regenerated from the stored seed.

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_dataset: cannot open " + path);
  std::fprintf(f, "radopt-dataset v1 n=%zu p=%zu seed=%llu lambda0=%.17g alpha=%.17g separation=%.17g\n",
               ds.x.rows(), ds.x.cols(), static_cast<unsigned long long>(ds.seed),
               ds.spec.lambda0, ds.spec.alpha, ds.separation);
  for (std::size_t i = 0; i < ds.x.rows(); ++i) {
    std::fprintf(f, "%.17g", ds.y[i]);
    const double* row = ds.x.row(i);
    for (std::size_t j = 0; j < ds.x.cols(); ++j) std::fprintf(f, " %.17g", row[j]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::size_t n = 0, p = 0;
  unsigned long long seed = 0;
  double lambda0 = 0.0, alpha = 0.0, separation = 0.0;
  if (std::sscanf(header.c_str(),
                  "radopt-dataset v1 n=%zu p=%zu seed=%llu lambda0=%lg alpha=%lg separation=%lg",
                  &n, &p, &seed, &lambda0, &alpha, &separation) != 6)
    throw std::runtime_error("load_dataset: bad header in " + path);

  Dataset ds;
  ds.seed = seed;
  ds.spec = {p, lambda0, alpha};
  ds.separation = separation;
  ds.x = DenseMatrix(n, p);
  ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    in >> ds.y[i];
    for (std::size_t j = 0; j < p; ++j) in >> ds.x(i, j);
  }
  if (!in) throw std::runtime_error("load_dataset: truncated file " + path);

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng split_rng(substream_seed(seed, "split"));
  split_rng.shuffle(perm);
  const std::size_t ntrain = (n * 8) / 10;
  ds.train_idx.assign(perm.begin(), perm.begin() + ntrain);
  ds.test_idx.assign(perm.begin() + ntrain, perm.end());
  return ds;
}

}  // namespace radopt

#endif  // RADOPT_PROBLEMS_HPP
