#ifndef RADOPT_OPTIM_HPP
#define RADOPT_OPTIM_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "radopt/linalg.hpp"
#include "radopt/lowrank.hpp"
#include "radopt/matrix.hpp"
#include "radopt/problems.hpp"
#include "radopt/rng.hpp"
#include "radopt/srft.hpp"

namespace radopt {

enum class Variant { sgd, adagrad_diag, ada_full, ada_lr, radagrad, rada_vr };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::sgd: return "sgd";
    case Variant::adagrad_diag: return "adagrad_diag";
    case Variant::ada_full: return "ada_full";
    case Variant::ada_lr: return "ada_lr";
    case Variant::radagrad: return "radagrad";
    case Variant::rada_vr: return "rada_vr";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::sgd, Variant::adagrad_diag, Variant::ada_full, Variant::ada_lr,
                    Variant::radagrad, Variant::rada_vr})
    if (name == variant_name(v)) return v;
  throw std::invalid_argument("unknown optimizer: " + name);
}

struct OptimizerConfig {
  Variant variant = Variant::sgd;
  double eta = 0.1;
  double delta = 1e-4;
  std::size_t tau = 25;
  std::size_t oversample = 10;
  std::uint64_t seed = 0;
  std::size_t vr_update_freq = 0;   // 0: default to 5n once the problem size is known
  std::size_t vr_warmup_epochs = 1;
  bool vr_pivot_sum = false;        // sum instead of mean when computing the pivot gradient
  bool ada_lr_exact_basis = false;  // test hook: exact top-tau eigenbasis instead of the sketch
  bool debug_factor_check = false;  // verify QR factors against the accumulator each step
};

inline void validate(const OptimizerConfig& cfg) {
  require(cfg.eta > 0.0, "OptimizerConfig: eta must be positive");
  require(cfg.delta >= 0.0, "OptimizerConfig: delta must be nonnegative");
  if (cfg.variant == Variant::ada_lr || cfg.variant == Variant::rada_vr)
    require(cfg.tau >= 1, "OptimizerConfig: tau must be at least 1");
  if (cfg.variant == Variant::rada_vr)
    require(cfg.vr_warmup_epochs >= 0, "OptimizerConfig: bad warmup");
}

// Streaming optimizer over externally supplied gradients. Trajectories are a
// pure function of (config, beta0, gradient stream).
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  void step(const DenseVector& g) {
    require(g.size() == beta_.size(), "step: gradient dimension mismatch");
    do_step(g);
    require(all_finite(beta_), "step: parameters diverged to non-finite values");
    ++step_;
  }

  const DenseVector& beta() const { return beta_; }
  long steps() const { return step_; }
  const OptimizerConfig& config() const { return cfg_; }

  // Unnormalized spectrum of the proximal term (square-root scale),
  // descending. Variants without a proximal accumulator throw.
  virtual DenseVector proximal_eigenvalues() const {
    throw std::invalid_argument(std::string("proximal spectrum unsupported for ") +
                                variant_name(cfg_.variant));
  }

 protected:
  Optimizer(OptimizerConfig cfg, DenseVector beta0) : cfg_(cfg), beta_(std::move(beta0)) {
    validate(cfg_);
    require(all_finite(beta_), "init: beta0 must be finite");
  }
  virtual void do_step(const DenseVector& g) = 0;

  OptimizerConfig cfg_;
  DenseVector beta_;
  long step_ = 0;
};

class SgdOptimizer final : public Optimizer {
 public:
  SgdOptimizer(const OptimizerConfig& cfg, DenseVector beta0) : Optimizer(cfg, std::move(beta0)) {}

 private:
  void do_step(const DenseVector& g) override { axpy(-cfg_.eta, g, beta_); }
};

class AdagradDiagOptimizer final : public Optimizer {
 public:
  AdagradDiagOptimizer(const OptimizerConfig& cfg, DenseVector beta0)
      : Optimizer(cfg, std::move(beta0)), acc_(beta_.size(), 0.0) {}

  DenseVector proximal_eigenvalues() const override {
    DenseVector s(acc_.size());
    for (std::size_t j = 0; j < acc_.size(); ++j) s[j] = std::sqrt(acc_[j]);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  }

  const DenseVector& accumulator() const { return acc_; }

 private:
  void do_step(const DenseVector& g) override {
    for (std::size_t j = 0; j < beta_.size(); ++j) {
      acc_[j] += g[j] * g[j];
      const double denom = cfg_.delta + std::sqrt(acc_[j]);
      if (denom > 0.0) beta_[j] -= cfg_.eta * g[j] / denom;
      // denom == 0 only when delta = 0 and the coordinate never saw a
      // gradient: 0/0 is defined as no movement
    }
  }

  DenseVector acc_;
};

// Full-matrix variant. The accumulator's eigendecomposition is maintained
// incrementally (rank-one secular updates) so a step costs one p x k^2
// back-transform instead of a fresh O(p^3) eigensolve; a periodic cold
// resync bounds drift. The applied update is identical to
// (delta I + G^{1/2})^{-1} g with the pseudo-inverse convention on the span
// of G when delta = 0.
class AdaFullOptimizer final : public Optimizer {
 public:
  AdaFullOptimizer(const OptimizerConfig& cfg, DenseVector beta0)
      : Optimizer(cfg, std::move(beta0)),
        g_(beta_.size(), beta_.size()),
        d_(beta_.size(), 0.0),
        e_(DenseMatrix::identity(beta_.size())) {}

  const DenseMatrix& accumulator() const { return g_; }

  DenseVector proximal_eigenvalues() const override {
    DenseVector s(d_.size());
    for (std::size_t j = 0; j < d_.size(); ++j)
      s[j] = std::sqrt(std::max(d_[d_.size() - 1 - j], 0.0));
    return s;
  }

 private:
  void do_step(const DenseVector& g) override {
    rank1_add(g_, g, g);
    rank1_eig_update(d_, e_, g);
    if (++since_resync_ >= kResyncInterval) {
      const SymmetricEig se = sym_eig(g_);
      const std::size_t p = d_.size();
      for (std::size_t k = 0; k < p; ++k) {
        d_[k] = se.eigenvalues[p - 1 - k];
        for (std::size_t i = 0; i < p; ++i) e_(i, k) = se.eigenvectors(i, p - 1 - k);
      }
      since_resync_ = 0;
    }

    const std::size_t p = d_.size();
    DenseVector c = matvec_t(e_, g);
    const double top = std::max(d_[p - 1], 0.0);
    if (cfg_.delta == 0.0) {
      if (top <= 0.0)
        throw SingularityError("ada_full: zero spectrum with delta = 0");
      const double thresh = 1e-10 * top;
      for (std::size_t j = 0; j < p; ++j) {
        const double lam = std::max(d_[j], 0.0);
        c[j] = lam > thresh ? c[j] / std::sqrt(lam) : 0.0;
      }
    } else {
      for (std::size_t j = 0; j < p; ++j)
        c[j] /= cfg_.delta + std::sqrt(std::max(d_[j], 0.0));
    }
    const DenseVector dir = matvec(e_, c);
    axpy(-cfg_.eta, dir, beta_);
  }

  static constexpr long kResyncInterval = 512;
  DenseMatrix g_;
  DenseVector d_;   // eigenvalues of g_, ascending
  DenseMatrix e_;   // matching eigenvectors
  long since_resync_ = 0;
};

namespace detail {

// beta -= eta * V diag(1/(sqrt(sigma)+delta)) V^T g, applied as three
// matrix-vector products. Returns V^T g for reuse by the caller.
inline DenseVector apply_lowrank_inverse(const LowRankFactors& f, double eta, double delta,
                                         const DenseVector& g, DenseVector& beta,
                                         const char* who) {
  const std::size_t tau = f.sigma.size();
  DenseVector c = matvec_t(f.v, g);
  DenseVector scaled_c(tau);
  const double top = tau > 0 ? std::max(f.sigma[0], 0.0) : 0.0;
  if (delta == 0.0) {
    if (tau > 0 && top <= 0.0)
      throw SingularityError(std::string(who) + ": all-zero spectrum with delta = 0");
    const double thresh = 1e-10 * top;
    const double gn = norm2(g);
    for (std::size_t k = 0; k < tau; ++k) {
      if (f.sigma[k] > thresh) {
        scaled_c[k] = c[k] / std::sqrt(f.sigma[k]);
      } else {
        if (std::abs(c[k]) > 1e-8 * (1.0 + gn))
          throw SingularityError(std::string(who) +
                                 ": zero spectrum along a used direction with delta = 0");
        scaled_c[k] = 0.0;
      }
    }
  } else {
    for (std::size_t k = 0; k < tau; ++k)
      scaled_c[k] = c[k] / (std::sqrt(std::max(f.sigma[k], 0.0)) + delta);
  }
  if (tau > 0) {
    const DenseVector dir = matvec(f.v, scaled_c);
    axpy(-eta, dir, beta);
  }
  return c;
}

}  // namespace detail

// Dense-accumulator variant: keeps the full G but replaces its
// eigendecomposition with the randomized two-stage SVD every step.
class AdaLrOptimizer final : public Optimizer {
 public:
  AdaLrOptimizer(const OptimizerConfig& cfg, DenseVector beta0)
      : Optimizer(cfg, std::move(beta0)), g_(beta_.size(), beta_.size()) {
    require(cfg_.tau + cfg_.oversample <= beta_.size(),
            "ada_lr: tau + oversample must not exceed the dimension");
    if (!cfg_.ada_lr_exact_basis)
      sketch_ = srft_new(beta_.size(), cfg_.tau, cfg_.oversample,
                         substream_seed(cfg_.seed, "sketch"));
    factors_.sigma.assign(cfg_.tau, 0.0);
    factors_.v = DenseMatrix(beta_.size(), cfg_.tau);
    for (std::size_t k = 0; k < cfg_.tau; ++k) factors_.v(k, k) = 1.0;
  }

  const DenseMatrix& accumulator() const { return g_; }
  const LowRankFactors& factors() const { return factors_; }

  DenseVector proximal_eigenvalues() const override {
    DenseVector s(factors_.sigma.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      s[k] = std::sqrt(std::max(factors_.sigma[k], 0.0));
    return s;
  }

 private:
  void do_step(const DenseVector& g) override {
    rank1_add(g_, g, g);
    factors_ = cfg_.ada_lr_exact_basis ? exact_factors() : randomized_svd_dense(g_, sketch_, cfg_.tau);
    detail::apply_lowrank_inverse(factors_, cfg_.eta, cfg_.delta, g, beta_, "ada_lr");
  }

  // Test hook: Q = top-tau eigenvectors of G, then the usual project + SVD.
  LowRankFactors exact_factors() const {
    const std::size_t p = beta_.size();
    const SymmetricEig se = sym_eig(g_);
    DenseMatrix q(p, cfg_.tau);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < cfg_.tau; ++k) q(i, k) = se.eigenvectors(i, k);
    const DenseMatrix b = matmul_at_b(q, g_);
    const SvdResult svd = svd_small(b);
    LowRankFactors f;
    f.sigma.assign(cfg_.tau, 0.0);
    f.v = DenseMatrix(p, cfg_.tau);
    for (std::size_t k = 0; k < cfg_.tau; ++k) {
      f.sigma[k] = svd.sigma[k];
      for (std::size_t i = 0; i < p; ++i) f.v(i, k) = svd.w(i, k);
    }
    return f;
  }

  DenseMatrix g_;
  SrftSketch sketch_;
  LowRankFactors factors_;
};

// Sketched variant: only the p x ell accumulator is kept, QR factors are
// rank-one updated, and the corrected update routes the unexplained
// component of the gradient through gamma = eta (I - V V^T) g.
class RadagradOptimizer final : public Optimizer {
 public:
  RadagradOptimizer(const OptimizerConfig& cfg, DenseVector beta0)
      : Optimizer(cfg, std::move(beta0)) {
    require(cfg_.tau + cfg_.oversample >= 1, "radagrad: sketch needs at least one row");
    require(cfg_.tau + cfg_.oversample <= beta_.size(),
            "radagrad: tau + oversample must not exceed the dimension");
    sketch_ = srft_new(beta_.size(), cfg_.tau, cfg_.oversample,
                       substream_seed(cfg_.seed, "sketch"));
    acc_ = SketchAccumulator(beta_.size(), sketch_.ell);
    qr_ = qr_decompose(acc_.g_sketch);
    factors_.sigma.assign(cfg_.tau, 0.0);
    factors_.v = DenseMatrix(beta_.size(), cfg_.tau);
    for (std::size_t k = 0; k < cfg_.tau; ++k) factors_.v(k, k) = 1.0;
  }

  const SketchAccumulator& accumulator() const { return acc_; }
  const LowRankFactors& factors() const { return factors_; }
  double last_correction_norm() const { return last_correction_norm_; }

  DenseVector proximal_eigenvalues() const override {
    DenseVector s(factors_.sigma.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      s[k] = std::sqrt(std::max(factors_.sigma[k], 0.0));
    return s;
  }

 private:
  void do_step(const DenseVector& g) override {
    const DenseVector gt = srft_apply(sketch_, g);
    accumulate(acc_, g, gt);
    qr_ = qr_rank1_update(qr_, g, gt);
    factors_ = randomized_svd_sketched(acc_, qr_, cfg_.tau, cfg_.debug_factor_check);

    const DenseVector c =
        detail::apply_lowrank_inverse(factors_, cfg_.eta, cfg_.delta, g, beta_, "radagrad");
    // corrected update gamma = eta (g - V V^T g)
    DenseVector gamma(g);
    if (!c.empty()) {
      const DenseVector proj = matvec(factors_.v, c);
      for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] -= proj[i];
    }
    last_correction_norm_ = cfg_.eta * norm2(gamma);
    axpy(-cfg_.eta, gamma, beta_);
  }

  SrftSketch sketch_;
  SketchAccumulator acc_;
  QrFactors qr_;
  LowRankFactors factors_;
  double last_correction_norm_ = 0.0;
};

inline std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg, DenseVector beta0) {
  switch (cfg.variant) {
    case Variant::sgd: return std::make_unique<SgdOptimizer>(cfg, std::move(beta0));
    case Variant::adagrad_diag:
      return std::make_unique<AdagradDiagOptimizer>(cfg, std::move(beta0));
    case Variant::ada_full: return std::make_unique<AdaFullOptimizer>(cfg, std::move(beta0));
    case Variant::ada_lr: return std::make_unique<AdaLrOptimizer>(cfg, std::move(beta0));
    case Variant::radagrad:
    case Variant::rada_vr: {
      // rada_vr's per-step engine is radagrad; the outer loop lives in
      // rada_vr_run
      OptimizerConfig inner = cfg;
      inner.variant = Variant::radagrad;
      return std::make_unique<RadagradOptimizer>(inner, std::move(beta0));
    }
  }
  throw std::invalid_argument("make_optimizer: unknown variant");
}

// ---- variance reduction ----

// Full-batch pivot gradient (mean convention by default, sum if requested).
inline DenseVector vr_pivot(const Problem& problem, const DenseVector& beta,
                            bool sum_convention = false) {
  const std::size_t n = problem.num_samples();
  require(n >= 1, "vr_pivot: empty dataset");
  DenseVector acc(problem.dim(), 0.0), g(problem.dim());
  for (std::size_t i = 0; i < n; ++i) {
    problem.loss_grad(i, beta, g);
    axpy(1.0, g, acc);
  }
  if (!sum_convention)
    for (double& x : acc) x /= static_cast<double>(n);
  return acc;
}

// g = grad f_i(beta) - grad f_i(pivot) + mu; unbiased for the mean gradient
// when i is uniform and mu = vr_pivot(problem, pivot).
inline DenseVector vr_gradient(const Problem& problem, const DenseVector& beta,
                               const DenseVector& pivot_beta, const DenseVector& mu,
                               std::size_t i) {
  DenseVector g(problem.dim()), gp(problem.dim());
  problem.loss_grad(i, beta, g);
  problem.loss_grad(i, pivot_beta, gp);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] += mu[j] - gp[j];
  return g;
}

struct VrRunResult {
  DenseVector beta;
  std::vector<double> epoch_train_loss;  // mean loss after each outer epoch
  long grad_evals = 0;                   // single-sample gradient evaluations
};

// Outer SVRG loop around radagrad steps: per epoch recompute the pivot
// gradient, run m corrected inner steps on variance-reduced gradients, and
// move the pivot to the last iterate. Warm-started with diagonal passes.
inline VrRunResult rada_vr_run(const Problem& problem, const OptimizerConfig& cfg,
                               const DenseVector& beta0, std::size_t epochs) {
  require(cfg.variant == Variant::rada_vr, "rada_vr_run: config.variant must be rada_vr");
  validate(cfg);
  const std::size_t n = problem.num_samples();
  require(n >= 1, "rada_vr_run: empty dataset");
  const std::size_t m = cfg.vr_update_freq > 0 ? cfg.vr_update_freq : 5 * n;

  VrRunResult out;
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  DenseVector pivot = beta0;
  if (cfg.vr_warmup_epochs > 0) {
    OptimizerConfig warm_cfg = cfg;
    warm_cfg.variant = Variant::adagrad_diag;
    auto warm = make_optimizer(warm_cfg, beta0);
    Rng shuffle_rng(substream_seed(cfg.seed, "vr-warmup"));
    DenseVector g(problem.dim());
    std::vector<std::size_t> perm(all);
    for (std::size_t e = 0; e < cfg.vr_warmup_epochs; ++e) {
      shuffle_rng.shuffle(perm);
      for (std::size_t i : perm) {
        problem.loss_grad(i, warm->beta(), g);
        warm->step(g);
        ++out.grad_evals;
      }
    }
    pivot = warm->beta();
  }

  OptimizerConfig inner_cfg = cfg;
  inner_cfg.variant = Variant::radagrad;
  auto inner = make_optimizer(inner_cfg, pivot);
  Rng sample_rng(substream_seed(cfg.seed, "vr-sample"));

  for (std::size_t s = 0; s < epochs; ++s) {
    const DenseVector mu = vr_pivot(problem, pivot, cfg.vr_pivot_sum);
    out.grad_evals += static_cast<long>(n);
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t i = sample_rng.uniform_index(n);
      const DenseVector g = vr_gradient(problem, inner->beta(), pivot, mu, i);
      out.grad_evals += 2;
      inner->step(g);
    }
    pivot = inner->beta();
    out.epoch_train_loss.push_back(problem.mean_loss(pivot, all));
  }
  out.beta = inner->beta();
  return out;
}

}  // namespace radopt

#endif  // RADOPT_OPTIM_HPP
