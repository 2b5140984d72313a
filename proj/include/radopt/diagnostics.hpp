#ifndef RADOPT_DIAGNOSTICS_HPP
#define RADOPT_DIAGNOSTICS_HPP

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "radopt/linalg.hpp"
#include "radopt/lowrank.hpp"
#include "radopt/matrix.hpp"
#include "radopt/optim.hpp"
#include "radopt/problems.hpp"
#include "radopt/rng.hpp"
#include "radopt/srft.hpp"

namespace radopt {

// Top-k proximal-term eigenvalues, normalized by the sum of the reported
// entries so the report is a probability vector.
struct SpectrumReport {
  std::string variant;
  DenseVector normalized;  // descending, sums to 1 when any entry is nonzero
  long step = 0;
};

inline SpectrumReport proximal_spectrum(const Optimizer& opt, std::size_t top_k) {
  const DenseVector spectrum = opt.proximal_eigenvalues();
  SpectrumReport report;
  report.variant = variant_name(opt.config().variant);
  report.step = opt.steps();
  report.normalized.assign(top_k, 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < top_k && k < spectrum.size(); ++k) {
    report.normalized[k] = spectrum[k];
    sum += spectrum[k];
  }
  if (sum > 0.0)
    for (double& x : report.normalized) x /= sum;
  return report;
}

// Proximal regret terms computed exactly from a log of gradients (rows are
// steps): the diagonal term sum_j ||g_{1:T,j}||, the full-matrix term
// tr(G_T^{1/2}), and the sketching error radius for the given tau and k.
struct RegretTerms {
  double trace_sqrt_g = 0.0;
  double sum_col_norms = 0.0;
  double epsilon = 0.0;
  std::size_t steps = 0;
};

inline RegretTerms regret_terms(const DenseMatrix& gradient_log, std::size_t tau, std::size_t k) {
  require(gradient_log.rows() >= 1, "regret_terms: need at least one step");
  const std::size_t p = gradient_log.cols();
  require(tau >= 1 && tau <= p, "regret_terms: need 1 <= tau <= p");

  RegretTerms out;
  out.steps = gradient_log.rows();
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < gradient_log.rows(); ++t)
      s += gradient_log(t, j) * gradient_log(t, j);
    out.sum_col_norms += std::sqrt(s);
  }

  const DenseMatrix g = matmul_at_b(gradient_log, gradient_log);
  const SymmetricEig se = sym_eig(g);
  for (double lam : se.eigenvalues) out.trace_sqrt_g += std::sqrt(std::max(lam, 0.0));
  const double sigma_kplus1 = k < p ? std::max(se.eigenvalues[k], 0.0) : 0.0;
  out.epsilon = approx_error_radius(p, tau, sigma_kplus1);
  return out;
}

// Median per-step wall time against dimension, with the log-log OLS slope.
struct TimingProfile {
  std::string variant;
  std::vector<std::size_t> dims;
  std::size_t tau = 0;
  std::vector<double> median_step_us;
  double exponent = 0.0;
};

namespace detail {

inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace detail

// Steady-state step cost: the accumulator is first saturated with p + 8
// dense gradients so rank-adaptive variants are measured at representative
// rank, then 3 warm-up steps are discarded and `reps` steps are timed on a
// single thread.
inline TimingProfile timing_profile(Variant variant, const std::vector<std::size_t>& p_list,
                                    std::size_t tau, int reps) {
  require(reps >= 5, "timing_profile: need reps >= 5");
  require(!p_list.empty(), "timing_profile: empty size list");

  TimingProfile prof;
  prof.variant = variant_name(variant);
  prof.dims = p_list;
  prof.tau = tau;

  std::vector<double> log_p, log_t;
  for (std::size_t p : p_list) {
    OptimizerConfig cfg;
    cfg.variant = variant;
    cfg.tau = std::min(tau, p > 10 ? p - 10 : p);
    cfg.oversample = std::min<std::size_t>(10, p - cfg.tau);
    cfg.seed = 1234;
    auto opt = make_optimizer(cfg, DenseVector(p, 0.0));

    Rng rng(substream_seed(1234, "timing-grads", p));
    DenseVector g(p);
    auto fill = [&] {
      for (double& x : g) x = rng.normal();
    };
    for (std::size_t t = 0; t < p + 8; ++t) {
      fill();
      opt->step(g);
    }
    for (int t = 0; t < 3; ++t) {
      fill();
      opt->step(g);
    }
    std::vector<double> times(static_cast<std::size_t>(reps));
    for (double& us : times) {
      fill();
      const auto t0 = std::chrono::steady_clock::now();
      opt->step(g);
      const auto t1 = std::chrono::steady_clock::now();
      us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    prof.median_step_us.push_back(median);
    log_p.push_back(std::log(static_cast<double>(p)));
    log_t.push_back(std::log(median));
  }
  prof.exponent = detail::ols_slope(log_p, log_t);
  return prof;
}

// ---- numerical spot checks of the supporting results ----

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst-case measured quantity
  double bound = 0.0;     // what it was compared against
};

namespace detail {

inline DenseMatrix haar_basis(std::size_t p, std::size_t r, Rng& rng) {
  DenseMatrix gauss(p, r);
  for (double& x : gauss.data()) x = rng.normal();
  return qr_decompose(gauss).q;
}

inline DenseMatrix psd_from_spectrum(const DenseMatrix& basis, const DenseVector& lambdas) {
  DenseMatrix g(basis.rows(), basis.rows());
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    rank1_add(g, basis.col(k), basis.col(k), lambdas[k]);
  return g;
}

inline DenseMatrix srft_range_basis(const DenseMatrix& g, const SrftSketch& s) {
  DenseMatrix sketched(g.rows(), s.ell);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const DenseVector y = srft_apply(s, g.col(i));
    for (std::size_t j = 0; j < s.ell; ++j) sketched(i, j) = y[j];
  }
  return qr_decompose(sketched).q;
}

}  // namespace detail

// Trace identity: tr((Q^T G Q)^{1/2}) = tr((Q Q^T G)^{1/2}). The right side
// is evaluated through the similar symmetric matrix G^{1/2} Q Q^T G^{1/2},
// an independent numerical route.
inline CheckResult check_trace_identity(std::uint64_t seed, int instances = 20) {
  CheckResult res{"trace-identity", true, 0.0, 1e-8};
  Rng rng(substream_seed(seed, "trace-identity"));
  for (int rep = 0; rep < instances; ++rep) {
    const std::size_t p = 20 + rng.uniform_index(31);  // p <= 50
    const std::size_t ell = 5 + rng.uniform_index(std::min<std::size_t>(p / 2, 15));
    DenseMatrix gauss(p, 2 * p);
    for (double& x : gauss.data()) x = rng.normal();
    DenseMatrix g = matmul(gauss, gauss.transposed());
    for (double& x : g.data()) x /= static_cast<double>(2 * p);

    const SrftSketch s = srft_new(p, ell, 0, substream_seed(seed, "ti-sketch", rep));
    const DenseMatrix q = detail::srft_range_basis(g, s);

    const SymmetricEig small = sym_eig(matmul_at_b(q, matmul(g, q)));
    double lhs = 0.0;
    for (double lam : small.eigenvalues) lhs += std::sqrt(std::max(lam, 0.0));

    const SymmetricEig ge = sym_eig(g);
    DenseMatrix ghalf(p, p);
    for (std::size_t k = 0; k < p; ++k)
      rank1_add(ghalf, ge.eigenvectors.col(k), ge.eigenvectors.col(k),
                std::sqrt(std::max(ge.eigenvalues[k], 0.0)));
    const DenseMatrix hq = matmul(ghalf, q);
    const SymmetricEig big = sym_eig(matmul(hq, hq.transposed()));
    double rhs = 0.0;
    const double clamp = 1e-10 * std::max(big.eigenvalues[0], 0.0);
    for (double lam : big.eigenvalues) rhs += lam > clamp ? std::sqrt(lam) : 0.0;

    res.measured = std::max(res.measured, std::abs(lhs - rhs));
  }
  res.pass = res.measured <= res.bound;
  return res;
}

// Summed proximal quadratic forms against twice the trace of the final
// truncated square root, on simulated low-effective-rank streams
// (T=50, p=20, tau=8). measured = worst (most negative) slack.
inline CheckResult check_proximal_sum_bound(std::uint64_t seed, int streams = 20) {
  CheckResult res{"proximal-sum-bound", true, 0.0, -1e-8};
  const std::size_t p = 20, tau = 8, T = 50;
  double worst = 1e300;
  for (int rep = 0; rep < streams; ++rep) {
    Rng rng(substream_seed(seed, "prox-sum", rep));
    DenseVector lambdas(p);
    for (std::size_t j = 0; j < p; ++j)
      lambdas[j] = 30.0 * std::pow(static_cast<double>(j + 1), -1.3);
    const DenseMatrix rot = detail::haar_basis(p, p, rng);
    const SrftSketch s = srft_new(p, tau, 10, substream_seed(seed, "prox-sketch", rep));

    DenseMatrix g_acc(p, p);
    double lhs = 0.0;
    LowRankFactors f;
    for (std::size_t t = 0; t < T; ++t) {
      DenseVector g(p, 0.0);
      for (std::size_t i = 0; i < p; ++i) {
        const double zi = std::sqrt(lambdas[i]) * rng.normal();
        for (std::size_t r = 0; r < p; ++r) g[r] += rot(r, i) * zi;
      }
      rank1_add(g_acc, g, g);
      f = randomized_svd_dense(g_acc, s, tau);
      const double floor = 1e-10 * std::max(f.sigma[0], 0.0);
      for (std::size_t k = 0; k < tau; ++k) {
        if (f.sigma[k] <= floor) continue;
        const double c = dot(f.v.col(k), g);
        lhs += c * c / std::sqrt(f.sigma[k]);
      }
    }
    double rhs = 0.0;
    for (std::size_t k = 0; k < tau; ++k) rhs += std::sqrt(std::max(f.sigma[k], 0.0));
    worst = std::min(worst, 2.0 * rhs - lhs);
  }
  res.measured = worst;
  res.pass = res.measured >= res.bound;
  return res;
}

// Range-finder error against the sketching radius on exact rank-k targets
// (p=128, k=8). The projection dimension formula exceeds p at this scale,
// so it is clamped to p; a 1e-10 * ||G|| floor absorbs round-off since
// sigma_{k+1} of an exact rank-k matrix is zero. measured = failure count.
inline CheckResult check_range_error_radius(std::uint64_t seed, int trials = 100) {
  CheckResult res{"range-error-radius", true, 0.0, 10.0};
  const std::size_t p = 128, k = 8;
  const double tau_formula = 4.0 * std::pow(std::sqrt(static_cast<double>(k)) +
                                                std::sqrt(8.0 * std::log(static_cast<double>(k * p))),
                                            2.0);
  const std::size_t tau = std::min(p, static_cast<std::size_t>(std::ceil(tau_formula)));
  int failures = 0;
  Rng rng(substream_seed(seed, "range-radius"));
  for (int trial = 0; trial < trials; ++trial) {
    DenseVector lambdas(k);
    for (std::size_t j = 0; j < k; ++j) lambdas[j] = rng.uniform(0.5, 4.0);
    const DenseMatrix basis = detail::haar_basis(p, k, rng);
    const DenseMatrix g = detail::psd_from_spectrum(basis, lambdas);

    const SrftSketch s = srft_new(p, tau, 0, substream_seed(seed, "rr-sketch", trial));
    const DenseMatrix q = detail::srft_range_basis(g, s);
    const double eps = approx_error_radius(p, tau, 0.0);
    const double allowed = eps + 1e-10 * spectral_norm(g);

    // ||R||_2 <= ||R||_F certifies a pass without power-iterating a
    // residual that is pure round-off (gap-free, slow to converge)
    DenseMatrix resid = g;
    const DenseMatrix proj = matmul(q, matmul_at_b(q, g));
    for (std::size_t i = 0; i < resid.data().size(); ++i) resid.data()[i] -= proj.data()[i];
    if (resid.frobenius_norm() > allowed && range_error(g, q) > allowed) ++failures;
  }
  res.measured = static_cast<double>(failures);
  res.pass = failures * 10 <= trials;  // <= 10 percent
  return res;
}

inline std::vector<CheckResult> appendix_checks(std::uint64_t seed) {
  return {check_trace_identity(seed), check_proximal_sum_bound(seed),
          check_range_error_radius(seed)};
}

}  // namespace radopt

#endif  // RADOPT_DIAGNOSTICS_HPP
