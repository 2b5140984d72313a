#include <catch2/catch_amalgamated.hpp>

#include "radopt/diagnostics.hpp"
#include "test_helpers.hpp"

using namespace radopt;

TEST_CASE("proximal_spectrum of the diagonal variant") {
  OptimizerConfig cfg;
  cfg.variant = Variant::adagrad_diag;
  auto opt = make_optimizer(cfg, DenseVector(3, 0.0));

  SpectrumReport fresh = proximal_spectrum(*opt, 3);
  for (double x : fresh.normalized) REQUIRE(x == 0.0);  // sum-to-one waived at zero

  opt->step({4.0, 2.0, 0.0});  // accumulator (16, 4, 0)
  const SpectrumReport rep = proximal_spectrum(*opt, 3);
  REQUIRE(rep.normalized[0] == Catch::Approx(4.0 / 6.0));
  REQUIRE(rep.normalized[1] == Catch::Approx(2.0 / 6.0));
  REQUIRE(rep.normalized[2] == 0.0);
  REQUIRE(rep.variant == "adagrad_diag");
  REQUIRE(rep.step == 1);
}

TEST_CASE("proximal_spectrum of ada_full on a rank-2 stream") {
  OptimizerConfig cfg;
  cfg.variant = Variant::ada_full;
  auto opt = make_optimizer(cfg, DenseVector(6, 0.0));
  Rng rng(substream_seed(71, "rank2"));
  const DenseMatrix basis = qr_decompose(test::random_matrix(6, 2, rng)).q;
  for (int t = 0; t < 10; ++t) {
    DenseVector g(6, 0.0);
    axpy(rng.normal(), basis.col(0), g);
    axpy(rng.normal(), basis.col(1), g);
    opt->step(g);
  }
  const SpectrumReport rep = proximal_spectrum(*opt, 6);
  int nonzero = 0;
  double sum = 0.0;
  for (double x : rep.normalized) {
    if (x != 0.0) ++nonzero;
    sum += x;
  }
  REQUIRE(nonzero == 2);
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-8));
  for (std::size_t i = 0; i + 1 < rep.normalized.size(); ++i)
    REQUIRE(rep.normalized[i] >= rep.normalized[i + 1]);
}

TEST_CASE("proximal_spectrum rejects sgd") {
  OptimizerConfig cfg;
  cfg.variant = Variant::sgd;
  auto opt = make_optimizer(cfg, DenseVector(2, 0.0));
  REQUIRE_THROWS_AS(proximal_spectrum(*opt, 2), std::invalid_argument);
}

TEST_CASE("regret_terms on elementary streams") {
  SECTION("single basis gradient") {
    DenseMatrix log(1, 4);
    log(0, 0) = 1.0;
    const RegretTerms terms = regret_terms(log, 2, 1);
    REQUIRE(terms.trace_sqrt_g == Catch::Approx(1.0));
    REQUIRE(terms.sum_col_norms == Catch::Approx(1.0));
    REQUIRE(terms.steps == 1);
  }
  SECTION("repeated basis gradient") {
    const std::size_t T = 9;
    DenseMatrix log(T, 4);
    for (std::size_t t = 0; t < T; ++t) log(t, 0) = 1.0;
    const RegretTerms terms = regret_terms(log, 2, 1);
    REQUIRE(terms.trace_sqrt_g == Catch::Approx(3.0));
    REQUIRE(terms.sum_col_norms == Catch::Approx(3.0));
  }
}

TEST_CASE("regret_terms exhibits the low-effective-rank gap") {
  // gradients = sqrt(lambda_j)-scaled basis rows: tr(G^{1/2}) = sum sqrt(lambda)
  const std::size_t p = 125;
  DenseMatrix log(p, p);
  double expect = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double lam = 30.0 * std::pow(static_cast<double>(j + 1), -1.3);
    log(j, j) = std::sqrt(lam);
    expect += std::sqrt(lam);
  }
  const RegretTerms terms = regret_terms(log, 25, 25);
  REQUIRE(terms.trace_sqrt_g == Catch::Approx(expect).epsilon(1e-10));
  // far below the worst-case p * max_j sqrt(lambda_j)
  REQUIRE(terms.trace_sqrt_g <= 0.2 * static_cast<double>(p) * std::sqrt(30.0));
  REQUIRE(terms.epsilon == Catch::Approx(approx_error_radius(
                               p, 25, 30.0 * std::pow(26.0, -1.3))).epsilon(1e-10));
}

TEST_CASE("regret_terms cauchy-schwarz ordering") {
  Rng rng(substream_seed(72, "cs"));
  for (int rep = 0; rep < 5; ++rep) {
    const DenseMatrix log = test::random_matrix(30, 12, rng);
    const RegretTerms terms = regret_terms(log, 4, 4);
    REQUIRE(terms.trace_sqrt_g <= std::sqrt(12.0) * terms.sum_col_norms + 1e-9);
  }
}

TEST_CASE("timing_profile medians are monotone and stable") {
  const std::vector<std::size_t> dims{64, 128, 256};
  const TimingProfile prof = timing_profile(Variant::adagrad_diag, dims, 8, 9);
  REQUIRE(prof.median_step_us.size() == 3);
  for (std::size_t i = 0; i + 1 < prof.median_step_us.size(); ++i)
    REQUIRE(prof.median_step_us[i] <= prof.median_step_us[i + 1] * 1.2);
  REQUIRE(std::isfinite(prof.exponent));

  const TimingProfile again = timing_profile(Variant::adagrad_diag, {128}, 8, 18);
  const double a = prof.median_step_us[1], b = again.median_step_us[0];
  REQUIRE(std::abs(a - b) <= 0.35 * std::max(a, b));  // medians agree within noise

  REQUIRE_THROWS_AS(timing_profile(Variant::sgd, dims, 8, 4), std::invalid_argument);
}

TEST_CASE("appendix checks pass on seeded instances") {
  const std::vector<CheckResult> results = appendix_checks(1000);
  REQUIRE(results.size() == 3);
  for (const CheckResult& r : results) {
    INFO(r.name << " measured=" << r.measured << " bound=" << r.bound);
    REQUIRE(r.pass);
  }
}
