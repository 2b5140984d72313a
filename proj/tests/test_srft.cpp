#include <catch2/catch_amalgamated.hpp>
#include <chrono>

#include "radopt/srft.hpp"
#include "test_helpers.hpp"

using namespace radopt;

TEST_CASE("srft_new shapes and determinism") {
  const SrftSketch s = srft_new(125, 25, 10, 42);
  REQUIRE(s.ell == 35);
  REQUIRE(s.fft_len == 128);
  REQUIRE(s.scale == Catch::Approx(std::sqrt(128.0 / 35.0)));

  const SrftSketch t = srft_new(125, 25, 10, 42);
  REQUIRE(s.signs == t.signs);
  REQUIRE(s.sample_indices == t.sample_indices);

  const SrftSketch u = srft_new(125, 25, 10, 43);
  REQUIRE(s.sample_indices != u.sample_indices);

  const SrftSketch full = srft_new(8, 8, 0, 7);
  REQUIRE(full.ell == 8);
  REQUIRE(full.scale == Catch::Approx(1.0));  // power-of-two p: scale = sqrt(p/ell)

  REQUIRE_THROWS_AS(srft_new(8, 8, 1, 0), std::invalid_argument);
}

TEST_CASE("srft invariants") {
  const SrftSketch s = srft_new(100, 20, 10, 5);
  std::vector<bool> seen(s.fft_len, false);
  for (std::size_t k : s.sample_indices) {
    REQUIRE(k < s.fft_len);
    REQUIRE(!seen[k]);
    seen[k] = true;
  }
  for (double x : s.signs) REQUIRE(std::abs(x) == 1.0);
}

TEST_CASE("srft_apply is linear") {
  const SrftSketch s = srft_new(60, 10, 5, 3);
  Rng rng(substream_seed(3, "lin"));
  DenseVector x(60), y(60);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();

  const DenseVector zero = srft_apply(s, DenseVector(60, 0.0));
  for (double v : zero) REQUIRE(v == 0.0);

  DenseVector combo(60);
  for (std::size_t i = 0; i < 60; ++i) combo[i] = 2.5 * x[i] - 0.75 * y[i];
  const DenseVector lhs = srft_apply(s, combo);
  const DenseVector sx = srft_apply(s, x);
  const DenseVector sy = srft_apply(s, y);
  for (std::size_t i = 0; i < s.ell; ++i)
    REQUIRE(lhs[i] == Catch::Approx(2.5 * sx[i] - 0.75 * sy[i]).margin(1e-10));

  REQUIRE_THROWS_AS(srft_apply(s, DenseVector(59, 0.0)), std::invalid_argument);
}

TEST_CASE("full-dimension sketch is an exact isometry") {
  Rng rng(substream_seed(4, "iso_full"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SrftSketch s = srft_new(16, 12, 4, seed);
    DenseVector g(16);
    for (double& v : g) v = rng.normal();
    const DenseVector y = srft_apply(s, g);
    REQUIRE(dot(y, y) == Catch::Approx(dot(g, g)).epsilon(1e-12));
  }
}

TEST_CASE("isometry in expectation over seeds") {
  Rng rng(substream_seed(5, "iso"));
  DenseVector g(64);
  for (double& v : g) v = rng.normal();
  const double ng2 = dot(g, g);

  double mean = 0.0;
  const int nseeds = 2000;
  for (int seed = 0; seed < nseeds; ++seed) {
    const SrftSketch s = srft_new(64, 12, 4, static_cast<std::uint64_t>(seed));
    const DenseVector y = srft_apply(s, g);
    mean += dot(y, y) / ng2;
  }
  mean /= nseeds;
  REQUIRE(mean >= 0.97);
  REQUIRE(mean <= 1.03);
}

TEST_CASE("isometry in expectation with zero padding") {
  Rng rng(substream_seed(6, "iso_pad"));
  DenseVector g(125);
  for (double& v : g) v = rng.normal();
  const double ng2 = dot(g, g);

  double mean = 0.0;
  const int nseeds = 2000;
  for (int seed = 0; seed < nseeds; ++seed) {
    const SrftSketch s = srft_new(125, 25, 10, static_cast<std::uint64_t>(seed));
    const DenseVector y = srft_apply(s, g);
    mean += dot(y, y) / ng2;
  }
  mean /= nseeds;
  REQUIRE(mean >= 0.97);
  REQUIRE(mean <= 1.03);
}

TEST_CASE("srft_apply runtime is near-linear in p") {
  std::vector<double> log_p, log_t;
  for (std::size_t e = 10; e <= 14; ++e) {
    const std::size_t p = std::size_t{1} << e;
    const SrftSketch s = srft_new(p, 16, 8, 1);
    DenseVector g(p);
    Rng rng(substream_seed(7, "timing", e));
    for (double& v : g) v = rng.normal();

    for (int warm = 0; warm < 3; ++warm) (void)srft_apply(s, g);
    std::vector<double> times;
    for (int rep = 0; rep < 15; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const DenseVector y = srft_apply(s, g);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count() + y[0] * 0.0);
    }
    std::sort(times.begin(), times.end());
    log_p.push_back(std::log(static_cast<double>(p)));
    log_t.push_back(std::log(times[times.size() / 2]));
  }
  // least-squares slope of log(t) against log(p)
  const std::size_t n = log_p.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += log_p[i];
    my += log_t[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (log_p[i] - mx) * (log_t[i] - my);
    den += (log_p[i] - mx) * (log_p[i] - mx);
  }
  REQUIRE(num / den <= 1.3);
}
