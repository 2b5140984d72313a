#include <catch2/catch_amalgamated.hpp>

#include "radopt/linalg.hpp"
#include "test_helpers.hpp"

using namespace radopt;
using test::max_abs_diff;
using test::orthonormality_error;
using test::random_matrix;
using test::random_psd;
using test::random_symmetric;

TEST_CASE("sym_eig diagonal matrix") {
  DenseMatrix a(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  const SymmetricEig se = sym_eig(a);
  REQUIRE(se.eigenvalues[0] == Catch::Approx(3.0));
  REQUIRE(se.eigenvalues[1] == Catch::Approx(2.0));
  REQUIRE(se.eigenvalues[2] == Catch::Approx(1.0));
  // eigenvectors are permuted identity columns
  REQUIRE(se.eigenvectors(0, 0) == Catch::Approx(1.0));
  REQUIRE(se.eigenvectors(2, 1) == Catch::Approx(1.0));
  REQUIRE(se.eigenvectors(1, 2) == Catch::Approx(1.0));
}

TEST_CASE("sym_eig identity") {
  const SymmetricEig se = sym_eig(DenseMatrix::identity(4));
  for (double lam : se.eigenvalues) REQUIRE(lam == Catch::Approx(1.0));
}

TEST_CASE("sym_eig reconstruction and orthonormality") {
  Rng rng(substream_seed(7, "sym_eig"));
  for (int rep = 0; rep < 20; ++rep) {
    const DenseMatrix a = random_symmetric(8, rng);
    const SymmetricEig se = sym_eig(a);
    REQUIRE(orthonormality_error(se.eigenvectors) <= 1e-8);
    REQUIRE(frobenius_distance(test::reconstruct_eig(se), a) <= 1e-7 * a.frobenius_norm());
    for (std::size_t i = 0; i + 1 < se.eigenvalues.size(); ++i)
      REQUIRE(se.eigenvalues[i] >= se.eigenvalues[i + 1]);
  }
}

TEST_CASE("sym_eig psd eigenvalues stay above -1e-10") {
  Rng rng(substream_seed(8, "sym_eig_psd"));
  for (int rep = 0; rep < 10; ++rep) {
    const SymmetricEig se = sym_eig(random_psd(12, rng));
    for (double lam : se.eigenvalues) REQUIRE(lam >= -1e-10);
  }
}

TEST_CASE("sym_eig rejects bad input") {
  REQUIRE_THROWS_AS(sym_eig(DenseMatrix(2, 3)), std::invalid_argument);
  DenseMatrix a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 0.5;
  REQUIRE_THROWS_AS(sym_eig(a), std::invalid_argument);
}

TEST_CASE("psd_inv_sqrt_apply scalar case") {
  DenseMatrix a(2, 2);
  a(0, 0) = a(1, 1) = 4.0;
  const DenseVector r = psd_inv_sqrt_apply(a, 0.0, {2.0, 4.0});
  REQUIRE(r[0] == Catch::Approx(1.0));
  REQUIRE(r[1] == Catch::Approx(2.0));
}

TEST_CASE("psd_inv_sqrt_apply pure regularizer") {
  const DenseMatrix a(3, 3);
  const DenseVector g{1.0, -2.0, 0.5};
  const DenseVector r = psd_inv_sqrt_apply(a, 1.0, g);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(r[i] == Catch::Approx(g[i]));
}

TEST_CASE("psd_inv_sqrt_apply rank-1 case") {
  Rng rng(substream_seed(9, "rank1"));
  DenseVector u(5);
  for (double& x : u) x = rng.normal();
  const double nu = norm2(u);
  for (double& x : u) x /= nu;
  DenseMatrix a(5, 5);
  rank1_add(a, u, u);
  const DenseVector r = psd_inv_sqrt_apply(a, 1.0, u);
  for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(r[i] == Catch::Approx(u[i] / 2.0).margin(1e-12));
}

TEST_CASE("psd_inv_sqrt_apply singular with zero delta") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;  // rank deficient
  REQUIRE_THROWS_AS(psd_inv_sqrt_apply(a, 0.0, {1.0, 1.0}), SingularityError);
}

TEST_CASE("qr_decompose identity") {
  const QrFactors f = qr_decompose(DenseMatrix::identity(3));
  REQUIRE(max_abs_diff(f.q, DenseMatrix::identity(3)) <= 1e-14);
  REQUIRE(max_abs_diff(f.r, DenseMatrix::identity(3)) <= 1e-14);
}

TEST_CASE("qr_decompose scaled orthogonal columns") {
  DenseMatrix a(4, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 3.0;
  const QrFactors f = qr_decompose(a);
  REQUIRE(f.q(0, 0) == Catch::Approx(1.0));
  REQUIRE(f.q(1, 1) == Catch::Approx(1.0));
  REQUIRE(f.r(0, 0) == Catch::Approx(2.0));
  REQUIRE(f.r(1, 1) == Catch::Approx(3.0));
  REQUIRE(f.r(0, 1) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("qr_decompose random reconstruction") {
  Rng rng(substream_seed(10, "qr"));
  for (int rep = 0; rep < 20; ++rep) {
    const DenseMatrix a = random_matrix(10, 4, rng);
    const QrFactors f = qr_decompose(a);
    REQUIRE(orthonormality_error(f.q) <= 1e-8);
    REQUIRE(frobenius_distance(matmul(f.q, f.r), a) <= 1e-8 * (1.0 + a.frobenius_norm()));
    for (std::size_t i = 1; i < f.r.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) REQUIRE(f.r(i, j) == 0.0);
  }
}

TEST_CASE("qr_decompose handles rank deficiency with fallback basis") {
  DenseMatrix a(5, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    a(i, 0) = 1.0 + static_cast<double>(i);
    a(i, 1) = 2.0 * a(i, 0);  // dependent column
    a(i, 2) = static_cast<double>(i * i);
  }
  const QrFactors f = qr_decompose(a);
  REQUIRE(orthonormality_error(f.q) <= 1e-10);
  REQUIRE(f.r(1, 1) == 0.0);
  REQUIRE(frobenius_distance(matmul(f.q, f.r), a) <= 1e-8 * (1.0 + a.frobenius_norm()));

  const QrFactors z = qr_decompose(DenseMatrix(6, 3));
  REQUIRE(orthonormality_error(z.q) <= 1e-12);
  REQUIRE(z.r.max_abs() == 0.0);
}

TEST_CASE("qr_decompose rejects wide input") {
  REQUIRE_THROWS_AS(qr_decompose(DenseMatrix(2, 4)), std::invalid_argument);
}

TEST_CASE("qr_rank1_update zero update reproduces factors") {
  Rng rng(substream_seed(11, "qr_upd0"));
  const DenseMatrix a = random_matrix(6, 3, rng);
  const QrFactors f = qr_decompose(a);
  const QrFactors g = qr_rank1_update(f, DenseVector(6, 0.0), {1.0, 2.0, 3.0});
  REQUIRE(max_abs_diff(f.q, g.q) == 0.0);
  REQUIRE(max_abs_diff(f.r, g.r) == 0.0);
}

TEST_CASE("qr_rank1_update diagonal bump") {
  QrFactors f{DenseMatrix::identity(2), DenseMatrix::identity(2)};
  DenseVector u{1.0, 0.0}, v{1.0, 0.0};
  const QrFactors g = qr_rank1_update(f, u, v);
  REQUIRE(max_abs_diff(g.q, DenseMatrix::identity(2)) <= 1e-14);
  REQUIRE(g.r(0, 0) == Catch::Approx(2.0));
  REQUIRE(g.r(1, 1) == Catch::Approx(1.0));
  REQUIRE(g.r(0, 1) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("qr_rank1_update agrees with recomputation") {
  Rng rng(substream_seed(12, "qr_upd"));
  for (int rep = 0; rep < 10; ++rep) {
    DenseMatrix a = random_matrix(12, 5, rng);
    const QrFactors f = qr_decompose(a);
    DenseVector u(12), v(5);
    for (double& x : u) x = rng.normal();
    for (double& x : v) x = rng.normal();
    const QrFactors g = qr_rank1_update(f, u, v);
    rank1_add(a, u, v);
    REQUIRE(orthonormality_error(g.q) <= 1e-8);
    REQUIRE(frobenius_distance(matmul(g.q, g.r), a) <= 1e-8 * (1.0 + a.frobenius_norm()));
  }
}

TEST_CASE("qr_rank1_update chained drift stays small") {
  // 50 chained updates at p=20, l=5
  Rng rng(substream_seed(13, "qr_chain"));
  DenseMatrix a(20, 5);
  QrFactors f = qr_decompose(a);
  for (int t = 0; t < 50; ++t) {
    DenseVector u(20), v(5);
    for (double& x : u) x = rng.normal();
    for (double& x : v) x = rng.normal();
    f = qr_rank1_update(f, u, v);
    rank1_add(a, u, v);
  }
  REQUIRE(orthonormality_error(f.q) <= 1e-6);
  REQUIRE(frobenius_distance(matmul(f.q, f.r), a) <= 1e-6 * (1.0 + a.frobenius_norm()));
}

TEST_CASE("qr_rank1_update rejects mismatched dimensions") {
  QrFactors f{DenseMatrix::identity(3), DenseMatrix::identity(3)};
  REQUIRE_THROWS_AS(qr_rank1_update(f, DenseVector(2, 1.0), DenseVector(3, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("svd_small diagonal and zero") {
  DenseMatrix b(2, 2);
  b(0, 0) = 5.0;
  b(1, 1) = 3.0;
  const SvdResult s = svd_small(b);
  REQUIRE(s.sigma[0] == Catch::Approx(5.0));
  REQUIRE(s.sigma[1] == Catch::Approx(3.0));

  const SvdResult z = svd_small(DenseMatrix(3, 4));
  for (double sig : z.sigma) REQUIRE(sig == 0.0);
  REQUIRE(orthonormality_error(z.u) <= 1e-14);
  REQUIRE(orthonormality_error(z.w) <= 1e-14);
}

TEST_CASE("svd_small matches eigenvalues on psd input") {
  Rng rng(substream_seed(14, "svd_psd"));
  const DenseMatrix g = random_psd(6, rng);
  const SvdResult s = svd_small(g);
  const SymmetricEig se = sym_eig(g);
  for (std::size_t k = 0; k < 6; ++k)
    REQUIRE(s.sigma[k] == Catch::Approx(se.eigenvalues[k]).epsilon(1e-8).margin(1e-10));
}

TEST_CASE("svd_small reconstruction on random shapes") {
  Rng rng(substream_seed(15, "svd_rec"));
  for (auto [m, n] : {std::pair<int, int>{6, 6}, {4, 9}, {9, 4}}) {
    const DenseMatrix b = random_matrix(m, n, rng);
    const SvdResult s = svd_small(b);
    DenseMatrix rec(m, n);
    for (std::size_t k = 0; k < s.sigma.size(); ++k)
      rank1_add(rec, s.u.col(k), s.w.col(k), s.sigma[k]);
    REQUIRE(frobenius_distance(rec, b) <= 1e-7 * b.frobenius_norm());
    REQUIRE(orthonormality_error(s.u) <= 1e-7);
    REQUIRE(orthonormality_error(s.w) <= 1e-7);
    for (std::size_t k = 0; k + 1 < s.sigma.size(); ++k) REQUIRE(s.sigma[k] >= s.sigma[k + 1]);
  }
}

TEST_CASE("spectral_norm basics") {
  DenseMatrix a(2, 2);
  a(0, 0) = 7.0;
  a(1, 1) = 2.0;
  REQUIRE(spectral_norm(a) == Catch::Approx(7.0));
  REQUIRE(spectral_norm(DenseMatrix(3, 3)) == 0.0);
}

TEST_CASE("spectral_norm matches svd") {
  Rng rng(substream_seed(16, "spec"));
  for (int rep = 0; rep < 10; ++rep) {
    const DenseMatrix a = random_matrix(10, 10, rng);
    const SvdResult s = svd_small(a);
    REQUIRE(spectral_norm(a) == Catch::Approx(s.sigma[0]).epsilon(1e-6));
  }
}

TEST_CASE("rank1_eig_update tracks a growing accumulator") {
  Rng rng(substream_seed(17, "eig_upd"));
  const std::size_t p = 30;
  DenseVector d(p, 0.0);
  DenseMatrix e = DenseMatrix::identity(p);
  DenseMatrix g(p, p);
  for (int t = 0; t < 50; ++t) {
    DenseVector v(p);
    for (double& x : v) x = rng.normal();
    rank1_eig_update(d, e, v);
    rank1_add(g, v, v);
  }
  REQUIRE(orthonormality_error(e) <= 1e-12 * 50);
  DenseMatrix rec(p, p);
  for (std::size_t k = 0; k < p; ++k) rank1_add(rec, e.col(k), e.col(k), d[k]);
  REQUIRE(frobenius_distance(rec, g) <= 1e-10 * g.frobenius_norm());
  for (std::size_t i = 0; i + 1 < p; ++i) REQUIRE(d[i] <= d[i + 1]);
}

TEST_CASE("rank1_eig_update is exact on axis-aligned updates") {
  const std::size_t p = 6;
  DenseVector d(p, 0.0);
  DenseMatrix e = DenseMatrix::identity(p);
  DenseVector acc(p, 0.0);
  const double vals[] = {2.0, -1.5, 0.25, 3.0};
  for (int t = 0; t < 4; ++t) {
    DenseVector v(p, 0.0);
    const std::size_t coord = static_cast<std::size_t>(t) % 3;
    v[coord] = vals[t];
    rank1_eig_update(d, e, v);
    acc[coord] += vals[t] * vals[t];
  }
  DenseVector sorted(acc);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < p; ++i) REQUIRE(d[i] == sorted[i]);
  // eigenvectors never rotated away from the canonical basis
  for (std::size_t j = 0; j < p; ++j) {
    double maxabs = 0.0;
    for (std::size_t i = 0; i < p; ++i) maxabs = std::max(maxabs, std::abs(e(i, j)));
    REQUIRE(maxabs == 1.0);
  }
}

TEST_CASE("rank1_eig_update handles clustered spectra") {
  Rng rng(substream_seed(18, "eig_cluster"));
  const std::size_t p = 12;
  DenseVector d(p, 1.0);  // fully degenerate start
  DenseMatrix e = DenseMatrix::identity(p);
  DenseMatrix g = DenseMatrix::identity(p);
  for (int t = 0; t < 8; ++t) {
    DenseVector v(p);
    for (double& x : v) x = rng.normal() * 1e-3;
    rank1_eig_update(d, e, v);
    rank1_add(g, v, v);
  }
  REQUIRE(orthonormality_error(e) <= 1e-11);
  DenseMatrix rec(p, p);
  for (std::size_t k = 0; k < p; ++k) rank1_add(rec, e.col(k), e.col(k), d[k]);
  REQUIRE(frobenius_distance(rec, g) <= 1e-11 * g.frobenius_norm());
}

TEST_CASE("rank1_eig_update matches cold eigendecomposition") {
  Rng rng(substream_seed(19, "eig_vs_cold"));
  const std::size_t p = 15;
  DenseVector d(p, 0.0);
  DenseMatrix e = DenseMatrix::identity(p);
  DenseMatrix g(p, p);
  for (int t = 0; t < 25; ++t) {
    DenseVector v(p);
    for (double& x : v) x = rng.normal();
    rank1_eig_update(d, e, v);
    rank1_add(g, v, v);
  }
  const SymmetricEig cold = sym_eig(g);
  for (std::size_t k = 0; k < p; ++k)
    REQUIRE(d[p - 1 - k] == Catch::Approx(cold.eigenvalues[k]).epsilon(1e-9).margin(1e-9));
}
