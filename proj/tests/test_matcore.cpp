#include <doctest.h>

#include "dln/data.hpp"
#include "dln/errors.hpp"
#include "dln/matcore.hpp"
#include "helpers.hpp"

using namespace dln;
using testutil::gaussian;

TEST_CASE("compact_svd of small explicit matrices") {
  const CompactSvd s = compact_svd(Matrix::Identity(3, 3));
  CHECK(s.S.size() == 3);
  CHECK((s.S - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s.U * s.V.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  const CompactSvd t = compact_svd(d);
  REQUIRE(t.S.size() == 1);
  CHECK(t.S(0) == doctest::Approx(3.0));
  CHECK(std::abs(t.U(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(t.V(0, 0)) == doctest::Approx(1.0));
  CHECK(t.U(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("compact_svd reconstructs and is orthonormal") {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = gaussian(4 + trial % 3, 3 + trial % 4, g);
    const CompactSvd s = compact_svd(a);
    const Matrix rec = s.U * s.S.asDiagonal() * s.V.transpose();
    CHECK((a - rec).norm() / a.norm() < 1e-10);
    const auto k = s.S.size();
    CHECK((s.U.transpose() * s.U - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.V.transpose() * s.V - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index i = 1; i < k; ++i) CHECK(s.S(i) <= s.S(i - 1));
  }
}

TEST_CASE("pseudo_inverse") {
  CHECK((pseudo_inverse(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm() < 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix p = pseudo_inverse(d);
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK(p(1, 1) == 0.0);

  std::mt19937_64 g(2);
  const Matrix x = gaussian(3, 7, g);
  // normal-equation form for full row rank
  const Matrix ne = x.transpose() * (x * x.transpose()).ldlt().solve(Matrix::Identity(3, 3));
  CHECK(testutil::rel_err(pseudo_inverse(x), ne) < 1e-10);

  const Matrix sq = gaussian(5, 5, g);
  CHECK(testutil::rel_err(pseudo_inverse(pseudo_inverse(sq)), sq) < 1e-8);
}

TEST_CASE("singular values and rank") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 5, 2, 1;
  const Vector s = singular_values(d);
  CHECK(s(0) == doctest::Approx(5));
  CHECK(s(1) == doctest::Approx(2));
  CHECK(s(2) == doctest::Approx(1));
  const Vector z = singular_values(Matrix::Zero(2, 3));
  CHECK(z.size() == 2);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
  CHECK(numeric_rank(Matrix::Zero(2, 3)) == 0);

  std::mt19937_64 g(3);
  const Matrix a = gaussian(2, 6, g);
  const Matrix shaped = reshape_spectrum(a, {1.0, 0.5}, 9);
  const Vector t = singular_values(shaped);
  CHECK(std::abs(t(0) - 1.0) < 1e-10);
  CHECK(std::abs(t(1) - 0.5) < 1e-10);

  const Matrix r = gaussian(6, 2, g) * gaussian(2, 5, g);
  CHECK(numeric_rank(r) == 2);
  const SpectralSummary sum = spectral_summary(r);
  CHECK(sum.spectral_norm == doctest::Approx(sum.singular_values(0)));
  CHECK(std::abs(sum.frobenius_norm * sum.frobenius_norm - sum.singular_values.squaredNorm()) <
        1e-10 * sum.frobenius_norm * sum.frobenius_norm);
}

TEST_CASE("norm inequalities on random matrices") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = gaussian(3 + trial % 4, 2 + trial % 5, g);
    const double sp = spectral_norm(a);
    const double fro = a.norm();
    const double rk = static_cast<double>(numeric_rank(a));
    CHECK(sp <= fro * (1 + 1e-12));
    CHECK(fro <= std::sqrt(rk) * sp * (1 + 1e-12));
  }
}

TEST_CASE("matrix_norms") {
  const MatrixNorms i2 = matrix_norms(Matrix::Identity(2, 2), 2, 2);
  CHECK(i2.pq == doctest::Approx(std::sqrt(2.0)));
  CHECK(i2.max == 1.0);
  CHECK(i2.spectral == doctest::Approx(1.0));

  Matrix three(1, 1);
  three << 3;
  const MatrixNorms t = matrix_norms(three, 1.5, 7);
  CHECK(t.spectral == doctest::Approx(3));
  CHECK(t.frobenius == doctest::Approx(3));
  CHECK(t.pq == doctest::Approx(3));
  CHECK(t.max == doctest::Approx(3));

  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  double direct = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) direct += std::pow(a(i, j), 4);
  CHECK(lpq_norm(a, 4, 4) == doctest::Approx(std::pow(direct, 0.25)).epsilon(1e-14));
  CHECK(lpq_norm(a, 4, 4) == doctest::Approx(std::pow(354.0, 0.25)));

  // mixed p, q against a column-wise loop
  const double p = 3, q = 1.5;
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    double col = 0.0;
    for (int i = 0; i < 2; ++i) col += std::pow(std::abs(a(i, j)), p);
    acc += std::pow(col, q / p);
  }
  CHECK(lpq_norm(a, p, q) == doctest::Approx(std::pow(acc, 1 / q)).epsilon(1e-14));
  CHECK_THROWS_AS(lpq_norm(a, 0.5, 2), DomainError);
}

TEST_CASE("cond_numbers") {
  const CondNumbers c = cond_numbers(Matrix::Identity(4, 4), 4);
  CHECK(c.kappa_r == doctest::Approx(1));
  CHECK(c.kappa_scaled == doctest::Approx(2));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  const CondNumbers inf = cond_numbers(d, 2);
  CHECK(inf.kappa_r == kInfinity);
  CHECK(inf.kappa_scaled == kInfinity);

  Matrix e = Matrix::Zero(3, 3);
  e.diagonal() << 10, 1, 0.1;
  const CondNumbers f = cond_numbers(e, 3);
  CHECK(f.kappa_r == doctest::Approx(100));
  CHECK(f.kappa_scaled == doctest::Approx(std::sqrt(101.01) / 0.1));

  std::mt19937_64 g(5);
  const Matrix a = gaussian(5, 4, g);
  double prev = 0.0;
  for (Eigen::Index r = 1; r <= 4; ++r) {
    const double k = cond_numbers(a, r).kappa_r;
    CHECK(k >= prev);
    prev = k;
  }
  CHECK_THROWS_AS(cond_numbers(a, 5), DomainError);
  CHECK(kappa_or_infinite(a, 5) == kInfinity);
  CHECK(kappa_or_infinite(a, 4) == doctest::Approx(cond_numbers(a, 4).kappa_r));
}

TEST_CASE("non-finite input is rejected") {
  Matrix a = Matrix::Ones(2, 2);
  a(1, 0) = std::nan("");
  CHECK_THROWS_AS(require_finite(a), DomainError);
  CHECK_THROWS_AS(compact_svd(a), DomainError);
}
