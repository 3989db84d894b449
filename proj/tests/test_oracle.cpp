#include <doctest.h>

#include "dln/errors.hpp"
#include "dln/oracle.hpp"
#include "helpers.hpp"

using namespace dln;
using testutil::gaussian;
using testutil::rel_err;

namespace {

double half_sq(const Matrix& w, const Matrix& x, const Matrix& y) { return 0.5 * (w * x - y).squaredNorm(); }

}  // namespace

TEST_CASE("identity input returns the targets") {
  std::mt19937_64 g(1);
  const Matrix y = gaussian(2, 4, g);
  const OracleSolution s = rank_constrained_solution(Matrix::Identity(4, 4), y, 2);
  CHECK(rel_err(s.w_star, y) < 1e-12);
  CHECK(s.optimal_loss < 1e-24);
}

TEST_CASE("full row rank matches the normal equations") {
  std::mt19937_64 g(2);
  const Matrix x = gaussian(4, 12, g);
  const Matrix y = gaussian(3, 12, g);
  const Matrix normal = y * x.transpose() * (x * x.transpose()).inverse();
  CHECK(rel_err(least_norm_solution(x, y), normal) < 1e-10);
  CHECK(rel_err(rank_constrained_solution(x, y, 3).w_star, normal) < 1e-10);

  // whitened inputs: X X^T = I
  const Eigen::HouseholderQR<Matrix> qr(gaussian(12, 4, g));
  const Matrix xw = (qr.householderQ() * Matrix::Identity(12, 4)).transpose();
  CHECK(rel_err(least_norm_solution(xw, y), y * xw.transpose()) < 1e-10);
}

TEST_CASE("general solution family") {
  std::mt19937_64 g(3);
  // rank-deficient X: 5 features in a 3-dimensional subspace
  const Matrix x = gaussian(5, 3, g) * gaussian(3, 10, g);
  const Matrix y = gaussian(2, 10, g);
  const Matrix w0 = least_norm_solution(x, y);
  const double base = half_sq(w0, x, y);
  for (int k = 0; k < 100; ++k) {
    const Matrix w = general_solution(x, y, gaussian(2, 5, g, 3.0));
    CHECK(std::abs(half_sq(w, x, y) - base) <= 1e-9 * std::max(1.0, base));
    CHECK(w.norm() >= w0.norm() - 1e-10);
  }
  CHECK_THROWS_AS(general_solution(x, y, Matrix::Zero(3, 5)), DomainError);
}

TEST_CASE("rank constraint follows Eckart-Young in the whitened frame") {
  std::mt19937_64 g(4);
  const Matrix x = gaussian(4, 6, g);
  const Matrix y = gaussian(3, 6, g);
  const OracleSolution s = rank_constrained_solution(x, y, 1);
  CHECK(numeric_rank(s.w_star) == 1);
  CHECK(s.effective_rank == 1);
  CHECK(s.optimal_loss == doctest::Approx(half_sq(s.w_star, x, y)).epsilon(1e-10));
  CHECK(s.residual_sq == doctest::Approx(2.0 * s.optimal_loss).epsilon(1e-12));

  // residual = (unconstrained residual) + tail singular values of Y Vx
  const CompactSvd sx = compact_svd(x);
  const Vector t = singular_values(y * sx.V);
  const double unconstrained = (y - y * sx.V * sx.V.transpose()).squaredNorm();
  CHECK(s.residual_sq == doctest::Approx(unconstrained + t(1) * t(1) + t(2) * t(2)).epsilon(1e-10));

  // no random rank-1 candidate does better
  for (int k = 0; k < 500; ++k) {
    const Matrix cand = gaussian(3, 1, g) * gaussian(1, 4, g);
    CHECK(half_sq(cand, x, y) >= s.optimal_loss - 1e-12);
  }
}

TEST_CASE("oracle loss properties") {
  std::mt19937_64 g(5);
  const Matrix x = gaussian(5, 9, g);
  const Matrix w = gaussian(3, 2, g) * gaussian(2, 5, g);
  CHECK(optimal_loss(x, w * x, 2) < 1e-20 * (w * x).squaredNorm());

  const Matrix y = gaussian(3, 9, g);
  // at full rank the residual is the projection onto the complement of row(X)
  const Matrix proj = x.transpose() * pseudo_inverse(x.transpose());
  CHECK(optimal_loss(x, y, 3) == doctest::Approx(0.5 * (y - y * proj).squaredNorm()).epsilon(1e-10));

  double prev = kInfinity;
  for (Eigen::Index n = 1; n <= 4; ++n) {
    const double v = optimal_loss(x, y, n);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(rank_constrained_solution(x, y, 0), DomainError);
}
