#include "dln/oracle.hpp"

#include "dln/errors.hpp"

namespace dln {

namespace {

void check_pair(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) throw DomainError("oracle: X and Y need the same number of columns");
  require_finite(x, "X");
  require_finite(y, "Y");
}

OracleSolution finish(Matrix w, const Matrix& x, const Matrix& y, Eigen::Index s) {
  OracleSolution sol;
  sol.residual_sq = (w * x - y).squaredNorm();
  sol.optimal_loss = 0.5 * sol.residual_sq;
  sol.effective_rank = s;
  sol.w_star = std::move(w);
  return sol;
}

}  // namespace

Matrix least_norm_solution(const Matrix& x, const Matrix& y) {
  check_pair(x, y);
  return y * pseudo_inverse(x);
}

Matrix general_solution(const Matrix& x, const Matrix& y, const Matrix& m) {
  check_pair(x, y);
  if (m.rows() != y.rows() || m.cols() != x.rows()) throw DomainError("general_solution: M must be n_L x n_0");
  const Matrix xp = pseudo_inverse(x);
  return y * xp + m * (x * xp - Matrix::Identity(x.rows(), x.rows()));
}

OracleSolution rank_constrained_solution(const Matrix& x, const Matrix& y, Eigen::Index n_star) {
  check_pair(x, y);
  if (n_star < 1) throw DomainError("rank_constrained_solution: n_star must be >= 1");
  const CompactSvd sx = compact_svd(x);
  if (sx.S.size() == 0) return finish(Matrix::Zero(y.rows(), x.rows()), x, y, 0);

  const Matrix yv = y * sx.V;
  const CompactSvd sy = compact_svd(yv);
  const Eigen::Index r_star = sy.S.size();
  if (r_star <= n_star) return finish(least_norm_solution(x, y), x, y, r_star);

  const Eigen::Index s = n_star;
  const Matrix truncated = sy.U.leftCols(s) * sy.S.head(s).asDiagonal() * sy.V.leftCols(s).transpose();
  Matrix w = truncated * sx.S.cwiseInverse().asDiagonal() * sx.U.transpose();
  return finish(std::move(w), x, y, s);
}

double optimal_loss(const Matrix& x, const Matrix& y, Eigen::Index n_star) {
  return rank_constrained_solution(x, y, n_star).optimal_loss;
}

}  // namespace dln
