#pragma once

#include "dln/matcore.hpp"

namespace dln {

struct OracleSolution {
  Matrix w_star;              // d_out x d_in
  double optimal_loss = 0.0;  // (1/2) ||W* X - Y||_F^2
  double residual_sq = 0.0;   // ||W* X - Y||_F^2
  Eigen::Index effective_rank = 0;  // s = min(n*, rank(Y Vx))
};

// Y X^+
Matrix least_norm_solution(const Matrix& x, const Matrix& y);

// Y X^+ + M (X X^+ - I); every member attains the least-norm loss.
Matrix general_solution(const Matrix& x, const Matrix& y, const Matrix& m);

// Minimizer of ||W X - Y||_F over rank(W) <= n_star:
//   X = Ux Sx Vx^T,  best rank-s truncation of Y Vx,  W* = [Y Vx]_s Sx^{-1} Ux^T.
OracleSolution rank_constrained_solution(const Matrix& x, const Matrix& y, Eigen::Index n_star);

// optimal_loss of rank_constrained_solution, in the units of LossFunction::l2().
double optimal_loss(const Matrix& x, const Matrix& y, Eigen::Index n_star);

}  // namespace dln
