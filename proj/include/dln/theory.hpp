#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dln/data.hpp"
#include "dln/network.hpp"
#include "dln/sweep.hpp"
#include "dln/trajectory.hpp"

namespace dln {

// Per-iteration contraction factor of the L2 distance bound:
//   max{ 1 - eta / (kappa_r(W_{L:l+1})^2 kappa_{r_x}(W_{l-1:1} X)^2), eta - 1 }
// An infinite condition number makes the first branch 1.
double gamma_factor(const Matrix& above, const Matrix& below_x, double eta, Eigen::Index r, Eigen::Index r_x);
double gamma_factor(const Network& net, const Dataset& data, const SweepState& state, double eta, Eigen::Index r,
                    Eigen::Index r_x);

// Default dim(K): rank of the top layer's column space, capped by n_L.
Eigen::Index default_subspace_dim(const Network& net);

// R_L = 2 / ((5L - 3) + sqrt((5L - 3)^2 - 4L))
double basin_ratio(int depth);
// h(L) = L R_L (1 - R_L)^{2L-2} / (1 + R_L)^{3L-1}
double basin_h(int depth);

struct BasinConstants {
  double R_L = 0.0;
  double h_L = 0.0;
  double c = 0.0;
  double sigma_tilde_min = 0.0;  // sigma_min(W* X) / ||X||
  double basin_radius = 0.0;     // sigma_tilde_min / c
  double gamma_sweep = 0.0;      // 1 - eta / (5 kappa(X)^2); one sweep contracts by gamma_sweep^{2L}
  double kappa_x = 0.0;
};

// X must have full row rank (HypothesisError otherwise); 0 < eta <= 1.
BasinConstants basin_constants(const Matrix& x, const Matrix& w_star, int depth, double eta);

struct DepthBound {
  int depth = 1;
  int rounds = 0;
  bool converged = true;
};

// Smallest L with
//   L >= log(sigma_min(W* X) / (c(L) ||(W0 - W*) X||_F)) / log(1 - eta / kappa(X)^2),
// found by fixed-point iteration on L because c depends on L through h(L).
// `initial_dist` is ||(W0 - W*) X||_F. At most 100 rounds.
DepthBound min_depth_one_sweep(const Matrix& x, const Matrix& w_star, double initial_dist, double eta);

struct AuditViolation {
  std::int64_t iteration = 0;
  double dist_before = 0.0;
  double dist_after = 0.0;
  double gamma = 0.0;
  double bound = 0.0;
};

struct AuditReport {
  std::size_t steps_checked = 0;
  std::vector<AuditViolation> violations;
  std::vector<std::int64_t> vacuous;  // iterations with gamma >= 1
  double tolerance = 0.0;
  double cumulative_bound = 0.0;
  double final_dist = 0.0;
  bool cumulative_ok = true;

  bool ok() const { return violations.empty() && cumulative_ok; }
  bool all_vacuous() const { return steps_checked > 0 && vacuous.size() == steps_checked; }
  std::string summary() const;
};

// Checks dist_after <= dist_before * gamma^2 + tolerance per step and the
// telescoped product over the whole run, with tolerance = 1e-10 times the
// largest distance seen.
AuditReport verify_trajectory(const Trajectory& traj, const std::vector<double>& gammas);
// Uses each record's gamma_bound; every record must carry one.
AuditReport verify_trajectory(const Trajectory& traj);

}  // namespace dln
