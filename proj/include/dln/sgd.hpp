#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dln/data.hpp"
#include "dln/loss.hpp"
#include "dln/network.hpp"
#include "dln/optim.hpp"
#include "dln/sweep.hpp"
#include "dln/trajectory.hpp"

namespace dln {

struct SampleDist {
  std::vector<double> probs;

  // Inverse-CDF draw.
  std::int64_t sample(std::mt19937_64& engine) const;
};

// pi(i) = ||p_i^T P||^2 / ||P^T P||_F^2 with P = W_{l-1:1} X and p_i its
// i-th column; the squared row norms of P^T P, normalized.
SampleDist sampling_distribution(const Matrix& below_x);
SampleDist sampling_distribution(const Network& net, const Dataset& data, const SweepState& state);

// sigma_min^2(P) / sigma_max^2(W_{L:l+1}) * eta / ||p_i^T P||^2, 0 < eta < 2.
double bcsgd_lr(const Matrix& above, const Matrix& below_x, std::int64_t i, double eta);
double bcsgd_lr(const Network& net, const Dataset& data, const SweepState& state, std::int64_t i, double eta);

// Samples i from pi, then W_l <- W_l - eta_i A^T (A W_l p_i - y_i) p_i^T.
// L2 loss only. Records the sampled column in sample_index.
StepRecord bcsgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state, double eta,
                      std::mt19937_64& engine, const StepOptions& opts = {});

struct FloorBracket {
  double gamma_upp = 1.0;
  double gamma_low = 0.0;
  double M_upp = 0.0;
  double M_low = 0.0;
  double floor_upper = 0.0;
  double floor_lower = 0.0;
  bool available = false;
};

// Running sup/inf of the per-iteration quantities the floor formulas assume
// bounded: M_upp = sup kappa^4(A) kt^4(P), M_low = inf kt^4(P),
// sup gamma_upp and inf gamma_low.
class FloorTracker {
 public:
  explicit FloorTracker(double eta);
  void observe(const Matrix& above, const Matrix& below_x);
  // `residual_sq` is ||W* X - Y||_F^2.
  FloorBracket bracket(double residual_sq, int depth) const;
  std::size_t observations() const { return count_; }

 private:
  double eta_;
  double m_upp_ = 0.0;
  double m_low_ = kInfinity;
  double gap_upp_ = kInfinity;   // inf of 1 - gamma_upp
  double gap_low_ = -kInfinity;  // sup of 1 - gamma_low
  std::size_t count_ = 0;
  bool degenerate_ = false;
};

// Observes the current state in `tracker`, then returns the bracket
//   floor_upper = eta^2 L* / (M_low (1 - gamma_upp^L)),
//   floor_lower = eta^2 L* / (M_upp (1 - gamma_low^L)),
// with L* = ||W* X - Y||_F^2.
FloorBracket floor_brackets(const Network& net, const Dataset& data, const SweepState& state, double eta,
                            double residual_sq, FloorTracker& tracker);

struct BcsgdOptions {
  double eta = 0.5;
  std::int64_t sweeps = 100;
  std::uint64_t seed = 0;
  Ordering ordering = Ordering::ascending;
  double oracle_loss = 0.0;       // L(W*) in loss units
  std::optional<Matrix> w_star;   // enables the squared-distance series
};

struct BcsgdRun {
  Trajectory trajectory;
  // ||(W_{L:1} - W*) X||_F^2 after every step; empty without w_star.
  std::vector<double> sq_dist;
  FloorBracket bracket;
};

BcsgdRun run_bcsgd(Network& net, const Dataset& data, const BcsgdOptions& opts, const StepObserver& observer = {});

}  // namespace dln
