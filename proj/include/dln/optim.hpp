#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "dln/data.hpp"
#include "dln/loss.hpp"
#include "dln/network.hpp"
#include "dln/sweep.hpp"
#include "dln/trajectory.hpp"

namespace dln {

enum class LrKind { theory_l2, optimal_l2, convex_safe, near_optimal_general, near_optimal_lp, constant };

struct LrPolicy {
  LrKind kind = LrKind::optimal_l2;
  double eta = 1.0;  // theory_l2 and constant
  int p = 2;         // near_optimal_lp

  static LrPolicy theory(double eta);
  static LrPolicy optimal() { return {LrKind::optimal_l2, 1.0, 2}; }
  static LrPolicy convex() { return {LrKind::convex_safe, 1.0, 2}; }
  static LrPolicy general() { return {LrKind::near_optimal_general, 1.0, 2}; }
  static LrPolicy lp(int p);
  static LrPolicy constant(double eta);

  // theory:<eta> | optimal | convex | general | lp:<p> | const:<eta>
  static LrPolicy parse(std::string_view spec);
  std::string to_string() const;
};

// Learning rates whose denominator falls below this are replaced by 0.
inline constexpr double kDegenerateDenominator = 1e-300;

// Quantities of one block update, evaluated at the current weights.
struct LayerContext {
  int layer = 0;
  Matrix above;    // W_{L:l+1}
  Matrix below_x;  // W_{l-1:1} X
  Matrix pred;     // W_{L:1} X
  Matrix grad;     // dL/dW_l
};

LayerContext layer_context(const Network& net, const Dataset& data, const LossFunction& lf, int layer,
                           ProductCache& cache);

double compute_lr(const LrPolicy& policy, const LayerContext& ctx, const Matrix& y, const LossFunction& lf);
double compute_lr(const LrPolicy& policy, const Network& net, const Dataset& data, const LossFunction& lf,
                  const SweepState& state);

// Contraction factor attached to each record (see gamma_factor).
struct GammaSpec {
  double eta = 1.0;
  Eigen::Index r = 0;    // dim of the subspace holding the columns of W_L
  Eigen::Index r_x = 0;  // rank of X
};

struct StepOptions {
  double oracle_loss = 0.0;         // L(W*) for the distance fields
  std::optional<GammaSpec> gamma;   // fill StepRecord::gamma_bound when set
};

// One Gauss-Seidel block update of layer state.current_layer(); advances
// `state`. The cache must belong to `net` and data.X.
StepRecord bcgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state,
                     const LrPolicy& policy, ProductCache& cache, const StepOptions& opts = {});
StepRecord bcgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state,
                     const LrPolicy& policy, const StepOptions& opts = {});

struct StopCriteria {
  std::int64_t max_sweeps = 100;
  std::optional<double> target_dist = 1e-10;  // checked at sweep boundaries
};

using StepObserver = std::function<void(const StepRecord&, const Network&)>;

Trajectory run_bcgd(Network& net, const Dataset& data, const LossFunction& lf, const LrPolicy& policy,
                    Ordering ordering, const StopCriteria& stop, const StepOptions& opts = {},
                    const StepObserver& observer = {});

// Simultaneous update of all layers from gradients taken at the pre-step
// weights.
StepRecord gd_step(Network& net, const Dataset& data, const LossFunction& lf, double eta,
                   const StepOptions& opts = {});

Trajectory run_gd(Network& net, const Dataset& data, const LossFunction& lf, double eta, std::int64_t max_iterations,
                  std::optional<double> target_dist, const StepOptions& opts = {},
                  const StepObserver& observer = {});

// n_L / (3 L ||X||^2), the wide-network GD rate used as a baseline.
double reference_gd_rate(const Network& net, const Matrix& x);

}  // namespace dln
