#include "dln/optim.hpp"

#include "dln/errors.hpp"
#include "dln/textio.hpp"
#include "dln/theory.hpp"

#include <cmath>
#include <sstream>

namespace dln {

LrPolicy LrPolicy::theory(double eta) {
  if (!(eta > 0.0 && eta < 2.0)) throw DomainError("theory learning rate needs 0 < eta < 2, got " + format_double(eta));
  return {LrKind::theory_l2, eta, 2};
}

LrPolicy LrPolicy::lp(int p) {
  if (p < 2 || p % 2 != 0) throw DomainError("lp policy needs an even p >= 2, got " + std::to_string(p));
  return {LrKind::near_optimal_lp, 1.0, p};
}

LrPolicy LrPolicy::constant(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("constant learning rate must be finite and >= 0");
  return {LrKind::constant, eta, 2};
}

LrPolicy LrPolicy::parse(std::string_view spec) {
  const std::string s(trim(spec));
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : s.substr(colon + 1);
  auto need_arg = [&]() {
    if (arg.empty()) throw DomainError("policy '" + s + "' needs an argument");
  };
  auto no_arg = [&]() {
    if (colon != std::string::npos) throw DomainError("policy '" + head + "' takes no argument");
  };
  try {
    if (head == "theory") {
      need_arg();
      return theory(parse_double(arg, 0));
    }
    if (head == "const") {
      need_arg();
      return constant(parse_double(arg, 0));
    }
    if (head == "lp") {
      need_arg();
      const double p = parse_double(arg, 0);
      if (p != std::floor(p)) throw DomainError("lp policy needs an integer p");
      return lp(static_cast<int>(p));
    }
  } catch (const ParseError& e) {
    throw DomainError("bad policy argument in '" + s + "': " + e.what());
  }
  if (head == "optimal") {
    no_arg();
    return optimal();
  }
  if (head == "convex") {
    no_arg();
    return convex();
  }
  if (head == "general") {
    no_arg();
    return general();
  }
  throw DomainError("unknown policy '" + s + "'");
}

std::string LrPolicy::to_string() const {
  switch (kind) {
    case LrKind::theory_l2: return "theory:" + format_double(eta);
    case LrKind::optimal_l2: return "optimal";
    case LrKind::convex_safe: return "convex";
    case LrKind::near_optimal_general: return "general";
    case LrKind::near_optimal_lp: return "lp:" + std::to_string(p);
    case LrKind::constant: return "const:" + format_double(eta);
  }
  return "?";
}

namespace {

void check_layer(const Network& net, int layer) {
  if (layer < 1 || layer > net.depth()) {
    throw DomainError("layer " + std::to_string(layer) + " outside 1.." + std::to_string(net.depth()));
  }
}

void check_data(const Network& net, const Dataset& data) {
  if (net.depth() < 1) throw DomainError("network has no layers");
  if (data.X.rows() != net.dim(0) || data.Y.rows() != net.dim(net.depth()) || data.X.cols() != data.Y.cols()) {
    throw DomainError("data shape does not match the network");
  }
}

void fill_context(LayerContext& ctx, const Matrix& weight, const Matrix& y, const LossFunction& lf) {
  ctx.pred = ctx.above * (weight * ctx.below_x);
  ctx.grad = ctx.above.transpose() * loss_derivative(ctx.pred, y, lf) * ctx.below_x.transpose();
}

double ratio_or_zero(double num, double den) { return den < kDegenerateDenominator ? 0.0 : num / den; }

void require_finite_step(const Matrix& m, const char* what, std::int64_t iteration, int layer) {
  if (!m.allFinite()) {
    std::ostringstream os;
    os << "non-finite " << what << " at iteration " << iteration << " (layer " << layer << ")";
    throw NonFiniteError(os.str());
  }
}

}  // namespace

LayerContext layer_context(const Network& net, const Dataset& data, const LossFunction& lf, int layer,
                           ProductCache& cache) {
  check_layer(net, layer);
  LayerContext ctx;
  ctx.layer = layer;
  ctx.above = cache.above(layer + 1);
  ctx.below_x = cache.below(layer - 1);
  fill_context(ctx, net.layer(layer), data.Y, lf);
  return ctx;
}

double compute_lr(const LrPolicy& policy, const LayerContext& ctx, const Matrix& y, const LossFunction& lf) {
  if (policy.kind == LrKind::constant) return policy.eta;
  if ((policy.kind == LrKind::theory_l2 || policy.kind == LrKind::optimal_l2) && !lf.is_l2()) {
    throw DomainError("policy " + policy.to_string() + " requires the L2 loss");
  }
  if (policy.kind == LrKind::theory_l2 || policy.kind == LrKind::convex_safe) {
    const double a = spectral_norm(ctx.above);
    const double b = spectral_norm(ctx.below_x);
    double den = a * a * b * b;
    if (policy.kind == LrKind::convex_safe) den *= curvature_max(ctx.pred, y, lf);
    return ratio_or_zero(policy.kind == LrKind::theory_l2 ? policy.eta : 1.0, den);
  }
  const double g2 = ctx.grad.squaredNorm();
  const double agb = (ctx.above * ctx.grad * ctx.below_x).squaredNorm();
  switch (policy.kind) {
    case LrKind::optimal_l2: return ratio_or_zero(g2, agb);
    case LrKind::near_optimal_general: return ratio_or_zero(g2, curvature_max(ctx.pred, y, lf) * agb);
    case LrKind::near_optimal_lp: {
      const double dmax = (ctx.pred - y).cwiseAbs().maxCoeff();
      const double c = (policy.p - 1) * std::pow(dmax, policy.p - 2);
      return ratio_or_zero(g2, c * agb);
    }
    default: break;
  }
  throw DomainError("unhandled learning-rate policy");
}

double compute_lr(const LrPolicy& policy, const Network& net, const Dataset& data, const LossFunction& lf,
                  const SweepState& state) {
  check_data(net, data);
  if (state.depth() != net.depth()) throw DomainError("sweep state depth does not match the network");
  ProductCache cache(net, data.X);
  const LayerContext ctx = layer_context(net, data, lf, state.current_layer(), cache);
  return compute_lr(policy, ctx, data.Y, lf);
}

StepRecord bcgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state,
                     const LrPolicy& policy, ProductCache& cache, const StepOptions& opts) {
  if (state.depth() != net.depth()) throw DomainError("sweep state depth does not match the network");
  const int l = state.current_layer();
  const Eigen::Index m = data.m();
  StepRecord rec;
  rec.iteration = state.iterations() + 1;
  rec.sweep = state.sweep;
  rec.layer = l;

  const LayerContext ctx = layer_context(net, data, lf, l, cache);
  require_finite_step(ctx.grad, "gradient", rec.iteration, l);
  rec.loss_before = loss_of_predictions(ctx.pred, data.Y, lf);
  rec.dist_before = normalized_distance(rec.loss_before, opts.oracle_loss, lf, m);
  rec.grad_frobenius = ctx.grad.norm();
  rec.lr = compute_lr(policy, ctx, data.Y, lf);
  rec.skipped = rec.lr == 0.0;
  if (opts.gamma) rec.gamma_bound = gamma_factor(ctx.above, ctx.below_x, opts.gamma->eta, opts.gamma->r, opts.gamma->r_x);

  if (!rec.skipped) {
    net.layer(l) -= rec.lr * ctx.grad;
    require_finite_step(net.layer(l), "weights", rec.iteration, l);
    cache.invalidate(l);
  }
  const Matrix& pred = cache.below(net.depth());
  rec.loss_after = loss_of_predictions(pred, data.Y, lf);
  if (!std::isfinite(rec.loss_after)) {
    throw NonFiniteError("non-finite loss at iteration " + std::to_string(rec.iteration));
  }
  rec.dist_after = normalized_distance(rec.loss_after, opts.oracle_loss, lf, m);
  state.advance();
  return rec;
}

StepRecord bcgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state,
                     const LrPolicy& policy, const StepOptions& opts) {
  check_data(net, data);
  ProductCache cache(net, data.X);
  return bcgd_step(net, data, lf, state, policy, cache, opts);
}

Trajectory run_bcgd(Network& net, const Dataset& data, const LossFunction& lf, const LrPolicy& policy,
                    Ordering ordering, const StopCriteria& stop, const StepOptions& opts,
                    const StepObserver& observer) {
  check_data(net, data);
  Trajectory traj;
  traj.meta.dims = net.dims();
  traj.meta.policy = policy.to_string();
  traj.meta.ordering = to_string(ordering);
  traj.meta.loss = lf.name();
  if (stop.max_sweeps < 0) throw DomainError("max_sweeps must be >= 0");

  SweepState state = SweepState::start(net.depth(), ordering);
  ProductCache cache(net, data.X);
  traj.steps.reserve(static_cast<std::size_t>(std::min<std::int64_t>(stop.max_sweeps * net.depth(), 1 << 20)));
  for (std::int64_t s = 0; s < stop.max_sweeps; ++s) {
    for (int pos = 0; pos < net.depth(); ++pos) {
      traj.steps.push_back(bcgd_step(net, data, lf, state, policy, cache, opts));
      if (observer) observer(traj.steps.back(), net);
    }
    if (stop.target_dist && traj.steps.back().dist_after <= *stop.target_dist) break;
  }
  return traj;
}

StepRecord gd_step(Network& net, const Dataset& data, const LossFunction& lf, double eta, const StepOptions& opts) {
  check_data(net, data);
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("gd_step: eta must be finite and >= 0");
  const int depth = net.depth();
  const Eigen::Index m = data.m();
  StepRecord rec;
  rec.lr = eta;
  rec.skipped = eta == 0.0;

  ProductCache cache(net, data.X);
  std::vector<Matrix> grads(static_cast<std::size_t>(depth));
  double g2 = 0.0;
  for (int l = 1; l <= depth; ++l) {
    const LayerContext ctx = layer_context(net, data, lf, l, cache);
    require_finite_step(ctx.grad, "gradient", 0, l);
    if (l == 1) rec.loss_before = loss_of_predictions(ctx.pred, data.Y, lf);
    g2 += ctx.grad.squaredNorm();
    grads[static_cast<std::size_t>(l - 1)] = ctx.grad;
  }
  rec.grad_frobenius = std::sqrt(g2);
  rec.dist_before = normalized_distance(rec.loss_before, opts.oracle_loss, lf, m);
  if (!rec.skipped) {
    for (int l = 1; l <= depth; ++l) {
      net.layer(l) -= eta * grads[static_cast<std::size_t>(l - 1)];
      require_finite_step(net.layer(l), "weights", 0, l);
    }
    cache.invalidate_all();
  }
  rec.loss_after = loss_of_predictions(cache.below(depth), data.Y, lf);
  if (!std::isfinite(rec.loss_after)) throw NonFiniteError("non-finite loss after a GD step");
  rec.dist_after = normalized_distance(rec.loss_after, opts.oracle_loss, lf, m);
  return rec;
}

Trajectory run_gd(Network& net, const Dataset& data, const LossFunction& lf, double eta, std::int64_t max_iterations,
                  std::optional<double> target_dist, const StepOptions& opts, const StepObserver& observer) {
  check_data(net, data);
  if (max_iterations < 0) throw DomainError("max_iterations must be >= 0");
  Trajectory traj;
  traj.meta.dims = net.dims();
  traj.meta.policy = "const:" + format_double(eta);
  traj.meta.loss = lf.name();
  for (std::int64_t k = 1; k <= max_iterations; ++k) {
    StepRecord rec = gd_step(net, data, lf, eta, opts);
    rec.iteration = k;
    rec.sweep = k - 1;
    rec.layer = 0;
    traj.steps.push_back(rec);
    if (observer) observer(traj.steps.back(), net);
    if (target_dist && rec.dist_after <= *target_dist) break;
  }
  return traj;
}

double reference_gd_rate(const Network& net, const Matrix& x) {
  const double nx = spectral_norm(x);
  if (nx == 0.0) throw DomainError("reference_gd_rate: X is zero");
  return static_cast<double>(net.dim(net.depth())) / (3.0 * net.depth() * nx * nx);
}

}  // namespace dln
