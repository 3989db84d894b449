#include "dln/sgd.hpp"

#include "dln/errors.hpp"
#include "dln/rng.hpp"
#include "dln/theory.hpp"

#include <algorithm>
#include <cmath>

namespace dln {

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 2.0)) throw DomainError("BCSGD needs 0 < eta < 2");
}

// sigma_min = sigma_{min(rows, cols)}, zero when rank deficient.
double sigma_min(const Vector& s) { return s.size() ? s(s.size() - 1) : 0.0; }

double pow4(double v) { return v * v * v * v; }

}  // namespace

std::int64_t SampleDist::sample(std::mt19937_64& engine) const {
  if (probs.empty()) throw DomainError("empty sampling distribution");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<std::int64_t>(i);
  }
  // u landed in the rounding gap above the last partial sum
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<std::int64_t>(i);
  }
  return static_cast<std::int64_t>(probs.size() - 1);
}

SampleDist sampling_distribution(const Matrix& below_x) {
  const Matrix gram = below_x.transpose() * below_x;
  const Vector rows = gram.rowwise().squaredNorm();
  const double total = rows.sum();
  if (!(total > 0.0)) throw DegenerateStateError("sampling distribution: W_{l-1:1} X is zero");
  SampleDist d;
  d.probs.resize(static_cast<std::size_t>(rows.size()));
  for (Eigen::Index i = 0; i < rows.size(); ++i) d.probs[static_cast<std::size_t>(i)] = rows(i) / total;
  return d;
}

SampleDist sampling_distribution(const Network& net, const Dataset& data, const SweepState& state) {
  const int l = state.current_layer();
  return sampling_distribution(partial_product(net, l - 1, 1) * data.X);
}

double bcsgd_lr(const Matrix& above, const Matrix& below_x, std::int64_t i, double eta) {
  check_eta(eta);
  if (i < 0 || i >= below_x.cols()) throw DomainError("bcsgd_lr: sample index out of range");
  const double smin = sigma_min(singular_values(below_x));
  const double smax = spectral_norm(above);
  const double col = (below_x.transpose() * below_x.col(i)).squaredNorm();
  const double den = smax * smax * col;
  if (den < kDegenerateDenominator) return 0.0;
  return smin * smin * eta / den;
}

double bcsgd_lr(const Network& net, const Dataset& data, const SweepState& state, std::int64_t i, double eta) {
  const int l = state.current_layer();
  return bcsgd_lr(partial_product(net, net.depth(), l + 1), partial_product(net, l - 1, 1) * data.X, i, eta);
}

StepRecord bcsgd_step(Network& net, const Dataset& data, const LossFunction& lf, SweepState& state, double eta,
                      std::mt19937_64& engine, const StepOptions& opts) {
  if (!lf.is_l2()) throw DomainError("BCSGD is defined for the L2 loss");
  check_eta(eta);
  if (state.depth() != net.depth()) throw DomainError("sweep state depth does not match the network");
  const int l = state.current_layer();
  const Eigen::Index m = data.m();
  StepRecord rec;
  rec.iteration = state.iterations() + 1;
  rec.sweep = state.sweep;
  rec.layer = l;

  const Matrix above = partial_product(net, net.depth(), l + 1);
  const Matrix below_x = partial_product(net, l - 1, 1) * data.X;
  rec.loss_before = loss_of_predictions(above * (net.layer(l) * below_x), data.Y, lf);
  rec.dist_before = normalized_distance(rec.loss_before, opts.oracle_loss, lf, m);

  const SampleDist dist = sampling_distribution(below_x);
  const std::int64_t i = dist.sample(engine);
  rec.sample_index = i;
  const Vector p = below_x.col(i);
  const Vector r = above * (net.layer(l) * p) - data.Y.col(i);
  const Matrix grad = (above.transpose() * r) * p.transpose();
  if (!grad.allFinite()) throw NonFiniteError("non-finite gradient at iteration " + std::to_string(rec.iteration));
  rec.grad_frobenius = grad.norm();
  rec.lr = bcsgd_lr(above, below_x, i, eta);
  rec.skipped = rec.lr == 0.0;
  if (opts.gamma) rec.gamma_bound = gamma_factor(above, below_x, opts.gamma->eta, opts.gamma->r, opts.gamma->r_x);
  if (!rec.skipped) net.layer(l) -= rec.lr * grad;

  rec.loss_after = loss_of_predictions(above * (net.layer(l) * below_x), data.Y, lf);
  if (!std::isfinite(rec.loss_after)) {
    throw NonFiniteError("non-finite loss at iteration " + std::to_string(rec.iteration));
  }
  rec.dist_after = normalized_distance(rec.loss_after, opts.oracle_loss, lf, m);
  state.advance();
  return rec;
}

FloorTracker::FloorTracker(double eta) : eta_(eta) { check_eta(eta); }

void FloorTracker::observe(const Matrix& above, const Matrix& below_x) {
  ++count_;
  const Vector sa = singular_values(above);
  const Vector sp = singular_values(below_x);
  const double smin_a = sigma_min(sa);
  const double smin_p = sigma_min(sp);
  if (!(smin_a > rank_tolerance(above, sa(0))) || !(smin_p > rank_tolerance(below_x, sp(0)))) {
    degenerate_ = true;
    return;
  }
  const double ka = sa(0) / smin_a;
  const double kp = sp(0) / smin_p;
  const double ktp = below_x.norm() / smin_p;
  // gaps 1 - gamma, kept apart from gamma so that tiny gaps survive rounding
  const double gap_u = (1.0 - std::pow(1.0 - eta_ / (ka * ka), 2)) / pow4(ktp);
  const double gap_l = (1.0 - std::pow(1.0 - eta_ / (kp * kp), 2)) * pow4(kp) / pow4(ktp);
  m_upp_ = std::max(m_upp_, pow4(ka) * pow4(ktp));
  m_low_ = std::min(m_low_, pow4(ktp));
  gap_upp_ = std::min(gap_upp_, gap_u);
  gap_low_ = std::max(gap_low_, gap_l);
}

FloorBracket FloorTracker::bracket(double residual_sq, int depth) const {
  FloorBracket b;
  b.available = count_ > 0 && !degenerate_;
  if (!b.available) return b;
  b.gamma_upp = 1.0 - gap_upp_;
  b.gamma_low = 1.0 - gap_low_;
  b.M_upp = m_upp_;
  b.M_low = m_low_;
  const double num = eta_ * eta_ * residual_sq;
  if (num == 0.0) {
    b.floor_upper = b.floor_lower = 0.0;
    return b;
  }
  // 1 - gamma^L = -expm1(L log(1 - gap))
  auto one_minus_pow = [depth](double gap) { return -std::expm1(depth * std::log1p(-gap)); };
  const double du = m_low_ * one_minus_pow(gap_upp_);
  const double dl = m_upp_ * one_minus_pow(gap_low_);
  b.floor_upper = du > 0.0 ? num / du : kInfinity;
  b.floor_lower = dl > 0.0 ? num / dl : kInfinity;
  return b;
}

FloorBracket floor_brackets(const Network& net, const Dataset& data, const SweepState& state, double eta,
                            double residual_sq, FloorTracker& tracker) {
  (void)eta;
  const int l = state.current_layer();
  tracker.observe(partial_product(net, net.depth(), l + 1), partial_product(net, l - 1, 1) * data.X);
  return tracker.bracket(residual_sq, net.depth());
}

BcsgdRun run_bcsgd(Network& net, const Dataset& data, const BcsgdOptions& opts, const StepObserver& observer) {
  check_eta(opts.eta);
  if (opts.sweeps < 0) throw DomainError("sweeps must be >= 0");
  const LossFunction lf = LossFunction::l2();
  BcsgdRun run;
  run.trajectory.meta.dims = net.dims();
  run.trajectory.meta.seed = opts.seed;
  run.trajectory.meta.policy = "bcsgd:" + std::to_string(opts.eta);
  run.trajectory.meta.ordering = to_string(opts.ordering);
  run.trajectory.meta.loss = lf.name();

  Rng rng(opts.seed, {21});
  SweepState state = SweepState::start(net.depth(), opts.ordering);
  FloorTracker tracker(opts.eta);
  StepOptions so;
  so.oracle_loss = opts.oracle_loss;
  const Matrix wsx = opts.w_star ? Matrix(*opts.w_star * data.X) : Matrix();
  const std::int64_t total = opts.sweeps * net.depth();
  run.trajectory.steps.reserve(static_cast<std::size_t>(total));
  for (std::int64_t k = 0; k < total; ++k) {
    const int l = state.current_layer();
    tracker.observe(partial_product(net, net.depth(), l + 1), partial_product(net, l - 1, 1) * data.X);
    run.trajectory.steps.push_back(bcsgd_step(net, data, lf, state, opts.eta, rng.engine(), so));
    if (opts.w_star) run.sq_dist.push_back((end_to_end(net) * data.X - wsx).squaredNorm());
    if (observer) observer(run.trajectory.steps.back(), net);
  }
  // the bracket takes L* in squared-residual units
  run.bracket = tracker.bracket(2.0 * opts.oracle_loss, net.depth());
  return run;
}

}  // namespace dln
