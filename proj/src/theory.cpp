#include "dln/theory.hpp"

#include "dln/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dln {

double gamma_factor(const Matrix& above, const Matrix& below_x, double eta, Eigen::Index r, Eigen::Index r_x) {
  const double ka = kappa_or_infinite(above, r);
  const double kb = kappa_or_infinite(below_x, r_x);
  double branch = 1.0;
  if (std::isfinite(ka) && std::isfinite(kb)) branch = 1.0 - eta / (ka * ka * kb * kb);
  return std::max(branch, eta - 1.0);
}

double gamma_factor(const Network& net, const Dataset& data, const SweepState& state, double eta, Eigen::Index r,
                    Eigen::Index r_x) {
  const int l = state.current_layer();
  const Matrix above = partial_product(net, net.depth(), l + 1);
  const Matrix below_x = partial_product(net, l - 1, 1) * data.X;
  return gamma_factor(above, below_x, eta, r, r_x);
}

Eigen::Index default_subspace_dim(const Network& net) {
  return std::min(numeric_rank(net.layer(net.depth())), net.dim(net.depth()));
}

double basin_ratio(int depth) {
  if (depth < 1) throw DomainError("basin_ratio: depth must be >= 1");
  const double a = 5.0 * depth - 3.0;
  const double disc = std::max(a * a - 4.0 * depth, 0.0);
  return 2.0 / (a + std::sqrt(disc));
}

double basin_h(int depth) {
  const double r = basin_ratio(depth);
  const double L = depth;
  // log form keeps (1+R)^{3L-1} from overflowing at large L
  if (r == 1.0) return L * std::pow(1.0 + r, -(3.0 * L - 1.0)) * (depth == 1 ? 1.0 : 0.0);
  const double log_h = std::log(L * r) + (2.0 * L - 2.0) * std::log1p(-r) - (3.0 * L - 1.0) * std::log1p(r);
  return std::exp(log_h);
}

BasinConstants basin_constants(const Matrix& x, const Matrix& w_star, int depth, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("basin_constants: eta must lie in (0, 1]");
  const SpectralSummary sx = spectral_summary(x);
  if (sx.numeric_rank < x.rows()) {
    throw HypothesisError("basin_constants: X must have full row rank (rank " + std::to_string(sx.numeric_rank) +
                          " < " + std::to_string(x.rows()) + ")");
  }
  BasinConstants b;
  b.R_L = basin_ratio(depth);
  b.h_L = basin_h(depth);
  b.kappa_x = sx.singular_values(0) / sx.singular_values(x.rows() - 1);
  const Vector swx = singular_values(w_star * x);
  const double smin_wx = swx.size() ? swx(swx.size() - 1) : 0.0;
  b.sigma_tilde_min = smin_wx / sx.spectral_norm;
  const double k2 = b.kappa_x * b.kappa_x;
  const double hs = b.h_L * b.sigma_tilde_min;
  b.c = hs > 0.0 ? 1.0 + k2 * (1.0 + std::sqrt(1.0 + 4.0 * hs / k2)) / (2.0 * hs) : kInfinity;
  b.basin_radius = std::isfinite(b.c) ? b.sigma_tilde_min / b.c : 0.0;
  b.gamma_sweep = 1.0 - eta / (5.0 * k2);
  return b;
}

DepthBound min_depth_one_sweep(const Matrix& x, const Matrix& w_star, double initial_dist, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("min_depth_one_sweep: eta must lie in (0, 1]");
  if (!(initial_dist >= 0.0)) throw DomainError("min_depth_one_sweep: initial_dist must be >= 0");
  DepthBound out;
  if (initial_dist == 0.0) return out;
  const Vector swx = singular_values(w_star * x);
  const double smin_wx = swx.size() ? swx(swx.size() - 1) : 0.0;
  const Vector sx = singular_values(x);
  const double kx = sx(0) / sx(sx.size() - 1);
  const double denom = std::log(1.0 - eta / (kx * kx));
  if (!(denom < 0.0)) throw DomainError("min_depth_one_sweep: eta / kappa(X)^2 must be positive");

  const int kMaxRounds = 100;
  int depth = 1;
  for (int round = 1; round <= kMaxRounds; ++round) {
    const BasinConstants b = basin_constants(x, w_star, depth, eta);
    const double ratio = smin_wx / (b.c * initial_dist);
    const double bound = ratio > 0.0 ? std::log(ratio) / denom : kInfinity;
    if (!std::isfinite(bound) || bound > 1e9) {
      out = {depth, round, false};
      return out;
    }
    const int next = std::max(1, static_cast<int>(std::ceil(bound - 1e-12)));
    out.rounds = round;
    if (next == depth) {
      out.depth = depth;
      out.converged = true;
      return out;
    }
    depth = next;
  }
  out.depth = depth;
  out.converged = false;
  return out;
}

std::string AuditReport::summary() const {
  std::ostringstream os;
  os << "steps checked: " << steps_checked << "\n"
     << "violations: " << violations.size() << "\n"
     << "vacuous steps (gamma >= 1): " << vacuous.size() << "\n"
     << "cumulative bound: " << cumulative_bound << " final distance: " << final_dist
     << (cumulative_ok ? " (ok)" : " (VIOLATED)") << "\n";
  for (const auto& v : violations) {
    os << "  iteration " << v.iteration << ": dist " << v.dist_after << " > bound " << v.bound
       << " (gamma " << v.gamma << ", before " << v.dist_before << ")\n";
  }
  if (all_vacuous()) os << "note: every step had gamma >= 1; the bound is vacuous\n";
  os << (ok() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

AuditReport verify_trajectory(const Trajectory& traj, const std::vector<double>& gammas) {
  if (gammas.size() != traj.steps.size()) {
    throw DomainError("verify_trajectory: " + std::to_string(gammas.size()) + " gammas for " +
                      std::to_string(traj.steps.size()) + " steps");
  }
  AuditReport rep;
  if (traj.steps.empty()) return rep;
  double scale = 0.0;
  for (const auto& s : traj.steps) scale = std::max({scale, std::abs(s.dist_before), std::abs(s.dist_after)});
  rep.tolerance = 1e-10 * scale;

  double product = 1.0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const StepRecord& s = traj.steps[k];
    const double g = gammas[k];
    ++rep.steps_checked;
    if (g >= 1.0) rep.vacuous.push_back(s.iteration);
    const double bound = s.dist_before * g * g + rep.tolerance;
    if (s.dist_after > bound) rep.violations.push_back({s.iteration, s.dist_before, s.dist_after, g, bound});
    product *= g * g;
  }
  rep.final_dist = traj.steps.back().dist_after;
  rep.cumulative_bound = traj.steps.front().dist_before * product + rep.tolerance;
  rep.cumulative_ok = rep.final_dist <= rep.cumulative_bound;
  return rep;
}

AuditReport verify_trajectory(const Trajectory& traj) {
  std::vector<double> gammas;
  gammas.reserve(traj.steps.size());
  for (const auto& s : traj.steps) {
    if (!s.gamma_bound) {
      throw DomainError("verify_trajectory: iteration " + std::to_string(s.iteration) + " has no gamma bound");
    }
    gammas.push_back(*s.gamma_bound);
  }
  return verify_trajectory(traj, gammas);
}

}  // namespace dln
