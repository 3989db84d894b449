#include "dln/loss.hpp"

#include "dln/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dln {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void check_shapes(const Network& net, const Dataset& data) {
  if (net.dim(0) != data.d_in() || net.dim(net.depth()) != data.d_out()) {
    throw DomainError("network dims (" + std::to_string(net.dim(0)) + " -> " +
                      std::to_string(net.dim(net.depth())) + ") do not match dataset (" +
                      std::to_string(data.d_in()) + " -> " + std::to_string(data.d_out()) + ")");
  }
  if (data.X.cols() != data.Y.cols()) throw DomainError("dataset X and Y column counts differ");
}

}  // namespace

LossFunction LossFunction::l2() {
  LossFunction f;
  f.name_ = "l2";
  f.power_ = 2;
  f.report_scale_ = 2.0;
  f.value_ = [](double z, double b) { return 0.5 * (z - b) * (z - b); };
  f.deriv_ = [](double z, double b) { return z - b; };
  f.curvature_ = [](double, double) { return 1.0; };
  return f;
}

LossFunction LossFunction::lp(int p) {
  if (p < 2 || p % 2 != 0) throw DomainError("Lp loss requires an even p >= 2, got " + std::to_string(p));
  if (p == 2) return l2();
  LossFunction f;
  f.name_ = "lp:" + std::to_string(p);
  f.power_ = p;
  f.report_scale_ = static_cast<double>(p);
  const double inv_p = 1.0 / p;
  f.value_ = [p, inv_p](double z, double b) { return ipow(z - b, p) * inv_p; };
  f.deriv_ = [p](double z, double b) { return ipow(z - b, p - 1); };
  f.curvature_ = [p](double z, double b) { return (p - 1) * ipow(z - b, p - 2); };
  return f;
}

LossFunction LossFunction::custom(std::string name, Pointwise value, Pointwise deriv, Pointwise curvature_bound,
                                  double report_scale) {
  LossFunction f;
  f.name_ = std::move(name);
  f.value_ = std::move(value);
  f.deriv_ = std::move(deriv);
  f.curvature_ = std::move(curvature_bound);
  f.report_scale_ = report_scale;
  return f;
}

LossFunction LossFunction::parse(std::string_view spec) {
  if (spec == "l2") return l2();
  if (spec.substr(0, 3) == "lp:") {
    const std::string rest(spec.substr(3));
    std::size_t used = 0;
    int p = 0;
    try {
      p = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || rest.empty()) throw DomainError("bad loss spec '" + std::string(spec) + "'");
    return lp(p);
  }
  throw DomainError("unknown loss '" + std::string(spec) + "' (expected l2 or lp:<p>)");
}

double loss_of_predictions(const Matrix& pred, const Matrix& y, const LossFunction& lf) {
  if (lf.is_l2()) return 0.5 * (pred - y).squaredNorm();
  double s = 0.0;
  for (Eigen::Index j = 0; j < pred.cols(); ++j)
    for (Eigen::Index i = 0; i < pred.rows(); ++i) s += lf.value(pred(i, j), y(i, j));
  return s;
}

double total_loss(const Network& net, const Dataset& data, const LossFunction& lf) {
  check_shapes(net, data);
  return loss_of_predictions(end_to_end(net) * data.X, data.Y, lf);
}

Matrix loss_derivative(const Matrix& pred, const Matrix& y, const LossFunction& lf) {
  if (lf.is_l2()) return pred - y;
  Matrix d(pred.rows(), pred.cols());
  for (Eigen::Index j = 0; j < pred.cols(); ++j)
    for (Eigen::Index i = 0; i < pred.rows(); ++i) d(i, j) = lf.deriv(pred(i, j), y(i, j));
  return d;
}

double curvature_max(const Matrix& pred, const Matrix& y, const LossFunction& lf) {
  if (lf.is_l2()) return 1.0;
  double c = 0.0;
  for (Eigen::Index j = 0; j < pred.cols(); ++j)
    for (Eigen::Index i = 0; i < pred.rows(); ++i) c = std::max(c, std::abs(lf.curvature_bound(pred(i, j), y(i, j))));
  return c;
}

Matrix j_matrix(const Network& net, const Dataset& data, const LossFunction& lf) {
  check_shapes(net, data);
  return loss_derivative(end_to_end(net) * data.X, data.Y, lf).transpose();
}

Matrix layer_gradient(const Matrix& above, const Matrix& weight, const Matrix& below_x, const Matrix& y,
                      const LossFunction& lf) {
  const Matrix pred = above * (weight * below_x);
  return above.transpose() * loss_derivative(pred, y, lf) * below_x.transpose();
}

Matrix layer_gradient(const Network& net, const Dataset& data, const LossFunction& lf, int l) {
  check_shapes(net, data);
  if (l < 1 || l > net.depth()) {
    throw DomainError("layer_gradient: layer " + std::to_string(l) + " outside 1.." + std::to_string(net.depth()));
  }
  const Matrix above = partial_product(net, net.depth(), l + 1);
  const Matrix below_x = partial_product(net, l - 1, 1) * data.X;
  return layer_gradient(above, net.layer(l), below_x, data.Y, lf);
}

double display_value(double dist) { return std::max(dist, kDisplayFloor); }

double normalized_distance(double loss, double oracle_loss, const LossFunction& lf, Eigen::Index m) {
  return lf.report_scale() * (loss - oracle_loss) / static_cast<double>(m);
}

ErrorReport error_report(const Network& net, const Dataset& data, const LossFunction& lf, double oracle_loss) {
  check_shapes(net, data);
  const Matrix pred = end_to_end(net) * data.X;
  ErrorReport r;
  r.total_loss = loss_of_predictions(pred, data.Y, lf);
  r.dist_to_opt = normalized_distance(r.total_loss, oracle_loss, lf, data.m());
  r.dist_display = display_value(r.dist_to_opt);
  r.residual_frobenius = (pred - data.Y).norm();
  return r;
}

}  // namespace dln
