#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "dln/data.hpp"
#include "dln/network.hpp"

namespace dln {

// Pointwise loss l(z; b) with derivative l'(z; b) and a bound C(z; b) on
// |l''(z; b)|.
//
// `report_scale` converts loss differences into the error units used for
// reporting: for l = |z - b|^p / p it is p, so that
//   report_scale * (L(W) - L(W*)) = ||WX - Y||_{p,p}^p - ||W*X - Y||_{p,p}^p.
class LossFunction {
 public:
  using Pointwise = std::function<double(double z, double b)>;

  static LossFunction l2();
  // Even p >= 2 only.
  static LossFunction lp(int p);
  static LossFunction custom(std::string name, Pointwise value, Pointwise deriv, Pointwise curvature_bound,
                             double report_scale = 1.0);
  // "l2" or "lp:<p>".
  static LossFunction parse(std::string_view spec);

  double value(double z, double b) const { return value_(z, b); }
  double deriv(double z, double b) const { return deriv_(z, b); }
  double curvature_bound(double z, double b) const { return curvature_(z, b); }

  const std::string& name() const { return name_; }
  // 2 for L2, p for Lp, 0 for custom losses.
  int power() const { return power_; }
  bool is_l2() const { return power_ == 2; }
  double report_scale() const { return report_scale_; }

 private:
  std::string name_;
  Pointwise value_, deriv_, curvature_;
  int power_ = 0;
  double report_scale_ = 1.0;
};

// Sum over examples and output coordinates of l(prediction; target).
double total_loss(const Network& net, const Dataset& data, const LossFunction& lf);
double loss_of_predictions(const Matrix& pred, const Matrix& y, const LossFunction& lf);

// m x d_out matrix of l'(N_j(x^i); y^i_j). For L2 it is (W_{L:1} X - Y)^T.
Matrix j_matrix(const Network& net, const Dataset& data, const LossFunction& lf);

// Entrywise l' on d_out x m predictions (the transpose of the J matrix).
Matrix loss_derivative(const Matrix& pred, const Matrix& y, const LossFunction& lf);

// max_{ij} C(pred_ij; y_ij).
double curvature_max(const Matrix& pred, const Matrix& y, const LossFunction& lf);

// dL/dW_l = (W_L ... W_{l+1})^T J^T (W_{l-1} ... W_1 X)^T.
Matrix layer_gradient(const Network& net, const Dataset& data, const LossFunction& lf, int l);

// Same product given the two partial products; `above` is W_{L:l+1} and
// `below_x` is W_{l-1:1} X.
Matrix layer_gradient(const Matrix& above, const Matrix& weight, const Matrix& below_x, const Matrix& y,
                      const LossFunction& lf);

// Values below this are displayed as this value.
inline constexpr double kDisplayFloor = 1e-10;

struct ErrorReport {
  double total_loss = 0.0;
  // report_scale * (L(W) - L(W*)) / m; not floored.
  double dist_to_opt = 0.0;
  // dist_to_opt floored at kDisplayFloor.
  double dist_display = 0.0;
  // ||W_{L:1} X - Y||_F
  double residual_frobenius = 0.0;
};

double display_value(double dist);

// `oracle_loss` is L(W*) under the same loss function.
ErrorReport error_report(const Network& net, const Dataset& data, const LossFunction& lf, double oracle_loss);

// Normalized distance from a loss value: report_scale * (loss - oracle_loss) / m.
double normalized_distance(double loss, double oracle_loss, const LossFunction& lf, Eigen::Index m);

}  // namespace dln
