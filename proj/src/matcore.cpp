#include "dln/matcore.hpp"

#include "dln/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dln {

namespace {

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::BDCSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Eigen::Index count_above(const Vector& s, double tol) {
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  return r;
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + " contains non-finite entries");
  }
}

double rank_tolerance(const Matrix& a, double sigma_max) {
  return static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max *
         std::numeric_limits<double>::epsilon();
}

CompactSvd compact_svd(const Matrix& a) {
  require_finite(a, "compact_svd input");
  if (a.size() == 0) {
    return {Matrix(a.rows(), 0), Vector(0), Matrix(a.cols(), 0)};
  }
  auto svd = thin_svd(a);
  const Vector& s = svd.singularValues();
  const Eigen::Index r = count_above(s, rank_tolerance(a, s(0)));
  return {svd.matrixU().leftCols(r), s.head(r), svd.matrixV().leftCols(r)};
}

Matrix pseudo_inverse(const Matrix& a) {
  const CompactSvd svd = compact_svd(a);
  if (svd.S.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  return svd.V * svd.S.cwiseInverse().asDiagonal() * svd.U.transpose();
}

Vector singular_values(const Matrix& a) {
  require_finite(a, "singular_values input");
  if (a.size() == 0) return Vector(0);
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

Eigen::Index numeric_rank(const Matrix& a) {
  const Vector s = singular_values(a);
  if (s.size() == 0) return 0;
  return count_above(s, rank_tolerance(a, s(0)));
}

SpectralSummary spectral_summary(const Matrix& a) {
  SpectralSummary out;
  out.singular_values = singular_values(a);
  if (out.singular_values.size() == 0) return out;
  out.spectral_norm = out.singular_values(0);
  out.numeric_rank = count_above(out.singular_values, rank_tolerance(a, out.spectral_norm));
  out.frobenius_norm = a.norm();
  return out;
}

double spectral_norm(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

double lpq_norm(const Matrix& a, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) {
    throw DomainError("L_{p,q} norm requires p >= 1 and q >= 1");
  }
  double outer = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double inner = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) inner += std::pow(std::abs(a(i, j)), p);
    outer += std::pow(inner, q / p);
  }
  return std::pow(outer, 1.0 / q);
}

MatrixNorms matrix_norms(const Matrix& a, double p, double q) {
  require_finite(a, "matrix_norms input");
  MatrixNorms n;
  n.pq = lpq_norm(a, p, q);
  n.spectral = spectral_norm(a);
  n.frobenius = a.norm();
  n.max = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  return n;
}

double kappa_or_infinite(const Matrix& a, Eigen::Index r) {
  if (r < 1) throw DomainError("kappa: r must be >= 1");
  if (r > std::min(a.rows(), a.cols())) return kInfinity;
  return cond_numbers(a, r).kappa_r;
}

CondNumbers cond_numbers(const Matrix& a, Eigen::Index r) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  if (r < 1 || r > k) {
    throw DomainError("cond_numbers: r=" + std::to_string(r) + " outside 1.." + std::to_string(k));
  }
  const Vector s = singular_values(a);
  const double tol = rank_tolerance(a, s(0));
  CondNumbers out;
  const double sr = s(r - 1);
  const double smin = s(k - 1);
  out.kappa_r = (s(0) == 0.0 || sr <= tol) ? kInfinity : s(0) / sr;
  out.kappa_scaled = (s(0) == 0.0 || smin <= tol) ? kInfinity : a.norm() / smin;
  return out;
}

}  // namespace dln
