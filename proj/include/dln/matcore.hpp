#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string_view>

namespace dln {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sentinel for condition numbers of rank-deficient matrices.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct CompactSvd {
  Matrix U;  // rows x rank, orthonormal columns
  Vector S;  // nonincreasing, all above the rank tolerance
  Matrix V;  // cols x rank, orthonormal columns
};

struct SpectralSummary {
  Vector singular_values;  // length min(rows, cols), nonincreasing
  Eigen::Index numeric_rank = 0;
  double spectral_norm = 0.0;
  double frobenius_norm = 0.0;
};

struct MatrixNorms {
  double spectral = 0.0;
  double frobenius = 0.0;
  double pq = 0.0;
  double max = 0.0;
};

struct CondNumbers {
  double kappa_r = 1.0;       // sigma_max / sigma_r
  double kappa_scaled = 1.0;  // ||A||_F / sigma_min
};

// Throws DomainError naming `what` if any entry is NaN or Inf.
void require_finite(const Matrix& a, std::string_view what = "matrix");

// sigma_i is treated as zero when sigma_i <= max(rows, cols) * sigma_max * eps.
double rank_tolerance(const Matrix& a, double sigma_max);

CompactSvd compact_svd(const Matrix& a);
Matrix pseudo_inverse(const Matrix& a);

// All min(rows, cols) singular values, zeros included.
Vector singular_values(const Matrix& a);
Eigen::Index numeric_rank(const Matrix& a);
SpectralSummary spectral_summary(const Matrix& a);

double spectral_norm(const Matrix& a);

// Entrywise L_{p,q} norm: (sum_j (sum_i |a_ij|^p)^{q/p})^{1/q}.
double lpq_norm(const Matrix& a, double p, double q);
MatrixNorms matrix_norms(const Matrix& a, double p, double q);

// 1 <= r <= min(rows, cols). A zero sigma_r (or sigma_min) yields kInfinity.
CondNumbers cond_numbers(const Matrix& a, Eigen::Index r);

// kappa_r where r may exceed min(rows, cols); the missing singular values
// count as zeros, so the result is kInfinity.
double kappa_or_infinite(const Matrix& a, Eigen::Index r);

}  // namespace dln
