#include "dln/init.hpp"

#include "dln/errors.hpp"
#include "dln/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dln {

namespace {

constexpr std::uint64_t kOrthStream = 11;
constexpr std::uint64_t kRandomStream = 12;
constexpr std::uint64_t kBalancedStream = 13;

Matrix orthogonal_from(Rng& rng, Eigen::Index n) {
  const Matrix g = rng.gaussian_matrix(n, n, 1.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

Matrix padded(Eigen::Index rows, Eigen::Index cols, const Matrix& block) {
  Matrix w = Matrix::Zero(rows, cols);
  w.topLeftCorner(block.rows(), block.cols()) = block;
  return w;
}

void check_dims(const DimChain& dims) {
  if (dims.size() < 2) throw DomainError("initialize: need a chain (n_0, ..., n_L) with L >= 1");
  for (Eigen::Index n : dims) {
    if (n < 1) throw DomainError("initialize: every width must be >= 1");
  }
}

Network balanced(const InitScheme& scheme, const DimChain& dims, std::uint64_t seed) {
  const int L = static_cast<int>(dims.size()) - 1;
  const Eigen::Index n0 = dims.front();
  const Eigen::Index nL = dims.back();
  const Matrix w0 = scheme.balanced_seed ? *scheme.balanced_seed : default_balanced_seed(dims, seed);
  if (w0.rows() != nL || w0.cols() != n0) {
    throw DomainError("balanced init: seed matrix must be n_L x n_0");
  }
  const Eigen::Index k = std::min(n0, nL);
  for (int l = 1; l < L; ++l) {
    if (dims[static_cast<std::size_t>(l)] < k) {
      throw DomainError("balanced init: intermediate width below min(n_0, n_L)");
    }
  }
  Eigen::JacobiSVD<Matrix> svd(w0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Zero singular values stay zero under the 1/L power.
  const Vector root = svd.singularValues().array().pow(1.0 / L);
  const Matrix u = svd.matrixU();
  const Matrix v = svd.matrixV();

  std::vector<Matrix> layers;
  for (int l = 1; l <= L; ++l) {
    const Eigen::Index rows = dims[static_cast<std::size_t>(l)];
    const Eigen::Index cols = dims[static_cast<std::size_t>(l - 1)];
    if (L == 1) {
      layers.push_back(w0);
    } else if (l == 1) {
      layers.push_back(padded(rows, cols, root.asDiagonal() * v.transpose()));
    } else if (l == L) {
      layers.push_back(padded(rows, cols, u * root.asDiagonal()));
    } else {
      layers.push_back(padded(rows, cols, Matrix(root.asDiagonal())));
    }
  }
  return Network(std::move(layers));
}

}  // namespace

InitKind parse_init_kind(std::string_view name) {
  if (name == "orthogonal") return InitKind::orthogonal;
  if (name == "orth-identity" || name == "orth_identity") return InitKind::orth_identity;
  if (name == "identity") return InitKind::identity;
  if (name == "balanced") return InitKind::balanced;
  if (name == "random") return InitKind::random;
  throw DomainError("unknown init scheme '" + std::string(name) + "'");
}

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::orthogonal: return "orthogonal";
    case InitKind::orth_identity: return "orth-identity";
    case InitKind::identity: return "identity";
    case InitKind::balanced: return "balanced";
    case InitKind::random: return "random";
  }
  return "?";
}

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("random_orthogonal: n must be >= 1");
  Rng rng(seed, {kOrthStream});
  return orthogonal_from(rng, n);
}

Matrix default_balanced_seed(const DimChain& dims, std::uint64_t seed) {
  check_dims(dims);
  Rng rng(seed, {kBalancedStream});
  const Eigen::Index n0 = dims.front();
  return rng.gaussian_matrix(dims.back(), n0, 1.0 / std::sqrt(static_cast<double>(n0)));
}

Network initialize(const InitScheme& scheme, const DimChain& dims, std::uint64_t seed) {
  check_dims(dims);
  const int L = static_cast<int>(dims.size()) - 1;
  if (scheme.kind == InitKind::balanced) return balanced(scheme, dims, seed);

  const Eigen::Index dmax = std::max(dims.front(), dims.back());
  std::vector<Matrix> layers;
  for (int l = 1; l <= L; ++l) {
    const Eigen::Index rows = dims[static_cast<std::size_t>(l)];
    const Eigen::Index cols = dims[static_cast<std::size_t>(l - 1)];
    const Eigen::Index mn = std::min(rows, cols);
    Rng rng(seed, {kOrthStream, static_cast<std::uint64_t>(l)});
    switch (scheme.kind) {
      case InitKind::orthogonal:
        layers.push_back(padded(rows, cols, orthogonal_from(rng, mn)));
        break;
      case InitKind::orth_identity: {
        const Eigen::Index k = std::min(mn, dmax);
        Matrix w = padded(rows, cols, orthogonal_from(rng, k));
        for (Eigen::Index d = k; d < mn; ++d) w(d, d) = 1.0;
        layers.push_back(std::move(w));
        break;
      }
      case InitKind::identity:
        layers.push_back(padded(rows, cols, Matrix::Identity(mn, mn)));
        break;
      case InitKind::random: {
        double var = 1.0 / static_cast<double>(cols);
        if (!scheme.variance_overrides.empty()) {
          if (scheme.variance_overrides.size() != static_cast<std::size_t>(L)) {
            throw DomainError("random init: need one variance per layer");
          }
          var = scheme.variance_overrides[static_cast<std::size_t>(l - 1)];
          if (!(var >= 0.0)) throw DomainError("random init: variances must be nonnegative");
        }
        Rng layer_rng(seed, {kRandomStream, static_cast<std::uint64_t>(l)});
        layers.push_back(layer_rng.gaussian_matrix(rows, cols, std::sqrt(var)));
        break;
      }
      case InitKind::balanced:
        break;
    }
  }
  return Network(std::move(layers));
}

}  // namespace dln
