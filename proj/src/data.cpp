#include "dln/data.hpp"

#include "dln/errors.hpp"
#include "dln/rng.hpp"
#include "dln/textio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>

namespace dln {

namespace {

// Stream identifiers keep the generators for X, Y and spectra independent
// even when they share a user seed.
constexpr std::uint64_t kInputStream = 1;
constexpr std::uint64_t kOutputStream = 2;
constexpr std::uint64_t kSpectrumStream = 3;
constexpr std::uint64_t kCompletionStream = 4;

// Orthonormal n x k basis whose leading columns span `basis` (orthonormal
// columns, possibly fewer than k).
Matrix complete_basis(const Matrix& basis, Eigen::Index n, Eigen::Index k, Rng& rng) {
  if (basis.cols() >= k) return basis.leftCols(k);
  Matrix seed(n, k);
  seed.leftCols(basis.cols()) = basis;
  seed.rightCols(k - basis.cols()) = rng.gaussian_matrix(n, k - basis.cols(), 1.0);
  Eigen::HouseholderQR<Matrix> qr(seed);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  // Keep the given columns exactly; only the completion comes from QR.
  q.leftCols(basis.cols()) = basis;
  return q;
}

}  // namespace

void Dataset::validate() const {
  if (X.cols() != Y.cols()) {
    throw DomainError("dataset: X has " + std::to_string(X.cols()) + " columns, Y has " +
                      std::to_string(Y.cols()));
  }
  if (X.cols() < 1) throw DomainError("dataset: need at least one example");
  require_finite(X, "dataset X");
  require_finite(Y, "dataset Y");
}

Matrix gen_input_gaussian(Eigen::Index d_in, Eigen::Index m, std::uint64_t seed) {
  if (d_in < 1 || m < 1) throw DomainError("gen_input_gaussian: d_in and m must be >= 1");
  Rng rng(seed, {kInputStream});
  return rng.gaussian_matrix(d_in, m, 1.0 / std::sqrt(static_cast<double>(d_in)));
}

Matrix gen_output_uniform(Eigen::Index d_out, Eigen::Index m, std::uint64_t seed) {
  if (d_out < 1 || m < 1) throw DomainError("gen_output_uniform: d_out and m must be >= 1");
  Rng rng(seed, {kOutputStream});
  Matrix y(d_out, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < d_out; ++i) y(i, j) = rng.uniform(-1.0, 2.0);
  return y;
}

std::vector<double> draw_spectrum(Eigen::Index count, std::uint64_t seed) {
  Rng rng(seed, {kSpectrumStream});
  std::vector<double> out(static_cast<std::size_t>(count));
  for (double& v : out) v = 1e-5 + rng.uniform(0.0, 1.0);
  return out;
}

Matrix reshape_spectrum(const Matrix& a, std::vector<double> new_singulars, std::uint64_t seed) {
  require_finite(a, "reshape_spectrum input");
  const Eigen::Index k = std::min(a.rows(), a.cols());
  if (static_cast<Eigen::Index>(new_singulars.size()) != k) {
    throw DomainError("reshape_spectrum: expected " + std::to_string(k) + " target singular values, got " +
                      std::to_string(new_singulars.size()));
  }
  for (double s : new_singulars) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("reshape_spectrum: targets must be positive and finite");
  }
  std::sort(new_singulars.begin(), new_singulars.end(), std::greater<>());

  const CompactSvd svd = compact_svd(a);
  Rng rng(seed, {kCompletionStream});
  const Matrix u = complete_basis(svd.U, a.rows(), k, rng);
  const Matrix v = complete_basis(svd.V, a.cols(), k, rng);
  const Vector s = Eigen::Map<const Vector>(new_singulars.data(), k);
  return u * s.asDiagonal() * v.transpose();
}

void normalize_rows(Matrix& a) {
  const double m = static_cast<double>(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double magnitude = a.row(i).cwiseAbs().maxCoeff();
    if (a.row(i).maxCoeff() == a.row(i).minCoeff()) {
      a.row(i).setZero();
      continue;
    }
    const double mean = a.row(i).sum() / m;
    a.row(i).array() -= mean;
    const double var = a.row(i).squaredNorm() / m;
    // Rounding leaves eps-sized residue in a centered constant row.
    if (std::sqrt(var) <= 64.0 * std::numeric_limits<double>::epsilon() * magnitude) {
      a.row(i).setZero();
    } else {
      a.row(i) /= std::sqrt(var);
    }
  }
}

Dataset load_csv(const std::filesystem::path& path, Eigen::Index d_in, Eigen::Index d_out) {
  if (d_in < 1 || d_out < 1) throw DomainError("load_csv: d_in and d_out must be >= 1");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  const auto width = static_cast<std::size_t>(d_in + d_out);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> fields = split_doubles(line, ',', lineno);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                       lineno);
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ParseError("no data rows in " + path.string(), lineno);

  Dataset d;
  const auto m = static_cast<Eigen::Index>(rows.size());
  d.X.resize(d_in, m);
  d.Y.resize(d_out, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& r = rows[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < d_in; ++i) d.X(i, j) = r[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < d_out; ++i) d.Y(i, j) = r[static_cast<std::size_t>(d_in + i)];
  }
  return d;
}

Dataset load_normalize_csv(const std::filesystem::path& path, Eigen::Index d_in, Eigen::Index d_out) {
  Dataset d = load_csv(path, d_in, d_out);
  normalize_rows(d.X);
  normalize_rows(d.Y);
  return d;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << data.d_in() << " inputs, " << data.d_out() << " outputs\n";
  std::string line;
  for (Eigen::Index j = 0; j < data.m(); ++j) {
    line.clear();
    for (Eigen::Index i = 0; i < data.d_in(); ++i) {
      if (i) line += ',';
      line += format_double(data.X(i, j));
    }
    for (Eigen::Index i = 0; i < data.d_out(); ++i) {
      line += ',';
      line += format_double(data.Y(i, j));
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace dln
