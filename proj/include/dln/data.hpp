#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dln/matcore.hpp"

namespace dln {

// Training pairs stored column-wise: X is d_in x m, Y is d_out x m.
struct Dataset {
  Matrix X;
  Matrix Y;

  Eigen::Index m() const { return X.cols(); }
  Eigen::Index d_in() const { return X.rows(); }
  Eigen::Index d_out() const { return Y.rows(); }

  // Throws DomainError unless X.cols == Y.cols >= 1 and entries are finite.
  void validate() const;
};

// Entries i.i.d. N(0, 1/d_in).
Matrix gen_input_gaussian(Eigen::Index d_in, Eigen::Index m, std::uint64_t seed);

// Entries i.i.d. U(-1, 2).
Matrix gen_output_uniform(Eigen::Index d_out, Eigen::Index m, std::uint64_t seed);

// `count` values drawn from 1e-5 + U(0, 1).
std::vector<double> draw_spectrum(Eigen::Index count, std::uint64_t seed);

// Replaces the singular values of `a` by `new_singulars` (sorted
// nonincreasing first). Singular directions missing from a rank-deficient
// `a` are completed with random orthonormal vectors drawn from `seed`.
Matrix reshape_spectrum(const Matrix& a, std::vector<double> new_singulars, std::uint64_t seed);

// One example per line: d_in input fields then d_out output fields,
// comma separated. Lines starting with '#' and blank lines are skipped.
// Each input feature and each output coordinate is shifted and scaled to
// zero mean and unit population variance; constant rows end up all zero.
Dataset load_normalize_csv(const std::filesystem::path& path, Eigen::Index d_in, Eigen::Index d_out);

// Raw reader with the same layout and no normalization.
Dataset load_csv(const std::filesystem::path& path, Eigen::Index d_in, Eigen::Index d_out);

// In-place zero-mean / unit-variance normalization of every row.
void normalize_rows(Matrix& a);

void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace dln
