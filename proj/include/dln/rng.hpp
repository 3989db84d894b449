#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "dln/matcore.hpp"

namespace dln {

// Seeded generator with derivable substreams: Rng(seed, {a, b}) is a stream
// that depends only on (seed, a, b), so per-layer draws do not shift when
// other layers change shape.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  std::uint64_t next_u64() { return engine_(); }
  double normal(double mean = 0.0, double stddev = 1.0);
  // Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi);

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

}  // namespace dln
