#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dln/network.hpp"

namespace dln {

struct StepRecord {
  std::int64_t iteration = 0;  // 1-based global iteration
  std::int64_t sweep = 0;      // 0-based sweep the step belongs to
  int layer = 0;               // layer updated; 0 for a simultaneous (GD) step
  double lr = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double dist_before = 0.0;    // normalized distance to the optimum, raw
  double dist_after = 0.0;
  std::optional<double> gamma_bound;
  double grad_frobenius = 0.0;
  bool skipped = false;        // degenerate learning-rate denominator, eta = 0
  std::int64_t sample_index = -1;  // stochastic steps only
};

struct RunMetadata {
  std::string scheme;
  DimChain dims;
  std::uint64_t seed = 0;
  std::string policy;
  std::string ordering;
  std::string loss;
};

struct Trajectory {
  RunMetadata meta;
  std::vector<StepRecord> steps;

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
};

// Column order of the trajectory CSV.
inline constexpr const char* kTrajectoryHeader =
    "iteration,sweep,layer_updated,lr,loss,dist_to_opt_raw,dist_display,gamma_bound,grad_frobenius,"
    "dist_before_raw,sample_index";

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void emit_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

// Reads what emit_trajectory_csv wrote. loss_before of each row is taken from
// the previous row's loss (NaN for the first row); metadata is not stored.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory load_trajectory_csv(const std::filesystem::path& path);

}  // namespace dln
