#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dln/data.hpp"
#include "dln/errors.hpp"
#include "dln/network.hpp"
#include "dln/oracle.hpp"
#include "dln/sgd.hpp"
#include "dln/theory.hpp"
#include "dln/trajectory.hpp"

namespace dln {

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Flat "key = value" text, one pair per line; '#' starts a comment line.
// Every key is also a command-line flag (--key value) that overrides the file.
struct RunConfig {
  // data
  std::string data = "synthetic";  // synthetic | csv
  std::string data_path;
  bool normalize = true;           // csv only
  Eigen::Index d_in = 8;
  Eigen::Index d_out = 2;
  Eigen::Index m = 40;
  std::string spectrum = "none";   // none | random
  std::string targets = "uniform"; // uniform | linear
  double noise = 0.0;              // linear targets: Y = W0 X + noise * N(0, 1)
  std::uint64_t data_seed = 0;

  // architecture
  DimChain dims;                   // overrides depth/width when set
  int depth = 2;
  Eigen::Index width = 0;          // 0: max(d_in, d_out)
  std::string init = "orth-identity";

  // training
  std::string loss = "l2";
  std::string optimizer = "bcgd";  // bcgd | gd | bcsgd
  std::string policy = "optimal";
  std::string order = "asc";
  std::int64_t sweeps = 100;
  std::optional<double> target = 1e-10;
  double eta = 0.0;                // gd: 0 picks n_L / (3 L ||X||^2); bcsgd: required
  int seeds = 1;                   // bcsgd
  std::uint64_t seed = 0;
  Eigen::Index rank = 0;           // oracle rank bound; 0: narrowest layer
  bool gamma = true;

  // output
  std::string output;
  std::int64_t checkpoint_every = 0;
  std::string checkpoint_dir;

  void set(const std::string& key, const std::string& value);
  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_text() const;

  DimChain resolved_dims() const;
  // Throws ConfigError describing the first inconsistency.
  void validate() const;
};

struct ConfigKey {
  const char* name;
  const char* help;
};
const std::vector<ConfigKey>& config_keys();

Dataset build_dataset(const RunConfig& cfg);
Network build_network(const RunConfig& cfg, const Dataset& data);
OracleSolution build_oracle(const RunConfig& cfg, const Dataset& data);

struct BcsgdAggregate {
  double floor_lower = 0.0;   // min over seeds
  double floor_upper = 0.0;   // max over seeds
  double tail_mean_sq = 0.0;  // mean of ||(W - W*) X||_F^2 over the last half of each run and over seeds
  bool available = false;
};
BcsgdAggregate aggregate_bcsgd(const std::vector<BcsgdRun>& runs);

struct ExperimentResult {
  std::vector<Trajectory> trajectories;  // one per seed
  OracleSolution oracle;
  std::optional<BcsgdAggregate> bracket;
  std::optional<AuditReport> audit;
  std::vector<std::filesystem::path> written;
  double final_dist = 0.0;
  std::int64_t sweeps_done = 0;
  double wall_seconds = 0.0;

  std::string summary() const;
};

// Validates, runs, writes the trajectory CSV(s) and checkpoints.
// With several seeds the CSV name gets a _seed<k> suffix.
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace dln
