#include "dln/trajectory.hpp"

#include "dln/errors.hpp"
#include "dln/loss.hpp"
#include "dln/textio.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace dln {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  std::string row;
  for (const StepRecord& s : traj.steps) {
    row.clear();
    row += std::to_string(s.iteration);
    row += ',' + std::to_string(s.sweep);
    row += ',' + std::to_string(s.layer);
    row += ',' + format_double(s.lr);
    row += ',' + format_double(s.loss_after);
    row += ',' + format_double(s.dist_after);
    row += ',' + format_double(display_value(s.dist_after));
    row += ',';
    if (s.gamma_bound) row += format_double(*s.gamma_bound);
    row += ',' + format_double(s.grad_frobenius);
    row += ',' + format_double(s.dist_before);
    row += ',' + std::to_string(s.sample_index);
    out << row << '\n';
  }
}

void emit_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trajectory to " + path.string());
  write_trajectory_csv(out, traj);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++lineno;
  if (trim(line) != kTrajectoryHeader) throw ParseError("unexpected trajectory header", lineno);
  double prev_loss = std::numeric_limits<double>::quiet_NaN();
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw ParseError("expected 11 fields, found " + std::to_string(f.size()), lineno);
    StepRecord s;
    s.iteration = static_cast<std::int64_t>(parse_double(f[0], lineno));
    s.sweep = static_cast<std::int64_t>(parse_double(f[1], lineno));
    s.layer = static_cast<int>(parse_double(f[2], lineno));
    s.lr = parse_double(f[3], lineno);
    s.loss_after = parse_double(f[4], lineno);
    s.dist_after = parse_double(f[5], lineno);
    if (!trim(f[7]).empty()) s.gamma_bound = parse_double(f[7], lineno);
    s.grad_frobenius = parse_double(f[8], lineno);
    s.dist_before = parse_double(f[9], lineno);
    s.sample_index = static_cast<std::int64_t>(parse_double(f[10], lineno));
    s.loss_before = prev_loss;
    s.skipped = s.lr == 0.0;
    prev_loss = s.loss_after;
    traj.steps.push_back(s);
  }
  return traj;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory " + path.string());
  return read_trajectory_csv(in);
}

}  // namespace dln
