#include "dln/experiment.hpp"

#include "dln/init.hpp"
#include "dln/loss.hpp"
#include "dln/optim.hpp"
#include "dln/rng.hpp"
#include "dln/textio.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace dln {

namespace {

constexpr std::uint64_t kTeacherStream = 5;
constexpr std::uint64_t kNoiseStream = 6;
constexpr std::uint64_t kSeedStream = 31;

template <typename Int>
Int parse_int(const std::string& key, std::string_view v) {
  v = trim(v);
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(const std::string& key, std::string_view v) {
  try {
    return parse_double(v, 0);
  } catch (const ParseError&) {
    throw ConfigError(key + ": expected a number, got '" + std::string(trim(v)) + "'");
  }
}

bool parse_bool(const std::string& key, std::string_view v) {
  const std::string s(trim(v));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::string join_dims(const DimChain& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s;
}

std::filesystem::path seed_path(const std::string& output, int k, int seeds) {
  std::filesystem::path p(output);
  if (seeds <= 1) return p;
  return p.parent_path() / (p.stem().string() + "_seed" + std::to_string(k) + p.extension().string());
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"data", "synthetic | csv"},
      {"data_path", "CSV file (d_in inputs then d_out outputs per line)"},
      {"normalize", "normalize CSV rows to zero mean, unit variance"},
      {"d_in", "input dimension"},
      {"d_out", "output dimension"},
      {"m", "number of synthetic examples"},
      {"spectrum", "none | random (replace the singular values of X by 1e-5 + U(0,1))"},
      {"targets", "uniform (Y ~ U(-1,2)) | linear (Y = W0 X + noise)"},
      {"noise", "standard deviation of the noise for linear targets"},
      {"data_seed", "seed for the synthetic data"},
      {"dims", "comma separated n_0,...,n_L (overrides depth/width)"},
      {"depth", "number of layers L"},
      {"width", "intermediate width (0: max(d_in, d_out))"},
      {"init", "orthogonal | orth-identity | identity | balanced | random"},
      {"loss", "l2 | lp:<p>"},
      {"optimizer", "bcgd | gd | bcsgd"},
      {"policy", "theory:<eta> | optimal | convex | general | lp:<p> | const:<eta>"},
      {"order", "asc | desc"},
      {"sweeps", "maximum number of sweeps (iterations for gd)"},
      {"target", "stop once the distance to the optimum is at most this (none disables)"},
      {"eta", "gd step size (0: reference rate) or bcsgd eta in (0,2)"},
      {"seeds", "number of bcsgd sampling seeds"},
      {"seed", "seed for initialization and sampling"},
      {"rank", "rank bound for the optimum (0: narrowest layer)"},
      {"gamma", "record the contraction factor per step"},
      {"output", "trajectory CSV path"},
      {"checkpoint_every", "save the network every N iterations (0: never)"},
      {"checkpoint_dir", "directory for network checkpoints"},
  };
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v(trim(raw));
  if (key == "data") data = v;
  else if (key == "data_path") data_path = v;
  else if (key == "normalize") normalize = parse_bool(key, v);
  else if (key == "d_in") d_in = parse_int<Eigen::Index>(key, v);
  else if (key == "d_out") d_out = parse_int<Eigen::Index>(key, v);
  else if (key == "m") m = parse_int<Eigen::Index>(key, v);
  else if (key == "spectrum") spectrum = v;
  else if (key == "targets") targets = v;
  else if (key == "noise") noise = parse_real(key, v);
  else if (key == "data_seed") data_seed = parse_int<std::uint64_t>(key, v);
  else if (key == "dims") {
    dims.clear();
    if (!v.empty()) {
      for (auto f : split(v, ',')) dims.push_back(parse_int<Eigen::Index>(key, f));
    }
  } else if (key == "depth") depth = parse_int<int>(key, v);
  else if (key == "width") width = parse_int<Eigen::Index>(key, v);
  else if (key == "init") init = v;
  else if (key == "loss") loss = v;
  else if (key == "optimizer") optimizer = v;
  else if (key == "policy") policy = v;
  else if (key == "order") order = v;
  else if (key == "sweeps") sweeps = parse_int<std::int64_t>(key, v);
  else if (key == "target") {
    if (v == "none" || v.empty()) target.reset();
    else target = parse_real(key, v);
  } else if (key == "eta") eta = parse_real(key, v);
  else if (key == "seeds") seeds = parse_int<int>(key, v);
  else if (key == "seed") seed = parse_int<std::uint64_t>(key, v);
  else if (key == "rank") rank = parse_int<Eigen::Index>(key, v);
  else if (key == "gamma") gamma = parse_bool(key, v);
  else if (key == "output") output = v;
  else if (key == "checkpoint_every") checkpoint_every = parse_int<std::int64_t>(key, v);
  else if (key == "checkpoint_dir") checkpoint_dir = v;
  else throw ConfigError("unknown key '" + key + "'");
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    try {
      cfg.set(key, std::string(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return parse(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "data = " << data << "\n";
  if (!data_path.empty()) os << "data_path = " << data_path << "\n";
  os << "normalize = " << (normalize ? "true" : "false") << "\n"
     << "d_in = " << d_in << "\nd_out = " << d_out << "\nm = " << m << "\n"
     << "spectrum = " << spectrum << "\ntargets = " << targets << "\nnoise = " << format_double(noise) << "\n"
     << "data_seed = " << data_seed << "\n";
  if (!dims.empty()) os << "dims = " << join_dims(dims) << "\n";
  os << "depth = " << depth << "\nwidth = " << width << "\ninit = " << init << "\n"
     << "loss = " << loss << "\noptimizer = " << optimizer << "\npolicy = " << policy << "\norder = " << order << "\n"
     << "sweeps = " << sweeps << "\ntarget = " << (target ? format_double(*target) : "none") << "\n"
     << "eta = " << format_double(eta) << "\nseeds = " << seeds << "\nseed = " << seed << "\nrank = " << rank << "\n"
     << "gamma = " << (gamma ? "true" : "false") << "\n";
  if (!output.empty()) os << "output = " << output << "\n";
  os << "checkpoint_every = " << checkpoint_every << "\n";
  if (!checkpoint_dir.empty()) os << "checkpoint_dir = " << checkpoint_dir << "\n";
  return os.str();
}

DimChain RunConfig::resolved_dims() const {
  if (!dims.empty()) return dims;
  if (depth < 1) throw ConfigError("depth must be >= 1");
  const Eigen::Index w = width > 0 ? width : std::max(d_in, d_out);
  DimChain d(static_cast<std::size_t>(depth) + 1, w);
  d.front() = d_in;
  d.back() = d_out;
  return d;
}

void RunConfig::validate() const {
  if (data != "synthetic" && data != "csv") throw ConfigError("data must be synthetic or csv");
  if (data == "csv" && data_path.empty()) throw ConfigError("data = csv needs data_path");
  if (d_in < 1 || d_out < 1) throw ConfigError("d_in and d_out must be >= 1");
  if (data == "synthetic" && m < 1) throw ConfigError("m must be >= 1");
  if (spectrum != "none" && spectrum != "random") throw ConfigError("spectrum must be none or random");
  if (targets != "uniform" && targets != "linear") throw ConfigError("targets must be uniform or linear");
  if (!(noise >= 0.0)) throw ConfigError("noise must be >= 0");
  const DimChain d = resolved_dims();
  if (d.size() < 2) throw ConfigError("dims needs at least n_0 and n_1");
  for (auto n : d) {
    if (n < 1) throw ConfigError("every dimension must be >= 1");
  }
  if (d.front() != d_in || d.back() != d_out) {
    throw ConfigError("dims " + join_dims(d) + " do not match d_in = " + std::to_string(d_in) +
                      ", d_out = " + std::to_string(d_out));
  }
  try {
    parse_init_kind(init);
    const LossFunction lf = LossFunction::parse(loss);
    parse_ordering(order);
    if (optimizer == "bcgd") {
      const LrPolicy p = LrPolicy::parse(policy);
      if ((p.kind == LrKind::theory_l2 || p.kind == LrKind::optimal_l2) && !lf.is_l2()) {
        throw ConfigError("policy " + policy + " needs loss = l2");
      }
    } else if (optimizer == "bcsgd") {
      if (!lf.is_l2()) throw ConfigError("bcsgd needs loss = l2");
      if (!(eta > 0.0 && eta < 2.0)) throw ConfigError("bcsgd needs 0 < eta < 2");
      if (seeds < 1) throw ConfigError("seeds must be >= 1");
    } else if (optimizer == "gd") {
      if (!(eta >= 0.0)) throw ConfigError("gd eta must be >= 0");
    } else {
      throw ConfigError("optimizer must be bcgd, gd or bcsgd");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (sweeps < 0) throw ConfigError("sweeps must be >= 0");
  if (rank < 0) throw ConfigError("rank must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (checkpoint_every > 0 && checkpoint_dir.empty()) throw ConfigError("checkpoint_every needs checkpoint_dir");
}

Dataset build_dataset(const RunConfig& cfg) {
  Dataset ds;
  if (cfg.data == "csv") {
    ds = cfg.normalize ? load_normalize_csv(cfg.data_path, cfg.d_in, cfg.d_out)
                       : load_csv(cfg.data_path, cfg.d_in, cfg.d_out);
    return ds;
  }
  ds.X = gen_input_gaussian(cfg.d_in, cfg.m, cfg.data_seed);
  if (cfg.spectrum == "random") {
    ds.X = reshape_spectrum(ds.X, draw_spectrum(std::min(cfg.d_in, cfg.m), cfg.data_seed), cfg.data_seed);
  }
  if (cfg.targets == "linear") {
    Rng teacher(cfg.data_seed, {kTeacherStream});
    const Matrix w0 = teacher.gaussian_matrix(cfg.d_out, cfg.d_in, 1.0 / std::sqrt(static_cast<double>(cfg.d_in)));
    Rng noise(cfg.data_seed, {kNoiseStream});
    ds.Y = w0 * ds.X + noise.gaussian_matrix(cfg.d_out, cfg.m, cfg.noise);
  } else {
    ds.Y = gen_output_uniform(cfg.d_out, cfg.m, cfg.data_seed);
  }
  ds.validate();
  return ds;
}

Network build_network(const RunConfig& cfg, const Dataset& data) {
  const DimChain d = cfg.resolved_dims();
  if (data.d_in() != d.front() || data.d_out() != d.back()) throw ConfigError("dataset does not match dims");
  InitScheme scheme;
  scheme.kind = parse_init_kind(cfg.init);
  return initialize(scheme, d, cfg.seed);
}

OracleSolution build_oracle(const RunConfig& cfg, const Dataset& data) {
  Eigen::Index r = cfg.rank;
  if (r == 0) {
    const DimChain d = cfg.resolved_dims();
    r = *std::min_element(d.begin(), d.end());
  }
  return rank_constrained_solution(data.X, data.Y, r);
}

BcsgdAggregate aggregate_bcsgd(const std::vector<BcsgdRun>& runs) {
  BcsgdAggregate agg;
  if (runs.empty()) return agg;
  agg.available = true;
  agg.floor_lower = kInfinity;
  agg.floor_upper = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (const BcsgdRun& r : runs) {
    if (!r.bracket.available) agg.available = false;
    agg.floor_lower = std::min(agg.floor_lower, r.bracket.floor_lower);
    agg.floor_upper = std::max(agg.floor_upper, r.bracket.floor_upper);
    const std::size_t n = r.sq_dist.size();
    for (std::size_t k = n - n / 2; k < n; ++k) {
      sum += r.sq_dist[k];
      ++count;
    }
  }
  agg.tail_mean_sq = count ? sum / static_cast<double>(count) : 0.0;
  return agg;
}

std::string ExperimentResult::summary() const {
  std::ostringstream os;
  std::size_t steps = 0;
  for (const auto& t : trajectories) steps += t.size();
  os << "final_dist=" << format_double(final_dist) << " sweeps=" << sweeps_done << " iterations=" << steps
     << " optimal_loss=" << format_double(oracle.optimal_loss) << " wall_time=" << format_double(wall_seconds) << "s";
  if (bracket) {
    os << " floor_lower=" << format_double(bracket->floor_lower) << " floor_upper=" << format_double(bracket->floor_upper)
       << " tail_mean_sq=" << format_double(bracket->tail_mean_sq);
  }
  if (audit) os << " audit=" << (audit->ok() ? "pass" : "FAIL") << " vacuous=" << audit->vacuous.size();
  return os.str();
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = build_dataset(cfg);
  ExperimentResult res;
  res.oracle = build_oracle(cfg, data);
  const LossFunction lf = LossFunction::parse(cfg.loss);
  const Network net0 = build_network(cfg, data);

  StepOptions opts;
  // the L2 optimum is the reference only for the L2 loss
  opts.oracle_loss = lf.is_l2() ? res.oracle.optimal_loss : 0.0;
  std::optional<LrPolicy> policy;
  if (cfg.optimizer == "bcgd") policy = LrPolicy::parse(cfg.policy);
  if (cfg.gamma && lf.is_l2() && policy &&
      (policy->kind == LrKind::theory_l2 || policy->kind == LrKind::optimal_l2)) {
    GammaSpec g;
    g.eta = policy->kind == LrKind::theory_l2 ? policy->eta : 1.0;
    g.r = default_subspace_dim(net0);
    g.r_x = numeric_rank(data.X);
    opts.gamma = g;
  }

  StepObserver observer;
  if (cfg.checkpoint_every > 0) {
    std::filesystem::create_directories(cfg.checkpoint_dir);
    observer = [&cfg](const StepRecord& rec, const Network& net) {
      if (rec.iteration % cfg.checkpoint_every == 0) {
        save_network(net, std::filesystem::path(cfg.checkpoint_dir) / ("net_" + std::to_string(rec.iteration) + ".txt"));
      }
    };
  }

  auto fill_meta = [&](Trajectory& t, std::uint64_t seed) {
    t.meta.scheme = cfg.init;
    t.meta.seed = seed;
  };

  if (cfg.optimizer == "bcgd") {
    Network net = net0;
    StopCriteria stop{cfg.sweeps, cfg.target};
    Trajectory t = run_bcgd(net, data, lf, *policy, parse_ordering(cfg.order), stop, opts, observer);
    fill_meta(t, cfg.seed);
    res.sweeps_done = t.empty() ? 0 : t.steps.back().sweep + 1;
    if (opts.gamma) res.audit = verify_trajectory(t);
    res.trajectories.push_back(std::move(t));
  } else if (cfg.optimizer == "gd") {
    Network net = net0;
    const double eta = cfg.eta > 0.0 ? cfg.eta : reference_gd_rate(net, data.X);
    Trajectory t = run_gd(net, data, lf, eta, cfg.sweeps, cfg.target, opts, observer);
    fill_meta(t, cfg.seed);
    res.sweeps_done = static_cast<std::int64_t>(t.size());
    res.trajectories.push_back(std::move(t));
  } else {
    std::vector<BcsgdRun> runs(static_cast<std::size_t>(cfg.seeds));
    std::vector<std::thread> pool;
    std::mutex err_mu;
    std::exception_ptr err;
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), cfg.seeds));
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int k = next++; k < cfg.seeds; k = next++) {
          try {
            Network net = net0;
            BcsgdOptions bo;
            bo.eta = cfg.eta;
            bo.sweeps = cfg.sweeps;
            bo.seed = mix_seed(cfg.seed, {kSeedStream, static_cast<std::uint64_t>(k)});
            bo.ordering = parse_ordering(cfg.order);
            bo.oracle_loss = res.oracle.optimal_loss;
            bo.w_star = res.oracle.w_star;
            runs[static_cast<std::size_t>(k)] = run_bcsgd(net, data, bo, cfg.seeds == 1 ? observer : StepObserver{});
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    res.bracket = aggregate_bcsgd(runs);
    for (int k = 0; k < cfg.seeds; ++k) {
      Trajectory t = std::move(runs[static_cast<std::size_t>(k)].trajectory);
      fill_meta(t, cfg.seed);
      res.trajectories.push_back(std::move(t));
    }
    res.sweeps_done = cfg.sweeps;
  }

  if (!res.trajectories.empty() && !res.trajectories.front().empty()) {
    res.final_dist = res.trajectories.front().steps.back().dist_after;
  } else {
    res.final_dist = error_report(net0, data, lf, opts.oracle_loss).dist_to_opt;
  }
  if (!cfg.output.empty()) {
    const int n = static_cast<int>(res.trajectories.size());
    for (int k = 0; k < n; ++k) {
      const auto path = seed_path(cfg.output, k, n);
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      emit_trajectory_csv(res.trajectories[static_cast<std::size_t>(k)], path);
      res.written.push_back(path);
    }
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace dln
