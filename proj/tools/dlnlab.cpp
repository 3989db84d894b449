#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dln/experiment.hpp"
#include "dln/textio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAudit = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// --config FILE plus one --<key> flag per config key; flags win over the file.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void attach(CLI::App* app, const std::vector<std::string>& skip = {}) {
    app->add_option("--config", file, "config file (key = value lines)");
    for (const auto& k : dln::config_keys()) {
      if (std::find(skip.begin(), skip.end(), k.name) != skip.end()) continue;
      opts.emplace_back(k.name, app->add_option(std::string("--") + k.name, values[k.name], k.help));
    }
  }

  dln::RunConfig resolve() const {
    dln::RunConfig cfg = file.empty() ? dln::RunConfig{} : dln::RunConfig::load(file);
    for (const auto& [name, opt] : opts) {
      if (opt->count() > 0) {
        try {
          cfg.set(name, values.at(name));
        } catch (const dln::ConfigError& e) {
          throw dln::ConfigError(std::string("--") + e.what());
        }
      }
    }
    return cfg;
  }
};

void print_result(const dln::ExperimentResult& res) {
  std::cout << res.summary() << "\n";
  for (const auto& p : res.written) std::cout << "wrote " << p.string() << "\n";
  if (res.audit && !res.audit->ok()) std::cout << res.audit->summary();
}

int audit_code(const dln::ExperimentResult& res) {
  return res.audit && !res.audit->ok() ? kExitAudit : kExitOk;
}

int cmd_gen_data(const ConfigFlags& flags, const std::string& out) {
  const dln::RunConfig cfg = flags.resolve();
  cfg.validate();
  const dln::Dataset ds = dln::build_dataset(cfg);
  dln::write_csv(ds, out);
  const dln::SpectralSummary s = dln::spectral_summary(ds.X);
  const double smin = s.singular_values(s.singular_values.size() - 1);
  std::cout << "wrote " << out << " (d_in=" << ds.d_in() << " d_out=" << ds.d_out() << " m=" << ds.m()
            << " kappa(X)=" << dln::format_double(smin > 0.0 ? s.spectral_norm / smin : dln::kInfinity) << ")\n";
  return kExitOk;
}

int cmd_run(const ConfigFlags& flags, const std::string& forced_optimizer) {
  dln::RunConfig cfg = flags.resolve();
  if (!forced_optimizer.empty()) cfg.optimizer = forced_optimizer;
  const dln::ExperimentResult res = dln::run_experiment(cfg);
  print_result(res);
  if (res.bracket) {
    const auto& b = *res.bracket;
    std::cout << "bracket: [" << dln::format_double(0.5 * b.floor_lower) << ", " << dln::format_double(2.0 * b.floor_upper)
              << "] tail mean " << dln::format_double(b.tail_mean_sq)
              << (b.available ? "" : " (bracket unavailable: infinite condition number)") << "\n";
  }
  return audit_code(res);
}

int cmd_oracle(const ConfigFlags& flags) {
  const dln::RunConfig cfg = flags.resolve();
  cfg.validate();
  const dln::Dataset ds = dln::build_dataset(cfg);
  const dln::OracleSolution sol = dln::build_oracle(cfg, ds);
  std::cout << "optimal_loss=" << dln::format_double(sol.optimal_loss)
            << " residual_sq=" << dln::format_double(sol.residual_sq)
            << " w_star_frobenius=" << dln::format_double(sol.w_star.norm())
            << " effective_rank=" << sol.effective_rank << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& path) {
  const dln::Trajectory traj = dln::load_trajectory_csv(path);
  const dln::AuditReport rep = dln::verify_trajectory(traj);
  std::cout << rep.summary();
  return rep.ok() ? kExitOk : kExitAudit;
}

int cmd_batch(const std::vector<std::string>& files, int jobs) {
  std::vector<dln::RunConfig> cfgs;
  for (const auto& f : files) {
    cfgs.push_back(dln::RunConfig::load(f));
    cfgs.back().validate();
  }
  std::vector<std::string> lines(cfgs.size());
  std::vector<int> codes(cfgs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  const unsigned n = std::max(1, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t k = next++; k < cfgs.size(); k = next++) {
        try {
          const dln::ExperimentResult res = dln::run_experiment(cfgs[k]);
          lines[k] = res.summary();
          codes[k] = audit_code(res);
        } catch (const std::exception& e) {
          lines[k] = std::string("error: ") + e.what();
          codes[k] = kExitRuntime;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  int code = kExitOk;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    std::cout << files[k] << ": " << lines[k] << "\n";
    code = std::max(code, codes[k]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep linear network training experiments"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, train_flags, gd_flags, sgd_flags, oracle_flags;
  std::string gen_out, traj_path;
  std::vector<std::string> batch_files;
  int batch_jobs = 0;

  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");
  gen_flags.attach(gen);
  gen->add_option("--out", gen_out, "output CSV")->required();

  auto* train = app.add_subcommand("train", "run the configured optimizer (default: BCGD)");
  train_flags.attach(train);
  auto* gd = app.add_subcommand("gd", "plain gradient descent");
  gd_flags.attach(gd, {"optimizer"});
  auto* sgd = app.add_subcommand("bcsgd", "block coordinate SGD over several sampling seeds");
  sgd_flags.attach(sgd, {"optimizer"});
  auto* oracle = app.add_subcommand("oracle", "closed-form optimum of the dataset");
  oracle_flags.attach(oracle);
  auto* verify = app.add_subcommand("verify", "audit a trajectory CSV against its gamma bounds");
  verify->add_option("--trajectory", traj_path, "trajectory CSV")->required()->check(CLI::ExistingFile);
  auto* batch = app.add_subcommand("batch", "run several config files in parallel");
  batch->add_option("configs", batch_files, "config files")->required();
  batch->add_option("--jobs", batch_jobs, "parallel runs (0: hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_flags, gen_out);
    if (train->parsed()) return cmd_run(train_flags, "");
    if (gd->parsed()) return cmd_run(gd_flags, "gd");
    if (sgd->parsed()) return cmd_run(sgd_flags, "bcsgd");
    if (oracle->parsed()) return cmd_oracle(oracle_flags);
    if (verify->parsed()) return cmd_verify(traj_path);
    if (batch->parsed()) return cmd_batch(batch_files, batch_jobs);
  } catch (const dln::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dln::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
