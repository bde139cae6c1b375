// Command-line front end for the risk-averse feedback solver.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rafc/commands.hpp"
#include "rafc/errors.hpp"
#include "rafc/parallel.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kSolver = 3;
constexpr int kArtifact = 4;

template <class T> std::optional<T> given(const CLI::Option *opt, const T &value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Risk-averse feedback control for a parametric diffusion-reaction equation"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

  std::string config_path, out_dir, run_dir, run_cl, run_ol, compare_dir = "compare";
  int iters = 0, realizations = 0;
  std::uint64_t seed = 0;
  std::vector<double> levels, thetas{0.0, 10.0};

  auto *solve = app.add_subcommand("solve", "SQP solve with Riccati feedback");
  solve->add_option("--config", config_path, "experiment config (JSON)")->required();
  solve->add_option("--out", out_dir, "run directory")->required();

  auto *openloop = app.add_subcommand("openloop", "open-loop gradient descent baseline");
  openloop->add_option("--config", config_path, "experiment config (JSON)")->required();
  openloop->add_option("--out", out_dir, "run directory")->required();
  auto *iters_opt = openloop->add_option("--iters", iters, "gradient steps")->check(CLI::NonNegativeNumber);

  auto *validate = app.add_subcommand("validate", "Monte Carlo tracking errors of a solved run");
  validate->add_option("--run", run_dir, "run directory")->required();
  auto *n_opt = validate->add_option("--n", realizations, "realizations")->check(CLI::PositiveNumber);
  auto *seed_opt = validate->add_option("--seed", seed, "parameter draw seed");

  auto *robust = app.add_subcommand("robustness", "perturbed initial conditions, closed vs open loop");
  robust->add_option("--run-cl", run_cl, "feedback run directory")->required();
  robust->add_option("--run-ol", run_ol, "open-loop run directory")->required();
  auto *levels_opt = robust->add_option("--levels", levels, "noise levels")->delimiter(',');
  robust->add_option("--out", out_dir, "output directory (default <run-cl>/robustness)");
  auto *rn_opt = robust->add_option("--n", realizations, "realizations")->check(CLI::PositiveNumber);
  auto *rseed_opt = robust->add_option("--seed", seed, "parameter draw seed");

  auto *compare = app.add_subcommand("compare", "risk-neutral vs risk-averse solve");
  compare->add_option("--config", config_path, "experiment config (JSON)")->required();
  compare->add_option("--out", compare_dir, "output directory")->capture_default_str();
  compare->add_option("--thetas", thetas, "two risk levels")->delimiter(',')->expected(2);
  auto *cn_opt = compare->add_option("--n", realizations, "realizations")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kConfig;
  }

  rafc::set_thread_count(threads);
  try {
    if (*solve) {
      const auto res = rafc::cmd_solve(rafc::load_config(config_path), out_dir);
      const auto &rep = res.result.report;
      std::cout << "solve: " << rep.records.size() << " iterations, " << rafc::to_string(rep.termination)
                << ", J = " << res.result.state.objective_value
                << ", |grad J| = " << res.result.state.gradient_norm << "\n";
      for (const auto &w : rep.warnings)
        std::cerr << "warning: " << w << "\n";
    } else if (*openloop) {
      const auto res = rafc::cmd_openloop(rafc::load_config(config_path), out_dir, given(iters_opt, iters));
      std::cout << "openloop: " << res.result.records.size() << " steps, " << res.result.termination;
      if (!res.result.records.empty())
        std::cout << ", J = " << res.result.records.back().objective;
      std::cout << "\n";
    } else if (*validate) {
      const auto v = rafc::cmd_validate(run_dir, given(n_opt, realizations), given(seed_opt, seed));
      for (const auto &s : v.scenarios)
        std::cout << "validate: " << s.name << " median terminal error "
                  << rafc::column_percentile(s.errors, s.errors.cols() - 1, 50.0) << "\n";
    } else if (*robust) {
      const std::string out = out_dir.empty() ? run_cl + "/robustness" : out_dir;
      const auto r = rafc::cmd_robustness(run_cl, run_ol, given(levels_opt, levels), out,
                                          given(rn_opt, realizations), given(rseed_opt, seed));
      for (const auto &l : r.levels) {
        const auto last = l.closed_loop[0].cols() - 1;
        std::cout << "robustness: level " << l.level << " median terminal error (+) closed loop "
                  << rafc::column_percentile(l.closed_loop[0], last, 50.0) << ", open loop "
                  << rafc::column_percentile(l.open_loop[0], last, 50.0) << "\n";
      }
    } else if (*compare) {
      const auto c = rafc::cmd_compare(rafc::load_config(config_path), compare_dir, {thetas[0], thetas[1]},
                                       given(cn_opt, realizations));
      for (std::size_t i = 0; i < c.percentiles.size(); ++i)
        std::cout << "compare: percentile " << c.percentiles[i] << " terminal delta "
                  << c.deltas(static_cast<Eigen::Index>(i), c.deltas.cols() - 1) << "\n";
    }
  } catch (const rafc::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const rafc::SolverError &e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const rafc::ArtifactError &e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kArtifact;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
