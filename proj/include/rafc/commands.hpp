#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rafc/experiment.hpp"
#include "rafc/riccati.hpp"
#include "rafc/sqp.hpp"

namespace rafc {

// Run directory layout
//   config.json         echoed configuration
//   summary.json        run kind ("sqp" | "openloop") and final figures
//   control.csv         time, u_1..u_Na
//   state.csv           time, chaos coefficients (sqp only)
//   feedback.csv        time, gain entries (row major), offsets (sqp only)
//   sqp_report.csv / gd_report.csv
//   errors_<scenario>.csv, percentiles_<scenario>.csv, validation.json
//   manifest.json       SHA-256 of every file above

struct SolveOutput {
  Experiment experiment;
  SqpResult result;
};

struct OpenLoopOutput {
  Experiment experiment;
  GdResult result;
};

SolveOutput cmd_solve(const ExperimentConfig &config, const std::filesystem::path &out);

OpenLoopOutput cmd_openloop(const ExperimentConfig &config, const std::filesystem::path &out,
                            std::optional<int> iterations = {});

/// A solved run read back from disk.
struct StoredRun {
  Experiment experiment;
  std::string kind;
  ControlTrajectory control;
  std::optional<FeedbackLaw> feedback;
};

StoredRun load_run(const std::filesystem::path &dir);

struct Scenario {
  std::string name;
  Eigen::MatrixXd errors; // realization x report time
};

struct ValidationOutput {
  std::vector<double> times;
  std::vector<Scenario> scenarios;
  const Eigen::MatrixXd &errors(const std::string &name) const;
};

/// Scenarios: "uncontrolled", "control" (stored control) and, for feedback
/// runs, "feedback" (law re-applied from the initial state).
ValidationOutput cmd_validate(const std::filesystem::path &run, std::optional<int> realizations = {},
                              std::optional<std::uint64_t> seed = {});

struct RobustnessLevel {
  double level = 0.0;
  // index 0: y0 + perturbation, 1: y0 - perturbation
  std::array<Eigen::MatrixXd, 2> closed_loop;
  std::array<Eigen::MatrixXd, 2> open_loop;
};

struct RobustnessOutput {
  std::vector<double> times;
  std::vector<RobustnessLevel> levels;
};

/// Perturbed initial conditions under unchanged controls. Defaults for
/// levels, realizations and seed come from the closed-loop run's config.
RobustnessOutput cmd_robustness(const std::filesystem::path &run_cl, const std::filesystem::path &run_ol,
                                std::optional<std::vector<double>> levels, const std::filesystem::path &out,
                                std::optional<int> realizations = {},
                                std::optional<std::uint64_t> seed = {});

struct CompareOutput {
  std::array<double, 2> thetas{};
  std::vector<double> times;
  std::vector<double> percentiles;
  std::array<Eigen::MatrixXd, 2> errors;   // feedback scenario of each run
  Eigen::MatrixXd deltas;                  // percentile x time, second minus first
};

/// Solves the config at both risk levels with shared nodes and validation draws.
CompareOutput cmd_compare(const ExperimentConfig &config, const std::filesystem::path &out,
                          std::array<double, 2> thetas = {0.0, 10.0},
                          std::optional<int> realizations = {});

} // namespace rafc
