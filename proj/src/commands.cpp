#include "rafc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rafc/artifacts.hpp"
#include "rafc/errors.hpp"

namespace rafc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<double> times_of(const TimeGrid &grid, const std::vector<int> &nodes) {
  std::vector<double> out;
  for (int k : nodes)
    out.push_back(grid.time(k));
  return out;
}

std::vector<double> percentile_levels(const ValidationConfig &v) {
  std::vector<double> out = v.percentiles;
  out.push_back(50.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::MatrixXd percentile_table(const Eigen::MatrixXd &errors, const std::vector<double> &levels) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(levels.size()), errors.cols() + 1);
  for (std::size_t r = 0; r < levels.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    out(i, 0) = levels[r];
    for (Eigen::Index c = 0; c < errors.cols(); ++c)
      out(i, c + 1) = column_percentile(errors, c, levels[r]);
  }
  return out;
}

std::vector<std::string> with_first(std::string first, const std::vector<std::string> &rest) {
  std::vector<std::string> out{std::move(first)};
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

Eigen::MatrixXd timed_columns(const TimeGrid &grid, const Eigen::MatrixXd &values) {
  Eigen::MatrixXd out(values.cols(), values.rows() + 1);
  for (int k = 0; k < grid.nodes(); ++k) {
    out(k, 0) = grid.time(k);
    out.row(k).tail(values.rows()) = values.col(k).transpose();
  }
  return out;
}

std::vector<std::string> numbered(const std::string &prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i)
    out.push_back(prefix + std::to_string(i));
  return out;
}

void write_control(RunWriter &w, const ControlTrajectory &u) {
  w.csv("control.csv", with_first("time", numbered("u", static_cast<int>(u.values.rows()))),
        timed_columns(u.grid, u.values));
}

void write_feedback(RunWriter &w, const FeedbackLaw &law) {
  const auto na = law.gain.front().rows(), n = law.gain.front().cols();
  std::vector<std::string> header{"time"};
  for (Eigen::Index a = 0; a < na; ++a)
    for (Eigen::Index j = 0; j < n; ++j)
      header.push_back("gain" + std::to_string(a + 1) + "_" + std::to_string(j + 1));
  for (Eigen::Index a = 0; a < na; ++a)
    header.push_back("offset" + std::to_string(a + 1));
  Eigen::MatrixXd rows(law.grid.nodes(), 1 + na * n + na);
  for (int k = 0; k < law.grid.nodes(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    rows(k, 0) = law.grid.time(k);
    const Eigen::MatrixXd rowmajor = law.gain[idx].transpose();
    rows.row(k).segment(1, na * n) = Eigen::Map<const Eigen::RowVectorXd>(rowmajor.data(), na * n);
    rows.row(k).tail(na) = law.offset[idx].transpose();
  }
  w.csv("feedback.csv", header, rows);
}

void check_times(const CsvTable &t, const TimeGrid &grid, const fs::path &path) {
  if (t.values.rows() != grid.nodes())
    throw ArtifactError(path.string() + ": expected " + std::to_string(grid.nodes()) + " time rows, found " +
                        std::to_string(t.values.rows()));
  for (int k = 0; k < grid.nodes(); ++k)
    if (std::abs(t.values(k, 0) - grid.time(k)) > 1e-12 * std::max(1.0, grid.horizon))
      throw ArtifactError(path.string() + ": time column does not match the configured grid");
}

ControlTrajectory read_control(const fs::path &path, const Experiment &exp) {
  const CsvTable t = read_csv(path);
  check_times(t, exp.grid(), path);
  if (t.values.cols() != 1 + exp.system->actuators())
    throw ArtifactError(path.string() + ": wrong number of actuator columns");
  return {exp.grid(), t.values.rightCols(exp.system->actuators()).transpose()};
}

FeedbackLaw read_feedback(const fs::path &path, const Experiment &exp) {
  const CsvTable t = read_csv(path);
  check_times(t, exp.grid(), path);
  const int na = exp.system->actuators(), n = exp.system->size();
  if (t.values.cols() != 1 + na * n + na)
    throw ArtifactError(path.string() + ": wrong number of feedback columns");
  FeedbackLaw law;
  law.grid = exp.grid();
  for (int k = 0; k < exp.grid().nodes(); ++k) {
    const Eigen::RowVectorXd row = t.values.row(k);
    law.gain.push_back(Eigen::Map<const Eigen::MatrixXd>(row.data() + 1, n, na).transpose());
    law.offset.push_back(row.tail(na).transpose());
  }
  return law;
}

Experiment experiment_from(const fs::path &dir) {
  const fs::path cfg = dir / "config.json";
  require_file(cfg);
  std::ifstream in(cfg);
  std::ostringstream ss;
  ss << in.rdbuf();
  return build_experiment(parse_config(ss.str(), cfg.string()));
}

void write_errors(RunWriter &w, const std::string &stem, const Scenario &s,
                  const std::vector<double> &times, const std::vector<double> &levels) {
  w.csv(stem + "errors_" + s.name + ".csv", time_labels(times), s.errors);
  w.csv(stem + "percentiles_" + s.name + ".csv", with_first("percentile", time_labels(times)),
        percentile_table(s.errors, levels));
}

Eigen::VectorXd noise_vector(int size, std::uint64_t seed, std::size_t level_index, bool enabled) {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(size);
  if (!enabled)
    return xi;
  CounterRng rng(CounterRng::derive(seed, "robustness-" + std::to_string(level_index)));
  for (int i = 0; i < size; ++i)
    xi[i] = rng.normal();
  return xi;
}

} // namespace

const Eigen::MatrixXd &ValidationOutput::errors(const std::string &name) const {
  for (const auto &s : scenarios)
    if (s.name == name)
      return s.errors;
  throw std::out_of_range("no validation scenario '" + name + "'");
}

SolveOutput cmd_solve(const ExperimentConfig &config, const fs::path &out) {
  SolveOutput res{build_experiment(config), {}};
  const Experiment &exp = res.experiment;
  res.result = run_sqp(exp.problem, exp.initial_expansion(), exp.sqp_options());
  const SqpResult &r = res.result;

  RunWriter w(out);
  w.json("config.json", to_json(config));
  Eigen::MatrixXd report(static_cast<Eigen::Index>(r.report.records.size()), 5);
  for (std::size_t i = 0; i < r.report.records.size(); ++i) {
    const SqpRecord &rec = r.report.records[i];
    report.row(static_cast<Eigen::Index>(i)) << rec.iteration, rec.objective, rec.gradient_norm,
        rec.control_change, rec.min_eigenvalue;
  }
  w.csv("sqp_report.csv", {"iteration", "objective", "gradient_norm", "control_change", "min_eigenvalue"},
        report);
  write_control(w, r.state.control);
  w.csv("state.csv", with_first("time", numbered("y", exp.system->size())),
        timed_columns(exp.grid(), r.state.expansion.coeffs));
  write_feedback(w, feedback_law(r.riccati));
  w.json("summary.json", {{"kind", "sqp"},
                          {"termination", to_string(r.report.termination)},
                          {"iterations", r.report.records.size()},
                          {"objective", r.state.objective_value},
                          {"gradient_norm", r.state.gradient_norm},
                          {"theta", config.risk.theta},
                          {"dofs", exp.system->dofs()},
                          {"modes", exp.system->modes()},
                          {"state_dimension", exp.system->size()},
                          {"time_steps", exp.grid().steps},
                          {"riccati_substeps", r.riccati.substeps},
                          {"warnings", r.report.warnings}});
  return res;
}

OpenLoopOutput cmd_openloop(const ExperimentConfig &config, const fs::path &out,
                            std::optional<int> iterations) {
  ExperimentConfig c = config;
  if (iterations)
    c.solver.gd_iterations = *iterations;
  validate_config(c);
  OpenLoopOutput res{build_experiment(c), {}};
  const Experiment &exp = res.experiment;
  res.result = run_openloop_gd(exp.problem, ControlTrajectory::zero(exp.grid(), exp.system->actuators()),
                               exp.gd_options());
  const GdResult &r = res.result;

  RunWriter w(out);
  w.json("config.json", to_json(c));
  Eigen::MatrixXd report(static_cast<Eigen::Index>(r.records.size()), 4);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const GdRecord &rec = r.records[i];
    report.row(static_cast<Eigen::Index>(i)) << rec.iteration, rec.objective, rec.gradient_norm, rec.step;
  }
  w.csv("gd_report.csv", {"iteration", "objective", "gradient_norm", "step"}, report);
  write_control(w, r.control);
  json summary = {{"kind", "openloop"},
                  {"termination", r.termination},
                  {"iterations", r.records.size()},
                  {"theta", c.risk.theta}};
  if (!r.records.empty()) {
    summary["objective"] = r.records.back().objective;
    summary["gradient_norm"] = r.records.back().gradient_norm;
  }
  w.json("summary.json", summary);
  return res;
}

StoredRun load_run(const fs::path &dir) {
  if (!fs::is_directory(dir))
    throw ArtifactError("run directory not found: " + dir.string());
  StoredRun run{experiment_from(dir), {}, {}, {}};
  const json summary = read_json(dir / "summary.json");
  if (!summary.contains("kind") || !summary["kind"].is_string())
    throw ArtifactError((dir / "summary.json").string() + ": missing run kind");
  run.kind = summary["kind"].get<std::string>();
  run.control = read_control(dir / "control.csv", run.experiment);
  if (run.kind == "sqp")
    run.feedback = read_feedback(dir / "feedback.csv", run.experiment);
  return run;
}

ValidationOutput cmd_validate(const fs::path &dir, std::optional<int> realizations,
                              std::optional<std::uint64_t> seed) {
  const StoredRun run = load_run(dir);
  const Experiment &exp = run.experiment;
  const int n = realizations.value_or(exp.config.validation.realizations);
  const std::uint64_t s = seed.value_or(exp.config.validation.seed);
  if (n < 1)
    throw ConfigError("validation needs at least one realization");
  const Eigen::MatrixXd sigmas = draw_parameters(n, exp.config.pde.parameters, s, "validation");
  const Eigen::VectorXd &y0 = exp.problem.initial_state;

  ValidationOutput v;
  v.times = times_of(exp.grid(), exp.report_nodes);
  const ControlTrajectory none = ControlTrajectory::zero(exp.grid(), exp.system->actuators());
  v.scenarios.push_back({"uncontrolled", realization_errors(exp, none, y0, sigmas, exp.report_nodes)});
  v.scenarios.push_back({"control", realization_errors(exp, run.control, y0, sigmas, exp.report_nodes)});
  if (run.feedback) {
    const ControlTrajectory u = closed_loop_solve(*exp.system, *run.feedback, y0).second;
    v.scenarios.push_back({"feedback", realization_errors(exp, u, y0, sigmas, exp.report_nodes)});
  }

  RunWriter w(dir);
  const auto levels = percentile_levels(exp.config.validation);
  json scen = json::array();
  for (const auto &sc : v.scenarios) {
    write_errors(w, "", sc, v.times, levels);
    scen.push_back(sc.name);
  }
  w.json("validation.json", {{"realizations", n},
                             {"seed", s},
                             {"report_times", v.times},
                             {"percentiles", levels},
                             {"scenarios", scen}});
  return v;
}

RobustnessOutput cmd_robustness(const fs::path &run_cl, const fs::path &run_ol,
                                std::optional<std::vector<double>> levels, const fs::path &out,
                                std::optional<int> realizations, std::optional<std::uint64_t> seed) {
  const StoredRun cl = load_run(run_cl);
  const StoredRun ol = load_run(run_ol);
  if (!cl.feedback)
    throw ArtifactError(run_cl.string() + " holds no feedback law");
  const Experiment &exp = cl.experiment;
  if (!(ol.experiment.grid() == exp.grid()) || ol.experiment.system->dofs() != exp.system->dofs() ||
      ol.experiment.config.pde != exp.config.pde)
    throw ConfigError("closed-loop and open-loop runs use different problems");
  const std::vector<double> grid_levels = levels.value_or(exp.config.validation.noise_levels);
  for (double l : grid_levels)
    if (!std::isfinite(l) || l < 0.0)
      throw ConfigError("noise levels must be finite and non-negative");
  const int n = realizations.value_or(exp.config.validation.realizations);
  const std::uint64_t s = seed.value_or(exp.config.validation.seed);
  if (n < 1)
    throw ConfigError("robustness needs at least one realization");
  const Eigen::MatrixXd sigmas = draw_parameters(n, exp.config.pde.parameters, s, "validation");

  RobustnessOutput r;
  r.times = times_of(exp.grid(), exp.report_nodes);
  RunWriter w(out);
  const auto pct = percentile_levels(exp.config.validation);
  const Eigen::Index last = static_cast<Eigen::Index>(r.times.size()) - 1;
  Eigen::MatrixXd summary(static_cast<Eigen::Index>(2 * grid_levels.size()), 6);
  for (std::size_t li = 0; li < grid_levels.size(); ++li) {
    RobustnessLevel lev;
    lev.level = grid_levels[li];
    const Eigen::VectorXd xi =
        noise_vector(exp.system->dofs(), s, li, exp.config.validation.noise);
    for (int side = 0; side < 2; ++side) {
      const int sign = side == 0 ? 1 : -1;
      const Eigen::VectorXd y = perturbed_initial(exp.problem.initial_state, lev.level, sign, xi);
      const ControlTrajectory u_cl = closed_loop_solve(*exp.system, *cl.feedback, y).second;
      lev.closed_loop[side] = realization_errors(exp, u_cl, y, sigmas, exp.report_nodes);
      lev.open_loop[side] = realization_errors(exp, ol.control, y, sigmas, exp.report_nodes);
      const std::string tag = "level" + std::to_string(li) + (side == 0 ? "_plus" : "_minus");
      write_errors(w, "", {tag + "_closed_loop", lev.closed_loop[side]}, r.times, pct);
      write_errors(w, "", {tag + "_open_loop", lev.open_loop[side]}, r.times, pct);
      summary.row(static_cast<Eigen::Index>(2 * li) + side) << lev.level, sign,
          column_percentile(lev.closed_loop[side], last, 50.0),
          column_percentile(lev.open_loop[side], last, 50.0),
          column_percentile(lev.closed_loop[side], last, 95.0),
          column_percentile(lev.open_loop[side], last, 95.0);
    }
    r.levels.push_back(std::move(lev));
  }
  w.csv("robustness_summary.csv",
        {"level", "sign", "closed_loop_median_T", "open_loop_median_T", "closed_loop_p95_T", "open_loop_p95_T"},
        summary);
  w.json("robustness.json", {{"closed_loop_run", run_cl.filename().string()},
                             {"open_loop_run", run_ol.filename().string()},
                             {"levels", grid_levels},
                             {"realizations", n},
                             {"seed", s},
                             {"noise", exp.config.validation.noise},
                             {"report_times", r.times}});
  return r;
}

CompareOutput cmd_compare(const ExperimentConfig &config, const fs::path &out, std::array<double, 2> thetas,
                          std::optional<int> realizations) {
  CompareOutput c;
  c.thetas = thetas;
  for (int i = 0; i < 2; ++i) {
    ExperimentConfig ci = config;
    ci.risk.theta = thetas[static_cast<std::size_t>(i)];
    validate_config(ci);
    const fs::path dir = out / ("theta_" + std::to_string(i));
    cmd_solve(ci, dir);
    const ValidationOutput v = cmd_validate(dir, realizations, config.validation.seed);
    c.times = v.times;
    c.errors[static_cast<std::size_t>(i)] = v.errors("feedback");
  }
  c.percentiles = percentile_levels(config.validation);
  const Eigen::MatrixXd a = percentile_table(c.errors[0], c.percentiles);
  const Eigen::MatrixXd b = percentile_table(c.errors[1], c.percentiles);
  c.deltas = (b - a).rightCols(b.cols() - 1);

  RunWriter w(out);
  const Eigen::Index last = c.errors[0].cols() - 1;
  Eigen::MatrixXd paired(c.errors[0].rows(), 2);
  paired << c.errors[0].col(last), c.errors[1].col(last);
  w.csv("paired_terminal_errors.csv", {"theta_0", "theta_1"}, paired);
  Eigen::MatrixXd deltas(c.deltas.rows(), c.deltas.cols() + 1);
  deltas << Eigen::Map<const Eigen::VectorXd>(c.percentiles.data(), static_cast<Eigen::Index>(c.percentiles.size())),
      c.deltas;
  w.csv("percentile_deltas.csv", with_first("percentile", time_labels(c.times)), deltas);
  w.json("compare.json", {{"thetas", thetas},
                          {"runs", {"theta_0", "theta_1"}},
                          {"report_times", c.times},
                          {"percentiles", c.percentiles}});
  return c;
}

} // namespace rafc
