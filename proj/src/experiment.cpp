#include "rafc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include "rafc/errors.hpp"
#include "rafc/parallel.hpp"
#include "rafc/rng.hpp"

namespace rafc {

using json = nlohmann::json;

ScalarField FunctionSpec::make() const {
  if (kind == "constant") {
    const double c = offset;
    return [c](double) { return c; };
  }
  if (kind == "shifted-cosine") {
    const double a = offset, b = amplitude, w = 2.0 * std::numbers::pi * frequency;
    return [a, b, w](double x) { return a - b * std::cos(w * x); };
  }
  throw ConfigError("unknown function kind '" + kind + "'");
}

std::vector<ScalarField> trig_decay_modes(int count, double decay) {
  std::vector<ScalarField> modes;
  for (int i = 1; i <= count; ++i) {
    const int j = (i + 1) / 2;
    const double scale = std::pow(static_cast<double>(i), -decay);
    const double w = j * std::numbers::pi;
    if (i % 2 == 1)
      modes.emplace_back([scale, w](double x) { return scale * std::cos(w * x); });
    else
      modes.emplace_back([scale, w](double x) { return scale * std::sin(w * x); });
  }
  return modes;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::ordered_json function_json(const FunctionSpec &f) {
  return {{"kind", f.kind}, {"offset", f.offset}, {"amplitude", f.amplitude},
          {"frequency", f.frequency}};
}

struct FieldIssue {
  std::string path;
  std::string message;
};

class Reader {
public:
  explicit Reader(std::vector<FieldIssue> &issues) : issues_(issues) {}

  bool keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed) {
    if (!obj.is_object()) {
      issue(path, "expected an object");
      return false;
    }
    for (const auto &[key, value] : obj.items()) {
      (void)value;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; }))
        issue(join(path, key), "unknown field");
    }
    return true;
  }

  void number(const json &obj, const std::string &path, const char *key, double &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_number())
      return issue(join(path, key), "expected a number");
    out = v.get<double>();
  }

  void integer(const json &obj, const std::string &path, const char *key, int &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_number_integer())
      return issue(join(path, key), "expected an integer");
    out = v.get<int>();
  }

  void seed(const json &obj, const std::string &path, const char *key, std::uint64_t &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_number_unsigned())
      return issue(join(path, key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void text(const json &obj, const std::string &path, const char *key, std::string &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_string())
      return issue(join(path, key), "expected a string");
    out = v.get<std::string>();
  }

  void flag(const json &obj, const std::string &path, const char *key, bool &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_boolean())
      return issue(join(path, key), "expected true or false");
    out = v.get<bool>();
  }

  void numbers(const json &obj, const std::string &path, const char *key, std::vector<double> &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json &e) { return e.is_number(); }))
      return issue(join(path, key), "expected an array of numbers");
    out = v.get<std::vector<double>>();
  }

  void intervals(const json &obj, const std::string &path, const char *key,
                 std::vector<std::array<double, 2>> &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    const bool ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const json &e) {
      return e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number();
    });
    if (!ok)
      return issue(join(path, key), "expected an array of [a, b] pairs");
    out.clear();
    for (const auto &e : v)
      out.push_back({e[0].get<double>(), e[1].get<double>()});
  }

  void function(const json &obj, const std::string &path, const char *key, FunctionSpec &out) {
    if (!obj.contains(key))
      return;
    const json &v = obj.at(key);
    const std::string sub = join(path, key);
    if (!keys(v, sub, {"kind", "offset", "amplitude", "frequency"}))
      return;
    text(v, sub, "kind", out.kind);
    number(v, sub, "offset", out.offset);
    number(v, sub, "amplitude", out.amplitude);
    number(v, sub, "frequency", out.frequency);
  }

  void optional_function(const json &obj, const std::string &path, const char *key,
                         std::optional<FunctionSpec> &out) {
    if (!obj.contains(key))
      return;
    if (obj.at(key).is_null()) {
      out.reset();
      return;
    }
    FunctionSpec f;
    function(obj, path, key, f);
    out = f;
  }

  void issue(std::string path, std::string message) {
    issues_.push_back({std::move(path), std::move(message)});
  }

  static std::string join(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
  }

private:
  std::vector<FieldIssue> &issues_;
};

bool finite(double x) { return std::isfinite(x); }

void check_function(const FunctionSpec &f, const std::string &path, std::vector<FieldIssue> &out) {
  if (f.kind != "shifted-cosine" && f.kind != "constant")
    out.push_back({path + ".kind", "unknown function kind '" + f.kind +
                                       "' (expected shifted-cosine or constant)"});
  if (!finite(f.offset) || !finite(f.amplitude) || !finite(f.frequency))
    out.push_back({path, "parameters must be finite"});
}

std::vector<FieldIssue> check(const ExperimentConfig &c) {
  std::vector<FieldIssue> out;
  auto need = [&](bool ok, const char *path, const std::string &message) {
    if (!ok)
      out.push_back({path, message});
  };
  need(c.schema_version == ExperimentConfig::kSchemaVersion, "schema_version",
       "unsupported schema version " + std::to_string(c.schema_version));

  need(finite(c.pde.diffusion) && c.pde.diffusion > 0.0, "pde.diffusion", "must be positive");
  need(finite(c.pde.reaction_mean), "pde.reaction_mean", "must be finite");
  need(finite(c.pde.decay) && c.pde.decay >= 0.0, "pde.decay", "must be non-negative");
  need(c.pde.parameters >= 0, "pde.parameters", "must be non-negative");
  need(finite(c.pde.horizon) && c.pde.horizon > 0.0, "pde.horizon", "must be positive");

  const double cells = 1.0 / c.discretization.h;
  need(finite(c.discretization.h) && c.discretization.h > 0.0 && cells >= 2.0 - 1e-9 &&
           std::abs(cells - std::round(cells)) <= 1e-9 * cells,
       "discretization.h", "1/h must be an integer >= 2");
  need(c.discretization.time_steps >= 1, "discretization.time_steps", "must be at least 1");
  need(c.discretization.degree >= 0, "discretization.degree", "must be non-negative");

  need(finite(c.risk.theta) && c.risk.theta >= 0.0, "risk.theta",
       "must be non-negative (got " + std::to_string(c.risk.theta) + ")");
  need(c.risk.samples >= 2, "risk.samples", "must be at least 2");
  need(c.risk.node_rule == "monte-carlo" || c.risk.node_rule == "tensor-gauss", "risk.node_rule",
       "must be monte-carlo or tensor-gauss");
  need(c.risk.gauss_points >= 1, "risk.gauss_points", "must be at least 1");
  need(finite(c.risk.terminal_weight) && c.risk.terminal_weight >= 0.0, "risk.terminal_weight",
       "must be non-negative");

  need(!c.actuators.intervals.empty(), "actuators.intervals", "needs at least one actuator");
  ActuatorSet set;
  for (const auto &iv : c.actuators.intervals)
    set.intervals.emplace_back(iv[0], iv[1]);
  set.scaling = c.actuators.scaling;
  try {
    set.validate();
  } catch (const std::invalid_argument &e) {
    out.push_back({"actuators", e.what()});
  }

  check_function(c.targets.initial, "targets.initial", out);
  check_function(c.targets.expansion_initial, "targets.expansion_initial", out);
  check_function(c.targets.target_initial, "targets.target_initial", out);
  if (c.targets.terminal)
    check_function(*c.targets.terminal, "targets.terminal", out);
  need(finite(c.targets.target_reaction), "targets.target_reaction", "must be finite");

  need(finite(c.solver.tolerance) && c.solver.tolerance >= 0.0, "solver.tolerance",
       "must be non-negative");
  need(c.solver.max_iterations >= 1, "solver.max_iterations", "must be at least 1");
  need(c.solver.gd_iterations >= 0, "solver.gd_iterations", "must be non-negative");
  need(c.solver.gd_rule == "armijo" || c.solver.gd_rule == "fixed", "solver.gd_rule",
       "must be armijo or fixed");
  need(finite(c.solver.gd_step) && c.solver.gd_step > 0.0, "solver.gd_step", "must be positive");

  need(c.validation.realizations >= 1, "validation.realizations", "must be at least 1");
  for (double t : c.validation.report_times)
    need(finite(t) && t >= 0.0 && t <= c.pde.horizon, "validation.report_times",
         "times must lie in [0, horizon]");
  for (double q : c.validation.percentiles)
    need(finite(q) && q > 0.0 && q < 100.0, "validation.percentiles",
         "percentiles must lie strictly between 0 and 100");
  for (double l : c.validation.noise_levels)
    need(finite(l) && l >= 0.0, "validation.noise_levels", "levels must be non-negative");
  if (out.empty() && c.discretization.time_steps >= 1) {
    try {
      report_nodes(c.validation, TimeGrid(c.pde.horizon, c.discretization.time_steps));
    } catch (const ConfigError &e) {
      out.push_back({"validation.report_times", e.what()});
    }
  }
  return out;
}

// 1-based line of the field's key in the source text, 0 if not found.
int line_of(std::string_view text, const std::string &path) {
  std::size_t pos = 0;
  std::size_t start = 0;
  bool found = false;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const std::size_t hit = text.find("\"" + key + "\"", pos);
    if (hit == std::string_view::npos)
      break;
    pos = hit;
    found = true;
    if (dot == std::string::npos)
      break;
    start = dot + 1;
  }
  if (!found)
    return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string located(std::string_view origin, int line, const std::string &message) {
  std::ostringstream os;
  os << origin;
  if (line > 0)
    os << ":" << line;
  os << ": " << message;
  return os.str();
}

} // namespace

nlohmann::ordered_json to_json(const ExperimentConfig &c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["pde"] = {{"diffusion", c.pde.diffusion},   {"reaction_mean", c.pde.reaction_mean},
              {"decay", c.pde.decay},           {"parameters", c.pde.parameters},
              {"horizon", c.pde.horizon}};
  j["discretization"] = {{"h", c.discretization.h},
                         {"time_steps", c.discretization.time_steps},
                         {"degree", c.discretization.degree}};
  j["risk"] = {{"theta", c.risk.theta},           {"samples", c.risk.samples},
               {"seed", c.risk.seed},             {"node_rule", c.risk.node_rule},
               {"gauss_points", c.risk.gauss_points}, {"terminal_weight", c.risk.terminal_weight}};
  nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
  for (const auto &iv : c.actuators.intervals)
    intervals.push_back({iv[0], iv[1]});
  j["actuators"] = {{"intervals", intervals}, {"scaling", c.actuators.scaling}};
  j["targets"] = {{"initial", function_json(c.targets.initial)},
                  {"expansion_initial", function_json(c.targets.expansion_initial)},
                  {"target_initial", function_json(c.targets.target_initial)},
                  {"target_reaction", c.targets.target_reaction},
                  {"terminal", c.targets.terminal ? function_json(*c.targets.terminal)
                                                  : nlohmann::ordered_json(nullptr)}};
  j["solver"] = {{"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"gd_iterations", c.solver.gd_iterations},
                 {"gd_rule", c.solver.gd_rule},
                 {"gd_step", c.solver.gd_step}};
  j["validation"] = {{"realizations", c.validation.realizations},
                     {"seed", c.validation.seed},
                     {"report_times", c.validation.report_times},
                     {"percentiles", c.validation.percentiles},
                     {"noise_levels", c.validation.noise_levels},
                     {"noise", c.validation.noise}};
  return j;
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    const auto upto = std::min(e.byte, text.size());
    const auto before = text.substr(0, upto);
    const int line = 1 + static_cast<int>(std::count(before.begin(), before.end(), '\n'));
    const auto nl = before.rfind('\n');
    const auto column = upto - (nl == std::string_view::npos ? 0 : nl + 1);
    throw ConfigError(located(origin, line, "column " + std::to_string(column) +
                                                ": malformed JSON (" + e.what() + ")"));
  }

  ExperimentConfig c;
  std::vector<FieldIssue> issues;
  Reader r(issues);
  if (r.keys(doc, "", {"schema_version", "pde", "discretization", "risk", "actuators", "targets",
                       "solver", "validation"})) {
    r.integer(doc, "", "schema_version", c.schema_version);
    if (doc.contains("pde") && r.keys(doc["pde"], "pde", {"diffusion", "reaction_mean", "decay",
                                                          "parameters", "horizon"})) {
      const json &s = doc["pde"];
      r.number(s, "pde", "diffusion", c.pde.diffusion);
      r.number(s, "pde", "reaction_mean", c.pde.reaction_mean);
      r.number(s, "pde", "decay", c.pde.decay);
      r.integer(s, "pde", "parameters", c.pde.parameters);
      r.number(s, "pde", "horizon", c.pde.horizon);
    }
    if (doc.contains("discretization") &&
        r.keys(doc["discretization"], "discretization", {"h", "time_steps", "degree"})) {
      const json &s = doc["discretization"];
      r.number(s, "discretization", "h", c.discretization.h);
      r.integer(s, "discretization", "time_steps", c.discretization.time_steps);
      r.integer(s, "discretization", "degree", c.discretization.degree);
    }
    if (doc.contains("risk") && r.keys(doc["risk"], "risk", {"theta", "samples", "seed", "node_rule",
                                                            "gauss_points", "terminal_weight"})) {
      const json &s = doc["risk"];
      r.number(s, "risk", "theta", c.risk.theta);
      r.integer(s, "risk", "samples", c.risk.samples);
      r.seed(s, "risk", "seed", c.risk.seed);
      r.text(s, "risk", "node_rule", c.risk.node_rule);
      r.integer(s, "risk", "gauss_points", c.risk.gauss_points);
      r.number(s, "risk", "terminal_weight", c.risk.terminal_weight);
    }
    if (doc.contains("actuators") &&
        r.keys(doc["actuators"], "actuators", {"intervals", "scaling"})) {
      const json &s = doc["actuators"];
      r.intervals(s, "actuators", "intervals", c.actuators.intervals);
      r.number(s, "actuators", "scaling", c.actuators.scaling);
    }
    if (doc.contains("targets") &&
        r.keys(doc["targets"], "targets", {"initial", "expansion_initial", "target_initial",
                                           "target_reaction", "terminal"})) {
      const json &s = doc["targets"];
      r.function(s, "targets", "initial", c.targets.initial);
      r.function(s, "targets", "expansion_initial", c.targets.expansion_initial);
      r.function(s, "targets", "target_initial", c.targets.target_initial);
      r.number(s, "targets", "target_reaction", c.targets.target_reaction);
      r.optional_function(s, "targets", "terminal", c.targets.terminal);
    }
    if (doc.contains("solver") &&
        r.keys(doc["solver"], "solver", {"tolerance", "max_iterations", "gd_iterations", "gd_rule",
                                         "gd_step"})) {
      const json &s = doc["solver"];
      r.number(s, "solver", "tolerance", c.solver.tolerance);
      r.integer(s, "solver", "max_iterations", c.solver.max_iterations);
      r.integer(s, "solver", "gd_iterations", c.solver.gd_iterations);
      r.text(s, "solver", "gd_rule", c.solver.gd_rule);
      r.number(s, "solver", "gd_step", c.solver.gd_step);
    }
    if (doc.contains("validation") &&
        r.keys(doc["validation"], "validation", {"realizations", "seed", "report_times",
                                                 "percentiles", "noise_levels", "noise"})) {
      const json &s = doc["validation"];
      r.integer(s, "validation", "realizations", c.validation.realizations);
      r.seed(s, "validation", "seed", c.validation.seed);
      r.numbers(s, "validation", "report_times", c.validation.report_times);
      r.numbers(s, "validation", "percentiles", c.validation.percentiles);
      r.numbers(s, "validation", "noise_levels", c.validation.noise_levels);
      r.flag(s, "validation", "noise", c.validation.noise);
    }
  }
  if (issues.empty())
    issues = check(c);
  if (!issues.empty()) {
    const FieldIssue &first = issues.front();
    throw ConfigError(located(origin, line_of(text, first.path), first.path + ": " + first.message));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

void validate_config(const ExperimentConfig &config) {
  const auto issues = check(config);
  if (!issues.empty())
    throw ConfigError(issues.front().path + ": " + issues.front().message);
}

// ---------------------------------------------------------------------------
// Experiment assembly

std::vector<int> report_nodes(const ValidationConfig &validation, const TimeGrid &grid) {
  std::vector<double> times = validation.report_times;
  if (times.empty())
    for (int j = 0; j < 6; ++j)
      times.push_back(grid.horizon * j / 5.0);
  std::vector<int> nodes;
  for (double t : times) {
    const double pos = t / grid.dt();
    const double k = std::round(pos);
    if (std::abs(pos - k) > 1e-9 * std::max(1.0, pos) || k < 0 || k > grid.steps)
      throw ConfigError("report time " + std::to_string(t) + " is not a node of the time grid");
    nodes.push_back(static_cast<int>(k));
  }
  return nodes;
}

PceTrajectory Experiment::initial_expansion() const {
  return uncontrolled_expansion(*system, grid(), expansion_initial);
}

SqpOptions Experiment::sqp_options() const {
  SqpOptions o;
  o.tolerance = config.solver.tolerance;
  o.max_iterations = config.solver.max_iterations;
  return o;
}

GdOptions Experiment::gd_options() const {
  GdOptions o;
  o.iterations = config.solver.gd_iterations;
  o.rule = config.solver.gd_rule == "fixed" ? StepRule::fixed : StepRule::armijo;
  o.initial_step = config.solver.gd_step;
  return o;
}

Experiment build_experiment(const ExperimentConfig &config) {
  validate_config(config);
  Experiment exp;
  exp.config = config;
  exp.mesh = build_mesh(config.discretization.h);

  ActuatorSet actuators;
  for (const auto &iv : config.actuators.intervals)
    actuators.intervals.emplace_back(iv[0], iv[1]);
  actuators.scaling = config.actuators.scaling;

  const double cbar = config.pde.reaction_mean;
  const FemMatrices fem = assemble(exp.mesh, [cbar](double) { return cbar; },
                                   trig_decay_modes(config.pde.parameters, config.pde.decay),
                                   actuators);
  const TotalDegreeIndexSet set = build_index_set(config.pde.parameters, config.discretization.degree);
  auto system = std::make_shared<GalerkinSystem>(assemble_system(set, fem, config.pde.diffusion));
  exp.system = system;

  const TimeGrid grid(config.pde.horizon, config.discretization.time_steps);
  TrackingProblem &problem = exp.problem;
  problem.system = system;
  problem.initial_state = interpolate(exp.mesh, config.targets.initial.make());
  problem.theta = config.risk.theta;
  problem.terminal_weight = config.risk.terminal_weight;

  // Target: deterministic uncontrolled solve with a constant reaction.
  const Eigen::MatrixXd target_op =
      -(config.pde.diffusion * fem.stiffness + config.targets.target_reaction * fem.mass);
  problem.target.grid = grid;
  problem.target.values =
      crank_nicolson_solve(fem.mass, target_op, fem.input, ControlTrajectory::zero(grid, fem.actuators()),
                           interpolate(exp.mesh, config.targets.target_initial.make()), {});
  problem.terminal_target = config.targets.terminal ? interpolate(exp.mesh, config.targets.terminal->make())
                                                    : Eigen::VectorXd(problem.target.values.col(grid.steps));

  if (config.risk.node_rule == "tensor-gauss") {
    problem.nodes = SampleNodeSet::tensor_gauss(set, config.risk.gauss_points);
  } else {
    CounterRng rng(CounterRng::derive(config.risk.seed, "weight-nodes"));
    problem.nodes = SampleNodeSet::monte_carlo(set, config.risk.samples, rng);
  }
  exp.expansion_initial = interpolate(exp.mesh, config.targets.expansion_initial.make());
  exp.report_nodes = report_nodes(config.validation, grid);
  return exp;
}

// ---------------------------------------------------------------------------
// Validation helpers

Eigen::MatrixXd draw_parameters(int count, int dimension, std::uint64_t seed,
                                std::string_view stream) {
  CounterRng rng(CounterRng::derive(seed, stream));
  Eigen::MatrixXd sigmas(count, dimension);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < dimension; ++j)
      sigmas(i, j) = rng.uniform(-1.0, 1.0);
  return sigmas;
}

std::vector<int> all_nodes(const TimeGrid &grid) {
  std::vector<int> nodes(static_cast<std::size_t>(grid.nodes()));
  for (int k = 0; k < grid.nodes(); ++k)
    nodes[static_cast<std::size_t>(k)] = k;
  return nodes;
}

Eigen::MatrixXd realization_errors(const Experiment &exp, const ControlTrajectory &u,
                                   const Eigen::VectorXd &initial, const Eigen::MatrixXd &sigmas,
                                   const std::vector<int> &nodes) {
  const GalerkinSystem &sys = *exp.system;
  const Eigen::MatrixXd weight = sys.fem.observation_weight();
  const auto &target = exp.problem.target.values;
  Eigen::MatrixXd errors(sigmas.rows(), static_cast<Eigen::Index>(nodes.size()));
  parallel_for(static_cast<int>(sigmas.rows()), [&](int i) {
    const Eigen::RowVectorXd sigma = sigmas.row(i);
    const NodalTrajectory path =
        sample_path_solve(sys, {sigma.data(), static_cast<std::size_t>(sigma.size())}, u, initial);
    for (std::size_t c = 0; c < nodes.size(); ++c) {
      const Eigen::VectorXd diff = path.values.col(nodes[c]) - target.col(nodes[c]);
      errors(i, static_cast<Eigen::Index>(c)) = std::sqrt(std::max(0.0, diff.dot(weight * diff)));
    }
  });
  return errors;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty())
    throw std::invalid_argument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double column_percentile(const Eigen::MatrixXd &m, Eigen::Index col, double q) {
  const Eigen::VectorXd c = m.col(col);
  return percentile(std::vector<double>(c.data(), c.data() + c.size()), q);
}

Eigen::VectorXd perturbed_initial(const Eigen::VectorXd &y0, double level, int sign,
                                  const Eigen::VectorXd &xi) {
  return y0 + static_cast<double>(sign) *
                  (Eigen::VectorXd::Constant(y0.size(), level) + 0.01 * level * xi);
}

} // namespace rafc
