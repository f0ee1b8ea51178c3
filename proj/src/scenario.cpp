#include "ccilc/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ccilc/errors.hpp"

namespace ccilc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const json& require(const json& node, const std::string& key,
                    const std::string& where) {
  auto it = node.find(key);
  if (it == node.end()) fail(where, "missing required key '" + key + "'");
  return *it;
}

Eigen::MatrixXd parse_matrix(const json& node, const std::string& where) {
  if (node.is_number())
    return Eigen::MatrixXd::Constant(1, 1, node.get<double>());
  if (!node.is_array()) fail(where, "expected a matrix (array of rows)");
  if (node.empty()) return Eigen::MatrixXd(0, 0);

  if (node[0].is_number()) {  // single row
    Eigen::MatrixXd m(1, node.size());
    for (std::size_t c = 0; c < node.size(); ++c) {
      if (!node[c].is_number()) fail(where, "row entries must be numbers");
      m(0, static_cast<int>(c)) = node[c].get<double>();
    }
    return m;
  }
  const std::size_t cols = node[0].size();
  Eigen::MatrixXd m(node.size(), cols);
  for (std::size_t r = 0; r < node.size(); ++r) {
    if (!node[r].is_array() || node[r].size() != cols)
      fail(where, "rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number()) fail(where, "matrix entries must be numbers");
      m(static_cast<int>(r), static_cast<int>(c)) = node[r][c].get<double>();
    }
  }
  return m;
}

std::vector<Eigen::MatrixXd> parse_matrix_sequence(const json& node,
                                                   const std::string& where) {
  if (!node.is_array() || node.empty() || !node[0].is_array() ||
      node[0].empty() || !(node[0][0].is_array() || node.size() == 0))
    fail(where, "expected an array of matrices (one per sample)");
  std::vector<Eigen::MatrixXd> seq;
  seq.reserve(node.size());
  for (std::size_t k = 0; k < node.size(); ++k)
    seq.push_back(parse_matrix(node[k], where + "[" + std::to_string(k) + "]"));
  return seq;
}

LtvStateSpace parse_system(const json& node, int horizon,
                           const std::string& where) {
  if (!node.is_object()) fail(where, "expected a system object");
  const bool lti = node.value("lti", true);
  if (lti) {
    return LtvStateSpace::lti(parse_matrix(require(node, "A", where), where + ".A"),
                              parse_matrix(require(node, "B", where), where + ".B"),
                              parse_matrix(require(node, "C", where), where + ".C"),
                              parse_matrix(require(node, "D", where), where + ".D"),
                              horizon);
  }
  return LtvStateSpace::ltv(
      parse_matrix_sequence(require(node, "A", where), where + ".A"),
      parse_matrix_sequence(require(node, "B", where), where + ".B"),
      parse_matrix_sequence(require(node, "C", where), where + ".C"),
      parse_matrix_sequence(require(node, "D", where), where + ".D"));
}

ReferenceContour parse_contour(const json& node, const std::string& base_dir,
                               const std::string& where) {
  if (!node.is_object()) fail(where, "expected a contour object");
  const std::string type = require(node, "type", where).get<std::string>();
  if (type == "csv") {
    const std::string rel = require(node, "path", where).get<std::string>();
    std::filesystem::path p(rel);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p))
      fail(where + ".path", "contour file does not exist: " + p.string());
    return ReferenceContour::from_csv(p.string());
  }
  const int samples = require(node, "samples", where).get<int>();
  if (type == "line") {
    const auto from = parse_matrix(require(node, "from", where), where + ".from");
    const auto to = parse_matrix(require(node, "to", where), where + ".to");
    if (from.size() != 2 || to.size() != 2)
      fail(where, "line endpoints must have 2 coordinates");
    return ReferenceContour::line({from(0), from(1)}, {to(0), to(1)}, samples);
  }
  if (type == "circle_arc") {
    const auto center =
        parse_matrix(require(node, "center", where), where + ".center");
    if (center.size() != 2) fail(where, "arc center must have 2 coordinates");
    return ReferenceContour::circle_arc(
        {center(0), center(1)}, require(node, "radius", where).get<double>(),
        node.value("angle_from", 0.0), node.value("angle_to", 2.0 * M_PI),
        samples);
  }
  if (type == "rounded_rect") {
    const auto center =
        parse_matrix(require(node, "center", where), where + ".center");
    if (center.size() != 2) fail(where, "rectangle center must have 2 coordinates");
    return ReferenceContour::rounded_rectangle(
        {center(0), center(1)}, require(node, "width", where).get<double>(),
        require(node, "height", where).get<double>(),
        require(node, "corner_radius", where).get<double>(), samples);
  }
  fail(where + ".type", "unknown contour type '" + type +
                            "' (csv, line, circle_arc, rounded_rect)");
}

TimeVaryingBlocks parse_blocks(const json& node, const std::string& where) {
  if (node.is_array() || node.is_number()) {
    try {
      return TimeVaryingBlocks::constant(parse_matrix(node, where));
    } catch (const Error& err) {
      fail(where, err.what());
    }
  }
  if (!node.is_object()) fail(where, "expected a weight block or segment object");
  std::vector<TimeVaryingBlocks::Segment> segments;
  if (node.contains("segments")) {
    const json& segs = node.at("segments");
    if (!segs.is_array()) fail(where + ".segments", "expected an array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string sw = where + ".segments[" + std::to_string(i) + "]";
      TimeVaryingBlocks::Segment s;
      s.start = require(segs[i], "start", sw).get<int>();
      s.end = require(segs[i], "end", sw).get<int>();
      s.value = parse_matrix(require(segs[i], "value", sw), sw + ".value");
      segments.push_back(std::move(s));
    }
  }
  try {
    return TimeVaryingBlocks(
        parse_matrix(require(node, "default", where), where + ".default"),
        std::move(segments));
  } catch (const Error& err) {
    fail(where, err.what());
  }
}

IterationWeights parse_iteration_weights(const json& node,
                                         const std::string& where) {
  return IterationWeights{
      parse_blocks(require(node, "w_e", where), where + ".w_e"),
      parse_blocks(require(node, "w_f", where), where + ".w_f"),
      parse_blocks(require(node, "w_df", where), where + ".w_df")};
}

WeightSchedule parse_weights(const json& node, const std::string& where) {
  if (!node.is_object()) fail(where, "expected a weights object");
  if (node.contains("per_iteration")) {
    const json& table = node.at("per_iteration");
    if (!table.is_array() || table.empty())
      fail(where + ".per_iteration", "expected a non-empty array");
    std::vector<IterationWeights> parsed;
    for (std::size_t j = 0; j < table.size(); ++j)
      parsed.push_back(parse_iteration_weights(
          table[j], where + ".per_iteration[" + std::to_string(j) + "]"));
    return WeightSchedule::per_iteration(std::move(parsed));
  }
  return WeightSchedule::fixed(parse_iteration_weights(node, where));
}

CouplingMode parse_coupling_mode(const std::string& text,
                                 const std::string& where) {
  if (text == "identity") return CouplingMode::Identity;
  if (text == "axes-linear") return CouplingMode::AxesLinear;
  if (text == "linear-rotation") return CouplingMode::LinearRotation;
  if (text == "exact-rotation") return CouplingMode::ExactRotation;
  fail(where, "unknown coupling mode '" + text +
                  "' (identity, axes-linear, linear-rotation, exact-rotation)");
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json root;
  try {
    root = json::parse(in, nullptr, true, true);  // with comments
  } catch (const json::parse_error& err) {
    throw ConfigError("scenario " + path + ": " + err.what());
  }
  const std::string base_dir =
      std::filesystem::path(path).parent_path().string();

  const ReferenceContour contour =
      parse_contour(require(root, "contour", "scenario"), base_dir,
                    "scenario.contour");
  const int horizon = contour.sample_count();

  LtvStateSpace J = LtvStateSpace::lti(Eigen::MatrixXd(0, 0),
                                       Eigen::MatrixXd(0, 2),
                                       Eigen::MatrixXd(2, 0),
                                       Eigen::MatrixXd::Identity(2, 2), 1);
  LtvStateSpace S = J;
  if (root.contains("plant") || root.contains("controller")) {
    const LtvStateSpace plant =
        parse_system(require(root, "plant", "scenario"), horizon, "scenario.plant");
    const LtvStateSpace controller = parse_system(
        require(root, "controller", "scenario"), horizon, "scenario.controller");
    FeedbackLoop loop = closed_loop(plant, controller);
    J = std::move(loop.process_sensitivity);
    S = std::move(loop.sensitivity);
  } else {
    J = parse_system(require(root, "process_sensitivity", "scenario"), horizon,
                     "scenario.process_sensitivity");
    S = parse_system(require(root, "sensitivity", "scenario"), horizon,
                     "scenario.sensitivity");
  }

  Scenario scenario;
  scenario.name = root.value("name", std::filesystem::path(path).stem().string());
  scenario.output_dir = root.value("output_dir", std::string("out"));
  scenario.dump_matrices = root.value("dump_matrices", false);

  IlcRunConfig config{std::move(J), std::move(S), contour};
  config.coupling = parse_coupling_mode(
      root.contains("coupling")
          ? require(root.at("coupling"), "mode", "scenario.coupling")
                .get<std::string>()
          : "exact-rotation",
      "scenario.coupling.mode");
  if (root.contains("coupling")) {
    const std::string input =
        root.at("coupling").value("input", std::string("same"));
    if (input == "same") {
      config.input_coupling = InputCoupling::SameAsError;
    } else if (input == "identity") {
      config.input_coupling = InputCoupling::Identity;
    } else {
      fail("scenario.coupling.input", "expected 'same' or 'identity'");
    }
  }
  config.weights = parse_weights(require(root, "weights", "scenario"),
                                 "scenario.weights");

  const std::string solver = root.value("solver", std::string("lqt"));
  if (solver == "lqt") {
    config.solver = SolverKind::Lqt;
  } else if (solver == "lifted") {
    config.solver = SolverKind::Lifted;
  } else {
    fail("scenario.solver", "expected 'lqt' or 'lifted'");
  }

  config.iterations = root.value("iterations", 10);
  if (config.iterations < 0)
    fail("scenario.iterations", "must be nonnegative");
  config.seed = root.value("seed", 0ULL);
  config.noise_stddev = root.contains("noise")
                            ? root.at("noise").value("stddev", 0.0)
                            : 0.0;
  if (config.noise_stddev < 0.0)
    fail("scenario.noise.stddev", "must be nonnegative");
  config.condition_mode = root.value("strict_convergence", false)
                              ? ConditionMode::Strict
                              : ConditionMode::Advisory;
  config.size_cap = root.value("size_cap", kDefaultSizeCap);
  config.dense_margin_side = root.value("dense_margin_side", 600);

  scenario.config = std::move(config);
  return scenario;
}

}  // namespace ccilc
