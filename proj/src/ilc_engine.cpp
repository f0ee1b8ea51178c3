#include "ccilc/ilc_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include "ccilc/errors.hpp"
#include "ccilc/lqt_solver.hpp"

namespace ccilc {

const char* to_string(SolverKind kind) {
  return kind == SolverKind::Lqt ? "lqt" : "lifted";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::FixedPointConvergent: return "fixed-point convergent";
    case Verdict::BallConvergent: return "ball convergent";
    case Verdict::ConditionsViolated: return "conditions violated";
  }
  return "unknown";
}

std::string ConvergenceReport::summary() const {
  std::ostringstream os;
  os << "verdict: " << to_string(verdict) << "\n";
  os << "worst contraction margin rho: " << worst_rho << "\n";
  if (empirical_contraction)
    os << "empirical contraction estimate: " << *empirical_contraction << "\n";
  if (!entries.empty()) {
    const ConditionFlags& f = entries.front().flags;
    os << "error coupling full column rank: " << (f.error_coupling_full_rank ? "yes" : "no")
       << "\n";
    os << "error weight positive definite: " << (f.error_weight_pd ? "yes" : "no") << "\n";
    os << "system nonsingular: " << (f.system_nonsingular ? "yes" : "no") << "\n";
    os << "input weight positive definite: " << (f.input_weight_pd ? "yes" : "no") << "\n";
    os << "input coupling full column rank: " << (f.input_coupling_full_rank ? "yes" : "no")
       << "\n";
  }
  return os.str();
}

namespace {

bool blocks_pd(const TimeVaryingBlocks& blocks) {
  return blocks.definiteness().positive_definite;
}

// A block-lower-triangular convolution matrix is nonsingular exactly when
// every feedthrough block is.
bool system_nonsingular(const LtvStateSpace& sys, double tol_ratio = 1e-8) {
  if (sys.input_dim() != sys.output_dim()) return false;
  const int blocks = sys.is_lti() ? 1 : sys.horizon();
  for (int k = 0; k < blocks; ++k) {
    if (!has_full_column_rank(sys.D(k), tol_ratio)) return false;
  }
  return true;
}

bool schedule_full_rank(const std::vector<Eigen::MatrixXd>& blocks) {
  for (const auto& b : blocks)
    if (!has_full_column_rank(b)) return false;
  return true;
}

}  // namespace

double contraction_margin_dense(const LtvStateSpace& sys,
                                const AssembledWeights& assembled,
                                int size_cap) {
  const LiftedSystem lifted = build_lifted(sys, size_cap);
  const Eigen::MatrixXd w_ec = assembled.dense_error();
  const Eigen::MatrixXd w_fc = assembled.dense_input();
  const Eigen::MatrixXd w_dfc = assembled.dense_input_change();
  const Eigen::MatrixXd M = lifted.matrix.transpose() * w_ec * lifted.matrix +
                            w_fc + w_dfc;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (M + M.transpose()));
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || d.maxCoeff() <= 0.0 ||
      d.minCoeff() <= d.maxCoeff() * 1e-14)
    throw NumericError(
        "contraction margin undefined: J'WecJ + Wfc + Wdfc is singular");
  const Eigen::MatrixXd T = ldlt.solve(w_dfc);
  return T.bdcSvd().singularValues()(0);
}

double contraction_margin_power(const LtvStateSpace& sys,
                                const AssembledWeights& assembled,
                                int max_iterations, double rel_tol) {
  const int N = sys.horizon();
  const int ni = sys.input_dim();

  // T z = (Q - L J) z, applied without forming the filters: feed the update
  // law the pair (f, e) = (z, -J z) so the error term cancels the simulated
  // response.
  const auto apply_T = [&](const Signal& z) -> Signal {
    const Signal jz = simulate(sys, z);
    return lqt_update(sys, assembled, Signal(-jz.values), z);
  };
  // T' w = Wdfc M^-1 w = Wdfc T (Wdfc^-1 w), using the block-diagonal weight.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> wdfc_llt(N);
  for (int k = 0; k < N; ++k) {
    wdfc_llt[k].compute(assembled.w_dfc[k]);
    if (wdfc_llt[k].info() != Eigen::Success)
      throw NumericError(
          "power iteration needs a positive definite input-change weight");
  }
  const auto apply_Tt = [&](const Signal& w) -> Signal {
    Signal scaled(ni, N);
    for (int k = 0; k < N; ++k)
      scaled.values.col(k) = wdfc_llt[k].solve(w.values.col(k));
    Signal minv = apply_T(scaled);
    Signal out(ni, N);
    for (int k = 0; k < N; ++k)
      out.values.col(k) = assembled.w_dfc[k] * minv.values.col(k);
    return out;
  };

  Signal z(ni, N);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < ni; ++i) z.values(i, k) = dist(rng);
  double nz = z.norm();
  if (nz == 0.0) return 0.0;
  z = (1.0 / nz) * z;

  double sigma2 = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Signal gz = apply_Tt(apply_T(z));
    const double next = z.stacked().dot(gz.stacked());
    const double gn = gz.norm();
    if (gn == 0.0) return 0.0;
    z = (1.0 / gn) * gz;
    if (it > 0 && std::abs(next - sigma2) <= rel_tol * std::abs(next)) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(std::max(0.0, sigma2));
}

ConvergenceEntry check_contraction_conditions(const LtvStateSpace& sys,
                                              const CouplingSchedule& coupling,
                                              const IterationWeights& weights,
                                              const AssembledWeights& assembled,
                                              int dense_margin_side,
                                              int size_cap) {
  ConvergenceEntry entry;
  entry.flags.error_coupling_full_rank = schedule_full_rank(coupling.error_blocks);
  entry.flags.input_coupling_full_rank = schedule_full_rank(coupling.input_blocks);
  entry.flags.error_weight_pd = blocks_pd(weights.error_weight);
  entry.flags.input_weight_pd = blocks_pd(weights.input_weight);
  entry.flags.system_nonsingular = system_nonsingular(sys);

  const int side =
      sys.horizon() * std::max(sys.input_dim(), sys.output_dim());
  if (side <= dense_margin_side) {
    entry.rho = contraction_margin_dense(sys, assembled, size_cap);
  } else {
    entry.rho = contraction_margin_power(sys, assembled);
  }
  return entry;
}

double contraction_estimate(const IlcHistory& history) {
  const auto& its = history.iterations;
  if (its.size() < 4)
    throw DimensionError(
        "contraction estimate needs at least 3 iterations plus the baseline");
  const Eigen::VectorXd f_inf = its.back().feedforward.stacked();
  double kappa = 0.0;
  for (std::size_t j = 0; j + 1 < its.size(); ++j) {
    const double den = (its[j].feedforward.stacked() - f_inf).norm();
    const double num = (its[j + 1].feedforward.stacked() - f_inf).norm();
    if (den <= 1e-14 * (1.0 + f_inf.norm())) continue;
    kappa = std::max(kappa, num / den);
  }
  return kappa;
}

namespace {

struct LiftedSolverState {
  LiftedSystem lifted;
  bool valid = false;
};

Signal solve_update(const IlcRunConfig& config, const LtvStateSpace& sys,
                    LiftedSolverState& lifted_state,
                    const AssembledWeights& aw, const Signal& e,
                    const Signal& f, int iteration) {
  if (config.solver == SolverKind::Lqt) {
    return lqt_update(sys, aw, e, f);
  }
  if (!lifted_state.valid) {
    lifted_state.lifted = build_lifted(sys, config.size_cap);
    lifted_state.valid = true;
  }
  const IlcFilters filters =
      compute_filters(lifted_state.lifted, aw.dense_error(), aw.dense_input(),
                      aw.dense_input_change(), iteration);
  return ilc_update(filters, f, e);
}

}  // namespace

IlcHistory run_ilc(const IlcRunConfig& config) {
  const LtvStateSpace& J = config.process_sensitivity;
  const LtvStateSpace& S = config.sensitivity;
  const int N = J.horizon();
  const int ni = J.input_dim();
  const int no = J.output_dim();

  if (S.horizon() != N)
    throw DimensionError("process sensitivity and sensitivity horizons differ");
  if (S.output_dim() != no || S.input_dim() != no)
    throw DimensionError("sensitivity must be square in the output channels");
  if (config.contour.sample_count() != N)
    throw DimensionError("contour sample count does not match the horizon");
  if (no != 2)
    throw DimensionError("contour tracking runs use 2 output channels");
  if (config.iterations < 0)
    throw ConfigError("iteration count must be nonnegative");

  const Signal y_d = config.contour.reference_signal();
  const Signal e_base = simulate(S, y_d);

  Signal f = config.initial_feedforward.value_or(Signal::zeros(ni, N));
  if (f.width() != ni || f.length() != N)
    throw DimensionError("initial feedforward does not match the system");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  IlcHistory history;
  history.iterations.reserve(config.iterations + 1);

  LiftedSolverState lifted_state;
  const bool iteration_invariant =
      config.weights.iteration_invariant() &&
      config.coupling != CouplingMode::ExactRotation;

  CouplingSchedule reference_schedule;
  if (config.coupling != CouplingMode::ExactRotation) {
    reference_schedule = reference_coupling_schedule(
        config.contour, config.coupling, config.input_coupling, ni);
  }

  bool all_conditions_pass = true;

  for (int j = 0; j <= config.iterations; ++j) {
    const auto t0 = std::chrono::steady_clock::now();

    Signal e = e_base - simulate(J, f);
    if (config.noise_stddev > 0.0) {
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < no; ++i)
          e.values(i, k) += config.noise_stddev * noise(rng);
    }
    const Signal y = y_d - e;

    if (config.coupling == CouplingMode::ExactRotation) {
      reference_schedule =
          exact_coupling_schedule(config.contour, y, config.input_coupling);
    }
    const CouplingSchedule& schedule = reference_schedule;
    // The final record is report-only; clamp it into the table so a table
    // sized for the updates (0..iterations-1) still yields a last row.
    const int wj = (j == config.iterations && !config.weights.iteration_invariant())
                       ? std::min(j, config.weights.table_size() - 1)
                       : j;
    const IterationWeights& weights = config.weights.at(wj);
    const AssembledWeights aw = assemble(schedule, config.weights, wj);

    ConvergenceEntry entry = check_contraction_conditions(
        J, schedule, weights, aw, config.dense_margin_side, config.size_cap);
    all_conditions_pass = all_conditions_pass && entry.flags.all_pass();
    if (!entry.flags.all_pass()) {
      if (config.condition_mode == ConditionMode::Strict) {
        std::ostringstream os;
        os << "contraction conditions violated at iteration " << j
           << " (strict mode)";
        throw NumericError(os.str());
      }
      if (j == 0) {
        std::cerr << "warning: contraction conditions violated; the update may "
                     "diverge\n";
      }
    }

    IlcIterationRecord record;
    record.feedforward = f;
    record.error = e;
    record.contour_errors.resize(N);
    record.tangential_errors.resize(N);
    for (int k = 0; k < N; ++k) {
      const ContourErrorSample cp =
          closest_point(config.contour, y.sample(k), k);
      record.contour_errors(k) = cp.contour_error;
      record.tangential_errors(k) = cp.tangential_error;
    }
    record.error_norm = e.norm();
    record.contour_error_norm = record.contour_errors.norm();
    record.tangential_error_norm = record.tangential_errors.norm();
    record.axis_error_norms.resize(no);
    for (int i = 0; i < no; ++i)
      record.axis_error_norms(i) = e.channel_norm(i);
    double cost = 0.0;
    for (int k = 0; k < N; ++k) {
      cost += e.values.col(k).dot(aw.w_ec[k] * e.values.col(k));
      cost += f.values.col(k).dot(aw.w_fc[k] * f.values.col(k));
    }
    record.cost = cost;
    record.rho = entry.rho;

    history.report.entries.push_back(entry);

    if (j < config.iterations) {
      try {
        f = solve_update(config, J, lifted_state, aw, e, f, j);
      } catch (const Error& err) {
        std::ostringstream os;
        os << "solver failed at iteration " << j << ": " << err.what();
        throw NumericError(os.str());
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    record.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    history.iterations.push_back(std::move(record));
  }

  ConvergenceReport& report = history.report;
  report.worst_rho = 0.0;
  for (const auto& entry : report.entries)
    report.worst_rho = std::max(report.worst_rho, entry.rho);
  if (!all_conditions_pass) {
    report.verdict = Verdict::ConditionsViolated;
  } else if (iteration_invariant) {
    report.verdict = Verdict::FixedPointConvergent;
  } else {
    report.verdict = Verdict::BallConvergent;
  }
  if (iteration_invariant && history.iterations.size() >= 4) {
    report.empirical_contraction = contraction_estimate(history);
  }
  return history;
}

}  // namespace ccilc
