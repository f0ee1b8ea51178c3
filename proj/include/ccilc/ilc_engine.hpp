#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccilc/contour.hpp"
#include "ccilc/lifted.hpp"
#include "ccilc/signal.hpp"
#include "ccilc/state_space.hpp"
#include "ccilc/weights.hpp"

namespace ccilc {

enum class SolverKind { Lqt, Lifted };

enum class ConditionMode { Advisory, Strict };

const char* to_string(SolverKind kind);

struct IlcRunConfig {
  LtvStateSpace process_sensitivity;  // J: feedforward to output
  LtvStateSpace sensitivity;          // S: reference to error
  ReferenceContour contour;           // also provides the reference y_d
  CouplingMode coupling = CouplingMode::ExactRotation;
  InputCoupling input_coupling = InputCoupling::SameAsError;
  WeightSchedule weights = demo_weight_schedule();
  SolverKind solver = SolverKind::Lqt;
  int iterations = 10;
  std::uint64_t seed = 0;
  double noise_stddev = 0.0;  // optional disturbance on measured errors
  ConditionMode condition_mode = ConditionMode::Advisory;
  int size_cap = kDefaultSizeCap;
  int dense_margin_side = 600;  // dense spectral norm below, power iteration above
  std::optional<Signal> initial_feedforward;
};

// Structural conditions for trial-to-trial contraction of the update law.
struct ConditionFlags {
  bool error_coupling_full_rank = false;
  bool error_weight_pd = false;
  bool system_nonsingular = false;
  bool input_weight_pd = false;
  bool input_coupling_full_rank = false;

  bool all_pass() const {
    return error_coupling_full_rank && error_weight_pd &&
           (system_nonsingular ||
            (input_weight_pd && input_coupling_full_rank));
  }
};

enum class Verdict { FixedPointConvergent, BallConvergent, ConditionsViolated };

const char* to_string(Verdict verdict);

struct ConvergenceEntry {
  ConditionFlags flags;
  double rho = 0.0;  // spectral norm of the error-free iteration map
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;  // one per recorded iteration
  double worst_rho = 0.0;
  std::optional<double> empirical_contraction;  // filled by contraction_estimate
  Verdict verdict = Verdict::ConditionsViolated;
  std::string summary() const;
};

struct IlcIterationRecord {
  Signal feedforward;
  Signal error;
  Eigen::VectorXd contour_errors;     // per sample
  Eigen::VectorXd tangential_errors;  // per sample
  double error_norm = 0.0;
  double contour_error_norm = 0.0;
  double tangential_error_norm = 0.0;
  Eigen::VectorXd axis_error_norms;
  double cost = 0.0;  // |e|^2_Wec + |f|^2_Wfc at this iterate
  double rho = 0.0;
  double wall_ms = 0.0;
};

struct IlcHistory {
  std::vector<IlcIterationRecord> iterations;  // size = config.iterations + 1
  ConvergenceReport report;
};

IlcHistory run_ilc(const IlcRunConfig& config);

// Condition flags plus the contraction margin for one iteration's coupling
// and weights. The margin is computed densely below the configured side and
// by power iteration on the implicitly applied iteration map above it.
ConvergenceEntry check_contraction_conditions(const LtvStateSpace& sys,
                                              const CouplingSchedule& coupling,
                                              const IterationWeights& weights,
                                              const AssembledWeights& assembled,
                                              int dense_margin_side = 600,
                                              int size_cap = kDefaultSizeCap);

// Dense spectral norm of (J'WecJ + Wfc + Wdfc)^-1 Wdfc.
double contraction_margin_dense(const LtvStateSpace& sys,
                                const AssembledWeights& assembled,
                                int size_cap = kDefaultSizeCap);

// Power-iteration estimate of the same quantity; each matvec is one
// simulation plus one recursive solve.
double contraction_margin_power(const LtvStateSpace& sys,
                                const AssembledWeights& assembled,
                                int max_iterations = 50,
                                double rel_tol = 1e-6);

// Empirical contraction factor max_j |f_{j+1} - f_inf| / |f_j - f_inf| using
// the final iterate as the fixed-point stand-in. Needs >= 3 iterations.
double contraction_estimate(const IlcHistory& history);

}  // namespace ccilc
