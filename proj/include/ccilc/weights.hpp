#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ccilc/contour.hpp"

namespace ccilc {

struct DefinitenessFlags {
  bool positive_definite = false;
  bool positive_semidefinite = false;
};

// Eigenvalue check with tolerance relative to the block norm; symmetric input.
DefinitenessFlags analyze_definiteness(const Eigen::MatrixXd& w);

// Piecewise-constant per-sample matrix blocks: a default block plus
// non-overlapping [start, end) segments.
class TimeVaryingBlocks {
 public:
  struct Segment {
    int start = 0;
    int end = 0;
    Eigen::MatrixXd value;
  };

  explicit TimeVaryingBlocks(Eigen::MatrixXd default_block,
                             std::vector<Segment> segments = {});

  static TimeVaryingBlocks constant(Eigen::MatrixXd block) {
    return TimeVaryingBlocks(std::move(block));
  }

  const Eigen::MatrixXd& at(int k) const;
  int dim() const { return static_cast<int>(default_block_.rows()); }
  bool time_varying() const { return !segments_.empty(); }

  // Flags over every block (default and segments).
  DefinitenessFlags definiteness() const { return flags_; }

 private:
  Eigen::MatrixXd default_block_;
  std::vector<Segment> segments_;  // sorted by start
  DefinitenessFlags flags_;
};

// One iteration's weight blocks for errors, inputs, and input changes.
struct IterationWeights {
  TimeVaryingBlocks error_weight;         // W_e^k, acts on coupled errors
  TimeVaryingBlocks input_weight;         // W_f^k, acts on coupled inputs
  TimeVaryingBlocks input_change_weight;  // W_df^k, acts on coupled input changes
};

// Weight schedule over iterations: either one fixed set or a finite
// per-iteration table.
class WeightSchedule {
 public:
  static WeightSchedule fixed(IterationWeights weights);
  static WeightSchedule per_iteration(std::vector<IterationWeights> table);

  const IterationWeights& at(int iteration) const;
  bool iteration_invariant() const { return fixed_; }
  int table_size() const { return static_cast<int>(table_.size()); }

 private:
  bool fixed_ = true;
  std::vector<IterationWeights> table_;
};

// Demo weights favoring contour accuracy over tangential speed, with the
// input penalty smaller along the contour-error direction.
WeightSchedule demo_weight_schedule();

// Per-sample composed blocks (C^k)' W^k C^k, symmetrized.
struct AssembledWeights {
  std::vector<Eigen::MatrixXd> w_ec;   // n_o x n_o
  std::vector<Eigen::MatrixXd> w_fc;   // n_i x n_i
  std::vector<Eigen::MatrixXd> w_dfc;  // n_i x n_i

  int horizon() const { return static_cast<int>(w_ec.size()); }
  int error_dim() const { return static_cast<int>(w_ec[0].rows()); }
  int input_dim() const { return static_cast<int>(w_fc[0].rows()); }

  // Dense block-diagonal forms for the lifted path.
  Eigen::MatrixXd dense_error() const;
  Eigen::MatrixXd dense_input() const;
  Eigen::MatrixXd dense_input_change() const;
};

AssembledWeights assemble(const CouplingSchedule& coupling,
                          const WeightSchedule& weights, int iteration);

}  // namespace ccilc
