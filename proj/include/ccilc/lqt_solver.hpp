#pragma once

#include <cstddef>

#include "ccilc/signal.hpp"
#include "ccilc/state_space.hpp"
#include "ccilc/weights.hpp"

namespace ccilc {

struct SweepDiagnostics {
  double max_stage_gain_condition = 0.0;  // worst eigenvalue ratio of Rbar(k)
  double max_riccati_asymmetry = 0.0;     // before symmetrization
  std::size_t peak_memory_bytes = 0;      // stored sweep data
  bool degenerate_state = false;          // state dimension zero
  int horizon = 0;
};

// One trial update f_next = f + df by the tracking reformulation of the
// quadratic trial cost: backward Riccati/adjoint sweeps over the stage
// weights, then a forward pass. O(N) work and memory in the horizon.
//
// Requires every input-change weight block to be positive definite.
Signal lqt_update(const LtvStateSpace& sys, const AssembledWeights& aw,
                  const Signal& e, const Signal& f,
                  SweepDiagnostics* diagnostics = nullptr);

}  // namespace ccilc
