#pragma once

#include <Eigen/Dense>

#include "ccilc/signal.hpp"
#include "ccilc/state_space.hpp"

namespace ccilc {

// Default guard against accidental dense blowups; N * max(n_i, n_o) above
// this refuses to materialize and points at the recursive solver instead.
inline constexpr int kDefaultSizeCap = 6000;

// Finite-horizon convolution matrix of a state-space system: block (i, j) is
// the response at sample i to an input at sample j, zero above the diagonal.
struct LiftedSystem {
  Eigen::MatrixXd matrix;  // (N*n_o) x (N*n_i)
  int n_o = 0;
  int n_i = 0;
  int horizon = 0;

  Eigen::Block<const Eigen::MatrixXd> block(int i, int j) const {
    return matrix.block(i * n_o, j * n_i, n_o, n_i);
  }
};

// Fills the lifted matrix column-block by column-block, propagating the
// state impulse response. Columns are independent and run in parallel.
LiftedSystem build_lifted(const LtvStateSpace& sys,
                          int size_cap = kDefaultSizeCap);

// Serial reference: every column block is the simulated response to a unit
// impulse on the matching input channel. Independent code path, kept for
// testing the parallel builder.
LiftedSystem build_lifted_reference(const LtvStateSpace& sys,
                                    int size_cap = kDefaultSizeCap);

// Update matrices of f_{j+1} = Q f_j + L e_j for one iteration.
struct IlcFilters {
  Eigen::MatrixXd Q;  // (N*n_i) x (N*n_i)
  Eigen::MatrixXd L;  // (N*n_i) x (N*n_o)
  int iteration = 0;
};

// Minimizer filters of the quadratic trial cost
//   |e_next|^2_Wec + |f_next|^2_Wfc + |f_next - f|^2_Wdfc
// via one symmetric factorization of M = J' Wec J + Wfc + Wdfc:
//   Q = M^-1 (J' Wec J + Wdfc),  L = M^-1 J' Wec.
IlcFilters compute_filters(const LiftedSystem& J, const Eigen::MatrixXd& w_ec,
                           const Eigen::MatrixXd& w_fc,
                           const Eigen::MatrixXd& w_dfc, int iteration = 0);

Signal ilc_update(const IlcFilters& filters, const Signal& f, const Signal& e);

// Trial cost evaluated densely; e_next is predicted as e - J (f_next - f).
double lifted_cost(const LiftedSystem& J, const Eigen::MatrixXd& w_ec,
                   const Eigen::MatrixXd& w_fc, const Eigen::MatrixXd& w_dfc,
                   const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                   const Eigen::VectorXd& f_next);

}  // namespace ccilc
