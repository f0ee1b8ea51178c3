#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ccilc/signal.hpp"

namespace ccilc {

// Discrete-time state-space system, either LTI (one matrix per role,
// broadcast over the horizon) or LTV (one matrix per role per sample).
//
//   x(k+1) = A(k) x(k) + B(k) u(k)
//   y(k)   = C(k) x(k) + D(k) u(k)
class LtvStateSpace {
 public:
  static LtvStateSpace lti(Eigen::MatrixXd A, Eigen::MatrixXd B,
                           Eigen::MatrixXd C, Eigen::MatrixXd D, int horizon);

  static LtvStateSpace ltv(std::vector<Eigen::MatrixXd> A,
                           std::vector<Eigen::MatrixXd> B,
                           std::vector<Eigen::MatrixXd> C,
                           std::vector<Eigen::MatrixXd> D);

  bool is_lti() const { return lti_; }
  int horizon() const { return horizon_; }
  int state_dim() const { return static_cast<int>(A_[0].rows()); }
  int input_dim() const { return static_cast<int>(B_[0].cols()); }
  int output_dim() const { return static_cast<int>(C_[0].rows()); }

  const Eigen::MatrixXd& A(int k) const { return A_[lti_ ? 0 : k]; }
  const Eigen::MatrixXd& B(int k) const { return B_[lti_ ? 0 : k]; }
  const Eigen::MatrixXd& C(int k) const { return C_[lti_ ? 0 : k]; }
  const Eigen::MatrixXd& D(int k) const { return D_[lti_ ? 0 : k]; }

 private:
  LtvStateSpace(bool lti, int horizon, std::vector<Eigen::MatrixXd> A,
                std::vector<Eigen::MatrixXd> B, std::vector<Eigen::MatrixXd> C,
                std::vector<Eigen::MatrixXd> D);

  bool lti_ = true;
  int horizon_ = 0;
  std::vector<Eigen::MatrixXd> A_, B_, C_, D_;
};

// Runs the state recursion from x0 (default zero) and returns the output
// signal. ILC trials always start from zero state; a nonzero x0 is accepted
// for testing only.
Signal simulate(const LtvStateSpace& sys, const Signal& u,
                const Eigen::VectorXd& x0 = Eigen::VectorXd());

// Closed-loop maps of the standard feedback interconnection with plant input
// u = controller(e) + f and error e = y_d - y.
struct FeedbackLoop {
  LtvStateSpace process_sensitivity;  // f -> y   (feedforward to output)
  LtvStateSpace sensitivity;          // y_d -> e (reference to error)
};

FeedbackLoop closed_loop(const LtvStateSpace& plant,
                         const LtvStateSpace& controller);

}  // namespace ccilc
