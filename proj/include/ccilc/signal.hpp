#pragma once

#include <Eigen/Dense>

namespace ccilc {

// Fixed-width multichannel discrete-time signal over samples k = 0..N-1.
// Stored channel-major: values(i, k) is channel i at sample k, so the
// underlying column-major buffer is already the lifted stacking
// [x(0); x(1); ...; x(N-1)].
struct Signal {
  Eigen::MatrixXd values;  // width x length

  Signal() = default;
  Signal(int width, int length) : values(Eigen::MatrixXd::Zero(width, length)) {}
  explicit Signal(Eigen::MatrixXd v) : values(std::move(v)) {}

  static Signal zeros(int width, int length) { return Signal(width, length); }

  static Signal from_stacked(const Eigen::VectorXd& stacked, int width) {
    Signal s;
    s.values = Eigen::Map<const Eigen::MatrixXd>(stacked.data(), width,
                                                 stacked.size() / width);
    return s;
  }

  int width() const { return static_cast<int>(values.rows()); }
  int length() const { return static_cast<int>(values.cols()); }

  Eigen::VectorXd sample(int k) const { return values.col(k); }

  Eigen::VectorXd stacked() const {
    return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  }

  double norm() const { return values.norm(); }
  double channel_norm(int i) const { return values.row(i).norm(); }
};

inline Signal operator+(const Signal& a, const Signal& b) {
  return Signal(a.values + b.values);
}

inline Signal operator-(const Signal& a, const Signal& b) {
  return Signal(a.values - b.values);
}

inline Signal operator*(double s, const Signal& a) { return Signal(s * a.values); }

}  // namespace ccilc
