#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ccilc/signal.hpp"

namespace ccilc {

// Planar reference contour given as sampled positions y_d(k), interpolated
// piecewise-linearly for closest-point queries. Tangent angles are measured
// from the first coordinate axis and precomputed by central differences
// (one-sided at the endpoints, previous angle reused across stationary
// samples).
class ReferenceContour {
 public:
  explicit ReferenceContour(Eigen::MatrixXd points /* 2 x N */);

  static ReferenceContour from_csv(const std::string& path);
  static ReferenceContour line(const Eigen::Vector2d& from,
                               const Eigen::Vector2d& to, int samples);
  static ReferenceContour circle_arc(const Eigen::Vector2d& center,
                                     double radius, double angle_from,
                                     double angle_to, int samples);
  static ReferenceContour rounded_rectangle(const Eigen::Vector2d& center,
                                            double width, double height,
                                            double corner_radius, int samples);

  int sample_count() const { return static_cast<int>(points_.cols()); }
  Eigen::Vector2d point(int k) const { return points_.col(k); }
  const Eigen::MatrixXd& points() const { return points_; }
  double tangent_angle(int k) const { return tangent_angles_[k]; }

  Signal reference_signal() const { return Signal(points_); }

  // Piecewise-linear geometry; segment i joins sample i to sample i+1.
  int segment_count() const { return sample_count() - 1; }
  double segment_length(int i) const { return segment_lengths_[i]; }
  Eigen::Vector2d segment_tangent(int i) const { return segment_tangents_.col(i); }
  double segment_angle(int i) const { return segment_angles_[i]; }
  double arc_length(int i, double t) const {
    return cumulative_lengths_[i] + t * segment_lengths_[i];
  }

 private:
  Eigen::MatrixXd points_;
  std::vector<double> tangent_angles_;
  std::vector<double> segment_lengths_;
  std::vector<double> segment_angles_;
  std::vector<double> cumulative_lengths_;
  Eigen::MatrixXd segment_tangents_;  // 2 x (N-1), unit (previous reused when degenerate)
};

// Exact contour-error sample at one output position.
//
// contour_error is signed positive when the position lies to the left of the
// directed contour; its magnitude is exactly the distance to the closest
// point. frame_angle is the direction treated as along-contour: the segment
// tangent for interior projections, the perpendicular of the error vector at
// corner hits, and the containing segment's tangent when the error vanishes.
struct ContourErrorSample {
  double contour_error = 0.0;
  double tangential_error = 0.0;
  Eigen::Vector2d closest = Eigen::Vector2d::Zero();
  double frame_angle = 0.0;
  int segment = 0;
  double arc_position = 0.0;
};

// Closest point on the contour. Ties resolve to the smallest arc-length
// coordinate. The time-indexed overload also fills tangential_error from the
// time-matched error e(k) = y_d(k) - y.
ContourErrorSample closest_point(const ReferenceContour& contour,
                                 const Eigen::Vector2d& y);
ContourErrorSample closest_point(const ReferenceContour& contour,
                                 const Eigen::Vector2d& y, int time_index);

// Coupling block stacking individual axis errors on top of the linear
// contour-error approximation row: [[1,0],[0,1],[cos t, -sin t]].
Eigen::Matrix<double, 3, 2> coupling_axes_linear(double theta);

// Plane rotation [[cos a, -sin a],[sin a, cos a]].
Eigen::Matrix2d coupling_rotation(double angle);

// Rotation that maps a channel-ordered error sample to its (contour,
// tangential) components for a contour whose along direction has the given
// tangent angle. First row recovers the signed contour error exactly on
// straight segments.
Eigen::Matrix2d error_frame(double tangent_angle);

enum class CouplingMode { Identity, AxesLinear, LinearRotation, ExactRotation };

enum class InputCoupling { SameAsError, Identity };

const char* to_string(CouplingMode mode);

// Per-sample coupling blocks C_e^k (errors) and C_f^k (inputs).
struct CouplingSchedule {
  CouplingMode mode = CouplingMode::Identity;
  std::vector<Eigen::MatrixXd> error_blocks;
  std::vector<Eigen::MatrixXd> input_blocks;

  int size() const { return static_cast<int>(error_blocks.size()); }
  int coupled_error_dim() const {
    return static_cast<int>(error_blocks[0].rows());
  }
  int coupled_input_dim() const {
    return static_cast<int>(input_blocks[0].rows());
  }
};

// Iteration-invariant schedules built from the reference tangents. Identity
// mode works for any channel count; the others require 2 axes.
CouplingSchedule reference_coupling_schedule(const ReferenceContour& contour,
                                             CouplingMode mode,
                                             InputCoupling input_coupling,
                                             int input_dim);

// Iteration-varying exact schedule: one closest-point frame per sample of the
// iteration's position output. Queries are independent and run in parallel.
CouplingSchedule exact_coupling_schedule(const ReferenceContour& contour,
                                         const Signal& y,
                                         InputCoupling input_coupling);

// Serial reference for the parallel builder, kept for testing.
CouplingSchedule exact_coupling_schedule_serial(const ReferenceContour& contour,
                                                const Signal& y,
                                                InputCoupling input_coupling);

bool has_full_column_rank(const Eigen::MatrixXd& m, double tol_ratio = 1e-8);

}  // namespace ccilc
