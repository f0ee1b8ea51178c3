#include "ccilc/contour.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ccilc/csv.hpp"
#include "ccilc/errors.hpp"

namespace ccilc {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

ReferenceContour::ReferenceContour(Eigen::MatrixXd points)
    : points_(std::move(points)) {
  if (points_.rows() != 2)
    throw DimensionError("contour points must have 2 coordinates per sample");
  const int n = sample_count();
  if (n < 2) throw DimensionError("contour needs at least 2 samples");

  double scale = 0.0;
  for (int k = 0; k < n; ++k) scale = std::max(scale, points_.col(k).norm());
  const double degenerate = 1e-14 * std::max(1.0, scale);

  segment_lengths_.resize(n - 1);
  segment_angles_.resize(n - 1);
  cumulative_lengths_.resize(n - 1);
  segment_tangents_ = Eigen::MatrixXd::Zero(2, n - 1);

  bool any_tangent = false;
  Eigen::Vector2d carried = Eigen::Vector2d::Zero();
  // First pass to seed the carry for leading zero-length segments.
  for (int i = 0; i < n - 1; ++i) {
    const Eigen::Vector2d d = points_.col(i + 1) - points_.col(i);
    if (d.norm() > degenerate) {
      carried = d.normalized();
      any_tangent = true;
      break;
    }
  }
  if (!any_tangent)
    throw DimensionError("contour needs at least 2 distinct points");

  double cum = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const Eigen::Vector2d d = points_.col(i + 1) - points_.col(i);
    const double len = d.norm();
    cumulative_lengths_[i] = cum;
    segment_lengths_[i] = len;
    if (len > degenerate) carried = d / len;
    segment_tangents_.col(i) = carried;
    segment_angles_[i] = std::atan2(carried.y(), carried.x());
    cum += len;
  }

  // Sample tangents by central differences, one-sided at the ends.
  tangent_angles_.resize(n);
  double previous = segment_angles_[0];
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - 1);
    const int hi = std::min(n - 1, k + 1);
    const Eigen::Vector2d d = points_.col(hi) - points_.col(lo);
    if (d.norm() > degenerate) previous = std::atan2(d.y(), d.x());
    tangent_angles_[k] = previous;
  }
}

ReferenceContour ReferenceContour::from_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty())
    throw ConfigError("contour file " + path + " has no data rows");
  int y1 = 1, y2 = 2;
  if (!table.header.empty()) {
    y1 = table.column_index("y1");
    y2 = table.column_index("y2");
  }
  Eigen::MatrixXd pts(2, static_cast<int>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (static_cast<int>(table.rows[r].size()) <= std::max(y1, y2)) {
      std::ostringstream os;
      os << "contour file " << path << " row " << r << " has too few columns";
      throw ConfigError(os.str());
    }
    pts(0, static_cast<int>(r)) = parse_double(table.rows[r][y1]);
    pts(1, static_cast<int>(r)) = parse_double(table.rows[r][y2]);
  }
  return ReferenceContour(std::move(pts));
}

ReferenceContour ReferenceContour::line(const Eigen::Vector2d& from,
                                        const Eigen::Vector2d& to, int samples) {
  if (samples < 2) throw ConfigError("line contour needs at least 2 samples");
  Eigen::MatrixXd pts(2, samples);
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    pts.col(k) = (1.0 - t) * from + t * to;
  }
  return ReferenceContour(std::move(pts));
}

ReferenceContour ReferenceContour::circle_arc(const Eigen::Vector2d& center,
                                              double radius, double angle_from,
                                              double angle_to, int samples) {
  if (samples < 2) throw ConfigError("arc contour needs at least 2 samples");
  if (radius <= 0.0) throw ConfigError("arc radius must be positive");
  Eigen::MatrixXd pts(2, samples);
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const double a = (1.0 - t) * angle_from + t * angle_to;
    pts.col(k) = center + radius * Eigen::Vector2d(std::cos(a), std::sin(a));
  }
  return ReferenceContour(std::move(pts));
}

ReferenceContour ReferenceContour::rounded_rectangle(
    const Eigen::Vector2d& center, double width, double height,
    double corner_radius, int samples) {
  if (samples < 2)
    throw ConfigError("rounded rectangle contour needs at least 2 samples");
  const double r = corner_radius;
  if (width <= 0.0 || height <= 0.0 || r < 0.0 || 2.0 * r > std::min(width, height))
    throw ConfigError(
        "rounded rectangle needs positive size and 2*corner_radius <= min(width, height)");

  const double sx = width / 2.0 - r;   // straight half-extents
  const double sy = height / 2.0 - r;
  const double quarter = M_PI_2 * r;
  // Counterclockwise from bottom midpoint: straights and quarter arcs.
  struct Piece {
    double length;
    Eigen::Vector2d at;      // start point (straight) or arc center
    Eigen::Vector2d dir;     // unit direction (straight only)
    double angle_from;       // arc only
    bool arc;
  };
  const std::vector<Piece> pieces = {
      {sx, {0.0, -height / 2.0}, {1.0, 0.0}, 0.0, false},
      {quarter, {sx, -sy}, {0.0, 0.0}, -M_PI_2, true},
      {2.0 * sy, {width / 2.0, -sy}, {0.0, 1.0}, 0.0, false},
      {quarter, {sx, sy}, {0.0, 0.0}, 0.0, true},
      {2.0 * sx, {sx, height / 2.0}, {-1.0, 0.0}, 0.0, false},
      {quarter, {-sx, sy}, {0.0, 0.0}, M_PI_2, true},
      {2.0 * sy, {-width / 2.0, sy}, {0.0, -1.0}, 0.0, false},
      {quarter, {-sx, -sy}, {0.0, 0.0}, M_PI, true},
      {sx, {-sx, -height / 2.0}, {1.0, 0.0}, 0.0, false},
  };

  double total = 0.0;
  for (const auto& p : pieces) total += p.length;

  const auto point_at = [&](double s) -> Eigen::Vector2d {
    for (const auto& p : pieces) {
      if (s <= p.length || &p == &pieces.back()) {
        if (p.arc) {
          const double a = p.angle_from + (r > 0.0 ? s / r : 0.0);
          return p.at + r * Eigen::Vector2d(std::cos(a), std::sin(a));
        }
        return p.at + s * p.dir;
      }
      s -= p.length;
    }
    return pieces.back().at;  // unreachable
  };

  Eigen::MatrixXd pts(2, samples);
  for (int k = 0; k < samples; ++k) {
    const double s = total * static_cast<double>(k) / samples;
    pts.col(k) = center + point_at(s);
  }
  return ReferenceContour(std::move(pts));
}

ContourErrorSample closest_point(const ReferenceContour& contour,
                                 const Eigen::Vector2d& y) {
  const int segments = contour.segment_count();
  double best_dist2 = std::numeric_limits<double>::infinity();
  int best_segment = 0;
  double best_t = 0.0;
  Eigen::Vector2d best_point = contour.point(0);

  for (int i = 0; i < segments; ++i) {
    const Eigen::Vector2d a = contour.point(i);
    const Eigen::Vector2d b = contour.point(i + 1);
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((y - a).dot(ab) / len2, 0.0, 1.0);
    const Eigen::Vector2d candidate = a + t * ab;
    const double dist2 = (y - candidate).squaredNorm();
    if (dist2 < best_dist2) {
      best_dist2 = dist2;
      best_segment = i;
      best_t = t;
      best_point = candidate;
    }
  }

  ContourErrorSample out;
  out.closest = best_point;
  out.segment = best_segment;
  out.arc_position = contour.arc_length(best_segment, best_t);

  const Eigen::Vector2d d = y - best_point;
  const double dist = d.norm();
  const double degenerate =
      1e-13 * std::max(1.0, std::max(y.norm(), best_point.norm()));
  if (dist > degenerate) {
    // Frame aligned with the perpendicular of the error vector, oriented
    // along the contour direction; coincides with the segment tangent for
    // interior projections and stays defined at corner hits.
    const Eigen::Vector2d t_ref = contour.segment_tangent(best_segment);
    Eigen::Vector2d p(d.y() / dist, -d.x() / dist);
    if (p.dot(t_ref) < 0.0) p = -p;
    out.frame_angle = std::atan2(p.y(), p.x());
    out.contour_error = std::copysign(dist, cross2(p, d));
  } else {
    out.frame_angle = contour.segment_angle(best_segment);
    out.contour_error = 0.0;
  }
  return out;
}

ContourErrorSample closest_point(const ReferenceContour& contour,
                                 const Eigen::Vector2d& y, int time_index) {
  ContourErrorSample out = closest_point(contour, y);
  const Eigen::Vector2d e = contour.point(time_index) - y;
  out.tangential_error = (error_frame(out.frame_angle) * e)(1);
  return out;
}

Eigen::Matrix<double, 3, 2> coupling_axes_linear(double theta) {
  Eigen::Matrix<double, 3, 2> c;
  c << 1.0, 0.0, 0.0, 1.0, std::cos(theta), -std::sin(theta);
  return c;
}

Eigen::Matrix2d coupling_rotation(double angle) {
  Eigen::Matrix2d c;
  c << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return c;
}

Eigen::Matrix2d error_frame(double tangent_angle) {
  // coupling_rotation(pi/2 - tangent_angle), written out directly.
  Eigen::Matrix2d c;
  c << std::sin(tangent_angle), -std::cos(tangent_angle),
      std::cos(tangent_angle), std::sin(tangent_angle);
  return c;
}

const char* to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::Identity: return "identity";
    case CouplingMode::AxesLinear: return "axes-linear";
    case CouplingMode::LinearRotation: return "linear-rotation";
    case CouplingMode::ExactRotation: return "exact-rotation";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd input_block_for(const Eigen::MatrixXd& error_block,
                                InputCoupling input_coupling, int input_dim) {
  if (input_coupling == InputCoupling::Identity)
    return Eigen::MatrixXd::Identity(input_dim, input_dim);
  if (error_block.cols() != input_dim)
    throw DimensionError(
        "input coupling 'same' requires the input width to match the output "
        "width");
  return error_block;
}

}  // namespace

CouplingSchedule reference_coupling_schedule(const ReferenceContour& contour,
                                             CouplingMode mode,
                                             InputCoupling input_coupling,
                                             int input_dim) {
  if (mode == CouplingMode::ExactRotation)
    throw ConfigError(
        "exact-rotation coupling depends on the iteration output; use "
        "exact_coupling_schedule");
  const int n = contour.sample_count();
  CouplingSchedule schedule;
  schedule.mode = mode;
  schedule.error_blocks.resize(n);
  schedule.input_blocks.resize(n);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd ce;
    switch (mode) {
      case CouplingMode::Identity:
        ce = Eigen::MatrixXd::Identity(2, 2);
        break;
      case CouplingMode::AxesLinear:
        // Third row is the first row of the error frame: the linear
        // contour-error approximation for the reference tangent.
        ce = coupling_axes_linear(M_PI_2 - contour.tangent_angle(k));
        break;
      case CouplingMode::LinearRotation:
        ce = error_frame(contour.tangent_angle(k));
        break;
      case CouplingMode::ExactRotation:
        break;  // handled above
    }
    schedule.error_blocks[k] = ce;
    schedule.input_blocks[k] = input_block_for(ce, input_coupling, input_dim);
  }
  return schedule;
}

namespace {

void fill_exact_sample(const ReferenceContour& contour, const Signal& y,
                       InputCoupling input_coupling, int k,
                       CouplingSchedule& schedule) {
  const ContourErrorSample cp = closest_point(contour, y.sample(k), k);
  const Eigen::MatrixXd ce = error_frame(cp.frame_angle);
  schedule.error_blocks[k] = ce;
  schedule.input_blocks[k] = input_block_for(ce, input_coupling, y.width());
}

void check_exact_inputs(const ReferenceContour& contour, const Signal& y) {
  if (y.width() != 2)
    throw DimensionError("exact coupling requires a 2-axis output signal");
  if (y.length() != contour.sample_count())
    throw DimensionError(
        "output signal length does not match the contour sample count");
}

}  // namespace

CouplingSchedule exact_coupling_schedule(const ReferenceContour& contour,
                                         const Signal& y,
                                         InputCoupling input_coupling) {
  check_exact_inputs(contour, y);
  const int n = y.length();
  CouplingSchedule schedule;
  schedule.mode = CouplingMode::ExactRotation;
  schedule.error_blocks.resize(n);
  schedule.input_blocks.resize(n);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k)
    fill_exact_sample(contour, y, input_coupling, k, schedule);
  return schedule;
}

CouplingSchedule exact_coupling_schedule_serial(const ReferenceContour& contour,
                                                const Signal& y,
                                                InputCoupling input_coupling) {
  check_exact_inputs(contour, y);
  const int n = y.length();
  CouplingSchedule schedule;
  schedule.mode = CouplingMode::ExactRotation;
  schedule.error_blocks.resize(n);
  schedule.input_blocks.resize(n);
  for (int k = 0; k < n; ++k)
    fill_exact_sample(contour, y, input_coupling, k, schedule);
  return schedule;
}

bool has_full_column_rank(const Eigen::MatrixXd& m, double tol_ratio) {
  if (m.rows() < m.cols()) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return true;
  return sv(sv.size() - 1) >= tol_ratio * sv(0) && sv(0) > 0.0;
}

}  // namespace ccilc
