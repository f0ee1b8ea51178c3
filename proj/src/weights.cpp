#include "ccilc/weights.hpp"

#include <algorithm>
#include <sstream>

#include "ccilc/errors.hpp"

namespace ccilc {

DefinitenessFlags analyze_definiteness(const Eigen::MatrixXd& w) {
  DefinitenessFlags flags;
  if (w.rows() == 0) {
    flags.positive_definite = true;
    flags.positive_semidefinite = true;
    return flags;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w,
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  flags.positive_semidefinite = lo >= -1e-12 * hi;
  flags.positive_definite = lo > 0.0 && lo >= 1e-12 * hi;
  return flags;
}

namespace {

void check_symmetric(const Eigen::MatrixXd& w, const char* where) {
  if (w.rows() != w.cols())
    throw DimensionError(std::string(where) + ": weight block must be square");
  const double gap = (w - w.transpose()).cwiseAbs().maxCoeff();
  if (gap > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << where << ": weight block is not symmetric (max asymmetry " << gap
       << ")";
    throw DimensionError(os.str());
  }
}

void merge_flags(DefinitenessFlags& into, const DefinitenessFlags& other) {
  into.positive_definite = into.positive_definite && other.positive_definite;
  into.positive_semidefinite =
      into.positive_semidefinite && other.positive_semidefinite;
}

}  // namespace

TimeVaryingBlocks::TimeVaryingBlocks(Eigen::MatrixXd default_block,
                                     std::vector<Segment> segments)
    : default_block_(std::move(default_block)), segments_(std::move(segments)) {
  check_symmetric(default_block_, "default weight block");
  flags_ = analyze_definiteness(default_block_);
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (s.start < 0 || s.end <= s.start) {
      std::ostringstream os;
      os << "weight segment " << i << ": invalid range [" << s.start << ", "
         << s.end << ")";
      throw ConfigError(os.str());
    }
    if (i > 0 && s.start < segments_[i - 1].end) {
      std::ostringstream os;
      os << "weight segment " << i << " overlaps the previous segment";
      throw ConfigError(os.str());
    }
    check_symmetric(s.value, "segment weight block");
    if (s.value.rows() != default_block_.rows())
      throw DimensionError("segment weight block size differs from the default");
    merge_flags(flags_, analyze_definiteness(s.value));
  }
}

const Eigen::MatrixXd& TimeVaryingBlocks::at(int k) const {
  for (const Segment& s : segments_) {
    if (k < s.start) break;
    if (k < s.end) return s.value;
  }
  return default_block_;
}

WeightSchedule WeightSchedule::fixed(IterationWeights weights) {
  WeightSchedule schedule;
  schedule.fixed_ = true;
  schedule.table_.push_back(std::move(weights));
  return schedule;
}

WeightSchedule WeightSchedule::per_iteration(
    std::vector<IterationWeights> table) {
  if (table.empty())
    throw ConfigError("per-iteration weight table may not be empty");
  WeightSchedule schedule;
  schedule.fixed_ = false;
  schedule.table_ = std::move(table);
  return schedule;
}

const IterationWeights& WeightSchedule::at(int iteration) const {
  if (fixed_) return table_[0];
  if (iteration < 0 || iteration >= static_cast<int>(table_.size())) {
    std::ostringstream os;
    os << "iteration " << iteration << " outside the per-iteration weight table"
       << " (size " << table_.size() << ")";
    throw ConfigError(os.str());
  }
  return table_[iteration];
}

WeightSchedule demo_weight_schedule() {
  Eigen::Matrix2d we;
  we << 1.5, 0.0, 0.0, 0.5;
  Eigen::Matrix2d wf;
  wf << 1e-10, 0.0, 0.0, 1e-9;
  const Eigen::Matrix2d wdf = 1e-10 * Eigen::Matrix2d::Identity();
  return WeightSchedule::fixed(IterationWeights{
      TimeVaryingBlocks::constant(we), TimeVaryingBlocks::constant(wf),
      TimeVaryingBlocks::constant(wdf)});
}

Eigen::MatrixXd AssembledWeights::dense_error() const {
  const int n = error_dim();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(horizon() * n, horizon() * n);
  for (int k = 0; k < horizon(); ++k)
    dense.block(k * n, k * n, n, n) = w_ec[k];
  return dense;
}

Eigen::MatrixXd AssembledWeights::dense_input() const {
  const int n = input_dim();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(horizon() * n, horizon() * n);
  for (int k = 0; k < horizon(); ++k)
    dense.block(k * n, k * n, n, n) = w_fc[k];
  return dense;
}

Eigen::MatrixXd AssembledWeights::dense_input_change() const {
  const int n = input_dim();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(horizon() * n, horizon() * n);
  for (int k = 0; k < horizon(); ++k)
    dense.block(k * n, k * n, n, n) = w_dfc[k];
  return dense;
}

AssembledWeights assemble(const CouplingSchedule& coupling,
                          const WeightSchedule& weights, int iteration) {
  const IterationWeights& w = weights.at(iteration);
  const int n = coupling.size();
  if (n == 0) throw DimensionError("coupling schedule is empty");
  if (w.error_weight.dim() != coupling.coupled_error_dim()) {
    std::ostringstream os;
    os << "error weight dimension " << w.error_weight.dim()
       << " does not match the coupled error dimension "
       << coupling.coupled_error_dim();
    throw DimensionError(os.str());
  }
  if (w.input_weight.dim() != coupling.coupled_input_dim() ||
      w.input_change_weight.dim() != coupling.coupled_input_dim()) {
    std::ostringstream os;
    os << "input weight dimensions must match the coupled input dimension "
       << coupling.coupled_input_dim();
    throw DimensionError(os.str());
  }

  AssembledWeights aw;
  aw.w_ec.resize(n);
  aw.w_fc.resize(n);
  aw.w_dfc.resize(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd& ce = coupling.error_blocks[k];
    const Eigen::MatrixXd& cf = coupling.input_blocks[k];
    const Eigen::MatrixXd ec = ce.transpose() * w.error_weight.at(k) * ce;
    const Eigen::MatrixXd fc = cf.transpose() * w.input_weight.at(k) * cf;
    const Eigen::MatrixXd dfc =
        cf.transpose() * w.input_change_weight.at(k) * cf;
    aw.w_ec[k] = 0.5 * (ec + ec.transpose());
    aw.w_fc[k] = 0.5 * (fc + fc.transpose());
    aw.w_dfc[k] = 0.5 * (dfc + dfc.transpose());
  }
  return aw;
}

}  // namespace ccilc
