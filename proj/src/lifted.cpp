#include "ccilc/lifted.hpp"

#include <algorithm>
#include <sstream>

#include "ccilc/errors.hpp"

namespace ccilc {

namespace {

void check_size_cap(const LtvStateSpace& sys, int size_cap) {
  const int side = sys.horizon() * std::max(sys.input_dim(), sys.output_dim());
  if (side > size_cap) {
    std::ostringstream os;
    os << "lifted matrix side " << side << " exceeds the size cap " << size_cap
       << "; use the recursive (lqt) solver for horizons this long";
    throw DimensionError(os.str());
  }
}

}  // namespace

LiftedSystem build_lifted(const LtvStateSpace& sys, int size_cap) {
  check_size_cap(sys, size_cap);
  const int N = sys.horizon();
  const int ni = sys.input_dim();
  const int no = sys.output_dim();

  LiftedSystem lifted;
  lifted.n_o = no;
  lifted.n_i = ni;
  lifted.horizon = N;
  lifted.matrix = Eigen::MatrixXd::Zero(N * no, N * ni);

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < N; ++j) {
    // Column block j: D(j) on the diagonal, then C(i) A(i-1) ... A(j+1) B(j)
    // carried forward one state propagation per row block.
    lifted.matrix.block(j * no, j * ni, no, ni) = sys.D(j);
    Eigen::MatrixXd v = sys.B(j);
    for (int i = j + 1; i < N; ++i) {
      lifted.matrix.block(i * no, j * ni, no, ni) = sys.C(i) * v;
      v = sys.A(i) * v;
    }
  }
  return lifted;
}

LiftedSystem build_lifted_reference(const LtvStateSpace& sys, int size_cap) {
  check_size_cap(sys, size_cap);
  const int N = sys.horizon();
  const int ni = sys.input_dim();
  const int no = sys.output_dim();

  LiftedSystem lifted;
  lifted.n_o = no;
  lifted.n_i = ni;
  lifted.horizon = N;
  lifted.matrix = Eigen::MatrixXd::Zero(N * no, N * ni);

  for (int j = 0; j < N; ++j) {
    for (int c = 0; c < ni; ++c) {
      Signal impulse(ni, N);
      impulse.values(c, j) = 1.0;
      const Signal response = simulate(sys, impulse);
      lifted.matrix.col(j * ni + c) = response.stacked();
    }
  }
  return lifted;
}

IlcFilters compute_filters(const LiftedSystem& J, const Eigen::MatrixXd& w_ec,
                           const Eigen::MatrixXd& w_fc,
                           const Eigen::MatrixXd& w_dfc, int iteration) {
  const Eigen::Index rows = J.matrix.rows();
  const Eigen::Index cols = J.matrix.cols();
  if (w_ec.rows() != rows || w_ec.cols() != rows)
    throw DimensionError("error weight must be square with side N*n_o");
  if (w_fc.rows() != cols || w_fc.cols() != cols ||
      w_dfc.rows() != cols || w_dfc.cols() != cols)
    throw DimensionError("input weights must be square with side N*n_i");

  const Eigen::MatrixXd JtW = J.matrix.transpose() * w_ec;
  const Eigen::MatrixXd M = JtW * J.matrix + w_fc + w_dfc;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (M + M.transpose()));
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (ldlt.info() != Eigen::Success || dmax <= 0.0 ||
      d.minCoeff() <= dmax * 1e-14) {
    throw NumericError(
        "filter normal matrix J'WecJ + Wfc + Wdfc is singular; contraction "
        "requires a nonsingular system or a positive definite input weight");
  }

  IlcFilters filters;
  filters.iteration = iteration;
  filters.Q = ldlt.solve(JtW * J.matrix + w_dfc);
  filters.L = ldlt.solve(JtW);
  return filters;
}

Signal ilc_update(const IlcFilters& filters, const Signal& f, const Signal& e) {
  const Eigen::VectorXd fs = f.stacked();
  const Eigen::VectorXd es = e.stacked();
  if (filters.Q.cols() != fs.size() || filters.L.cols() != es.size())
    throw DimensionError("signal lengths do not match the filter dimensions");
  return Signal::from_stacked(filters.Q * fs + filters.L * es, f.width());
}

double lifted_cost(const LiftedSystem& J, const Eigen::MatrixXd& w_ec,
                   const Eigen::MatrixXd& w_fc, const Eigen::MatrixXd& w_dfc,
                   const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                   const Eigen::VectorXd& f_next) {
  const Eigen::VectorXd df = f_next - f;
  const Eigen::VectorXd e_next = e - J.matrix * df;
  return e_next.dot(w_ec * e_next) + f_next.dot(w_fc * f_next) +
         df.dot(w_dfc * df);
}

}  // namespace ccilc
