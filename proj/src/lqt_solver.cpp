#include "ccilc/lqt_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ccilc/errors.hpp"

namespace ccilc {

namespace {

[[noreturn]] void fail_at(const char* what, int k) {
  std::ostringstream os;
  os << what << " at sample " << k;
  throw NumericError(os.str());
}

double eigen_condition(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

Signal lqt_update(const LtvStateSpace& sys, const AssembledWeights& aw,
                  const Signal& e, const Signal& f,
                  SweepDiagnostics* diagnostics) {
  const int N = sys.horizon();
  const int nx = sys.state_dim();
  const int ni = sys.input_dim();
  const int no = sys.output_dim();

  if (aw.horizon() != N)
    throw DimensionError("assembled weights do not cover the system horizon");
  if (aw.error_dim() != no || aw.input_dim() != ni)
    throw DimensionError("assembled weight block sizes do not match the system");
  if (e.width() != no || e.length() != N)
    throw DimensionError("error signal does not match the system dimensions");
  if (f.width() != ni || f.length() != N)
    throw DimensionError("input signal does not match the system dimensions");

  for (int k = 0; k < N; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(aw.w_dfc[k]);
    if (llt.info() != Eigen::Success)
      fail_at("input-change weight is not positive definite", k);
  }

  SweepDiagnostics diag;
  diag.horizon = N;
  diag.degenerate_state = nx == 0;

  // Stage pieces of the tracking problem. The augmented output stacks the
  // predicted error change -(C dx + D du) over the input change du, so the
  // products below carry the error blocks through C and D and the input
  // blocks through the identity.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> rbar_llt(N);
  std::vector<Eigen::MatrixXd> pbar(N);     // ni x nx, uses P(k+1)
  std::vector<Eigen::VectorXd> target(N);   // Dbar' S r(k)
  std::vector<Eigen::VectorXd> adjoint(N);  // v(k+1)

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nx);

  for (int k = N - 1; k >= 0; --k) {
    const Eigen::MatrixXd& A = sys.A(k);
    const Eigen::MatrixXd& B = sys.B(k);
    const Eigen::MatrixXd& C = sys.C(k);
    const Eigen::MatrixXd& D = sys.D(k);
    const Eigen::MatrixXd& wec = aw.w_ec[k];
    const Eigen::MatrixXd& wfc = aw.w_fc[k];

    const Eigen::MatrixXd DtWec = D.transpose() * wec;
    const Eigen::MatrixXd rbar =
        aw.w_dfc[k] + DtWec * D + wfc + B.transpose() * P * B;
    rbar_llt[k].compute(0.5 * (rbar + rbar.transpose()));
    if (rbar_llt[k].info() != Eigen::Success)
      fail_at("stage gain matrix is singular (input-change weight must be "
              "positive definite)", k);
    if (diagnostics != nullptr) {
      diag.max_stage_gain_condition = std::max(
          diag.max_stage_gain_condition, eigen_condition(rbar));
    }

    pbar[k] = B.transpose() * P * A + DtWec * C;
    target[k] = DtWec * e.values.col(k) - wfc * f.values.col(k);
    adjoint[k] = v;

    const Eigen::MatrixXd pnew = A.transpose() * P * A +
                                 C.transpose() * wec * C -
                                 pbar[k].transpose() * rbar_llt[k].solve(pbar[k]);
    const Eigen::VectorXd s = target[k] + B.transpose() * v;
    v = C.transpose() * (wec * e.values.col(k)) + A.transpose() * v -
        pbar[k].transpose() * rbar_llt[k].solve(s);

    if (nx > 0) {
      const double asym = (pnew - pnew.transpose()).cwiseAbs().maxCoeff();
      diag.max_riccati_asymmetry = std::max(diag.max_riccati_asymmetry, asym);
    }
    P = 0.5 * (pnew + pnew.transpose());
    if (!P.allFinite() || !v.allFinite())
      fail_at("non-finite values in the backward sweep", k);
  }

  Signal f_next(ni, N);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(nx);
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd du = rbar_llt[k].solve(
        -pbar[k] * dx + target[k] + sys.B(k).transpose() * adjoint[k]);
    if (!du.allFinite()) fail_at("non-finite input update", k);
    f_next.values.col(k) = f.values.col(k) + du;
    dx = sys.A(k) * dx + sys.B(k) * du;
  }

  if (diagnostics != nullptr) {
    diag.peak_memory_bytes =
        static_cast<std::size_t>(N) *
        (static_cast<std::size_t>(ni) * ni + static_cast<std::size_t>(ni) * nx +
         ni + 2 * static_cast<std::size_t>(nx)) *
        sizeof(double);
    *diagnostics = diag;
  }
  return f_next;
}

}  // namespace ccilc
