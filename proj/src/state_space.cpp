#include "ccilc/state_space.hpp"

#include <sstream>

#include "ccilc/errors.hpp"

namespace ccilc {

namespace {

void check_consistent(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                      int k) {
  const auto fail = [k](const char* name, const std::string& what) {
    std::ostringstream os;
    os << "state-space matrix " << name << "(" << k << "): " << what;
    throw DimensionError(os.str());
  };
  if (A.rows() != A.cols()) fail("A", "must be square");
  if (B.rows() != A.rows()) fail("B", "row count must match state dimension");
  if (C.cols() != A.rows()) fail("C", "column count must match state dimension");
  if (D.rows() != C.rows()) fail("D", "row count must match output dimension");
  if (D.cols() != B.cols()) fail("D", "column count must match input dimension");
}

}  // namespace

LtvStateSpace::LtvStateSpace(bool lti, int horizon,
                             std::vector<Eigen::MatrixXd> A,
                             std::vector<Eigen::MatrixXd> B,
                             std::vector<Eigen::MatrixXd> C,
                             std::vector<Eigen::MatrixXd> D)
    : lti_(lti),
      horizon_(horizon),
      A_(std::move(A)),
      B_(std::move(B)),
      C_(std::move(C)),
      D_(std::move(D)) {}

LtvStateSpace LtvStateSpace::lti(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                 Eigen::MatrixXd C, Eigen::MatrixXd D,
                                 int horizon) {
  if (horizon <= 0) throw DimensionError("system horizon must be positive");
  check_consistent(A, B, C, D, 0);
  return LtvStateSpace(true, horizon, {std::move(A)}, {std::move(B)},
                       {std::move(C)}, {std::move(D)});
}

LtvStateSpace LtvStateSpace::ltv(std::vector<Eigen::MatrixXd> A,
                                 std::vector<Eigen::MatrixXd> B,
                                 std::vector<Eigen::MatrixXd> C,
                                 std::vector<Eigen::MatrixXd> D) {
  const std::size_t n = A.size();
  if (n == 0) throw DimensionError("system horizon must be positive");
  if (B.size() != n || C.size() != n || D.size() != n)
    throw DimensionError("A, B, C, D sequences must all have the horizon length");
  for (std::size_t k = 0; k < n; ++k) {
    check_consistent(A[k], B[k], C[k], D[k], static_cast<int>(k));
    if (A[k].rows() != A[0].rows() || B[k].cols() != B[0].cols() ||
        C[k].rows() != C[0].rows()) {
      std::ostringstream os;
      os << "state-space dimensions change at sample " << k
         << "; state/input/output widths must be constant";
      throw DimensionError(os.str());
    }
  }
  return LtvStateSpace(false, static_cast<int>(n), std::move(A), std::move(B),
                       std::move(C), std::move(D));
}

Signal simulate(const LtvStateSpace& sys, const Signal& u,
                const Eigen::VectorXd& x0) {
  if (u.width() != sys.input_dim()) {
    std::ostringstream os;
    os << "input width " << u.width() << " does not match system input dimension "
       << sys.input_dim();
    throw DimensionError(os.str());
  }
  if (u.length() != sys.horizon()) {
    std::ostringstream os;
    os << "input length " << u.length() << " does not match system horizon "
       << sys.horizon();
    throw DimensionError(os.str());
  }
  Eigen::VectorXd x = x0.size() == 0 ? Eigen::VectorXd::Zero(sys.state_dim()) : x0;
  if (x.size() != sys.state_dim()) {
    std::ostringstream os;
    os << "initial state size " << x.size() << " does not match state dimension "
       << sys.state_dim();
    throw DimensionError(os.str());
  }

  const int N = sys.horizon();
  Signal y(sys.output_dim(), N);
  for (int k = 0; k < N; ++k) {
    y.values.col(k) = sys.C(k) * x + sys.D(k) * u.values.col(k);
    x = sys.A(k) * x + sys.B(k) * u.values.col(k);
  }
  return y;
}

FeedbackLoop closed_loop(const LtvStateSpace& plant,
                         const LtvStateSpace& controller) {
  if (controller.input_dim() != plant.output_dim() ||
      controller.output_dim() != plant.input_dim()) {
    throw DimensionError(
        "controller dimensions do not compose with the plant (controller maps "
        "plant outputs to plant inputs)");
  }
  if (plant.horizon() != controller.horizon()) {
    throw DimensionError("plant and controller horizons differ");
  }

  const int N = plant.horizon();
  const bool lti = plant.is_lti() && controller.is_lti();
  const int n_samples = lti ? 1 : N;

  const int nxp = plant.state_dim();
  const int nxc = controller.state_dim();
  const int ny = plant.output_dim();
  const int nu = plant.input_dim();
  const int nx = nxp + nxc;

  std::vector<Eigen::MatrixXd> Aj(n_samples), Bj(n_samples), Cj(n_samples),
      Dj(n_samples);
  std::vector<Eigen::MatrixXd> As(n_samples), Bs(n_samples), Cs(n_samples),
      Ds(n_samples);

  for (int k = 0; k < n_samples; ++k) {
    const auto& Ap = plant.A(k);
    const auto& Bp = plant.B(k);
    const auto& Cp = plant.C(k);
    const auto& Dp = plant.D(k);
    const auto& Ac = controller.A(k);
    const auto& Bc = controller.B(k);
    const auto& Cc = controller.C(k);
    const auto& Dc = controller.D(k);

    const Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(ny, ny) + Dp * Dc;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(loop);
    if (!lu.isInvertible()) {
      std::ostringstream os;
      os << "algebraic loop at sample " << k
         << ": I + D_plant * D_controller is singular";
      throw NumericError(os.str());
    }
    const Eigen::MatrixXd Minv = lu.inverse();

    // Output map shared by both closed-loop systems:
    //   y = Minv (Cp x_p + Dp Cc x_c + Dp f)        (feedforward input)
    //   e = Minv (y_d - Cp x_p - Dp Cc x_c)         (reference input)
    const Eigen::MatrixXd McP = Minv * Cp;
    const Eigen::MatrixXd MdPcC = Minv * Dp * Cc;

    Eigen::MatrixXd A(nx, nx);
    A.topLeftCorner(nxp, nxp) = Ap - Bp * Dc * McP;
    A.topRightCorner(nxp, nxc) = Bp * Cc - Bp * Dc * MdPcC;
    A.bottomLeftCorner(nxc, nxp) = -Bc * McP;
    A.bottomRightCorner(nxc, nxc) = Ac - Bc * MdPcC;

    Aj[k] = A;
    As[k] = A;

    Eigen::MatrixXd bj(nx, nu);
    bj.topRows(nxp) =
        Bp * (Eigen::MatrixXd::Identity(nu, nu) - Dc * Minv * Dp);
    bj.bottomRows(nxc) = -Bc * Minv * Dp;
    Bj[k] = bj;

    Eigen::MatrixXd cj(ny, nx);
    cj.leftCols(nxp) = McP;
    cj.rightCols(nxc) = MdPcC;
    Cj[k] = cj;
    Dj[k] = Minv * Dp;

    Eigen::MatrixXd bs(nx, ny);
    bs.topRows(nxp) = Bp * Dc * Minv;
    bs.bottomRows(nxc) = Bc * Minv;
    Bs[k] = bs;

    Eigen::MatrixXd cs(ny, nx);
    cs.leftCols(nxp) = -McP;
    cs.rightCols(nxc) = -MdPcC;
    Cs[k] = cs;
    Ds[k] = Minv;
  }

  if (lti) {
    return FeedbackLoop{
        LtvStateSpace::lti(Aj[0], Bj[0], Cj[0], Dj[0], N),
        LtvStateSpace::lti(As[0], Bs[0], Cs[0], Ds[0], N)};
  }
  return FeedbackLoop{
      LtvStateSpace::ltv(std::move(Aj), std::move(Bj), std::move(Cj),
                         std::move(Dj)),
      LtvStateSpace::ltv(std::move(As), std::move(Bs), std::move(Cs),
                         std::move(Ds))};
}

}  // namespace ccilc
