#include "allpass/blaschke.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <sstream>

namespace allpass {

namespace {

// [[Re m, Im m], [-Im m, Re m]]: real 2x2 image of complex multiplication.
// These matrices commute and act as multiplication by m on (1, i)^T.
Eigen::Matrix2d rot_scale(Cplx m) {
  Eigen::Matrix2d out;
  out << m.real(), m.imag(), -m.imag(), m.real();
  return out;
}

}  // namespace

Cplx ElementaryBlaschke::eval(Cplx z) const {
  if (std::abs(z - alpha) < 1e-12 * (1.0 + std::abs(alpha)))
    throw Error(ErrorCode::pole_hit, "elementary Blaschke factor evaluated at its pole");
  return (1.0 - std::conj(alpha) * z) / (-alpha + z);
}

Cplx SquaredBlaschke::eval_numerator(Cplx z) const {
  return 1.0 + z * (-2.0 * alpha_r + z * alpha_abs2);
}

Cplx SquaredBlaschke::eval_denominator(Cplx z) const {
  return alpha_abs2 + z * (-2.0 * alpha_r + z);
}

Cplx SquaredBlaschke::eval(Cplx z) const {
  Cplx den = eval_denominator(z);
  if (std::abs(den) < 1e-14 * (1.0 + alpha_abs2))
    throw Error(ErrorCode::pole_hit, "squared Blaschke factor evaluated at a pole");
  return eval_numerator(z) / den;
}

SquaredBlaschke squared_from_pair(Cplx alpha_plus, const Tolerances& tol) {
  if (alpha_plus.imag() <= tol.pairing)
    throw Error(ErrorCode::not_complex_pair,
                "squared Blaschke factor needs a genuinely complex upper-half-plane root");
  if (std::abs(std::abs(alpha_plus) - 1.0) <= tol.unit_circle)
    throw Error(ErrorCode::unit_circle_root, "pair sits on the unit circle");
  return SquaredBlaschke{alpha_plus.real(), std::norm(alpha_plus)};
}

Eigen::Matrix2cd StateSpace2x2::eval(Cplx z) const {
  Eigen::Matrix2cd resolvent =
      (Eigen::Matrix2cd::Identity() / z - A.cast<Cplx>()).inverse();
  return C.cast<Cplx>() * resolvent * B.cast<Cplx>() + D.cast<Cplx>();
}

Eigen::Matrix2d solve_discrete_lyapunov_2x2(const Eigen::Matrix2d& a,
                                            const Eigen::Matrix2d& q,
                                            double stability_margin) {
  Cplx tr_half(a.trace() / 2.0, 0.0);
  Cplx disc = tr_half * tr_half - Cplx(a.determinant(), 0.0);
  double rho = std::max(std::abs(tr_half + std::sqrt(disc)),
                        std::abs(tr_half - std::sqrt(disc)));
  if (rho >= 1.0 - stability_margin) {
    std::ostringstream msg;
    msg << "spectral radius " << rho << " is not inside the unit disc";
    throw Error(ErrorCode::unstable, msg.str());
  }
  const double a11 = a(0, 0), a12 = a(0, 1), a21 = a(1, 0), a22 = a(1, 1);
  Eigen::Matrix3d sys;
  sys << 1 - a11 * a11, -2 * a11 * a12, -a12 * a12,
      -a11 * a21, 1 - (a11 * a22 + a12 * a21), -a12 * a22,
      -a21 * a21, -2 * a21 * a22, 1 - a22 * a22;
  Eigen::Vector3d rhs(q(0, 0), 0.5 * (q(0, 1) + q(1, 0)), q(1, 1));
  Eigen::Vector3d sol = sys.partialPivLu().solve(rhs);
  Eigen::Matrix2d p;
  p << sol(0), sol(1), sol(1), sol(2);
  return p;
}

namespace {

// Orthonormal completion: columns 2..3 of the Q factor of a full QR span the
// orthogonal complement of the two orthonormal input columns.
Eigen::Matrix<double, 4, 2> complement(const Eigen::Matrix<double, 4, 2>& k) {
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, 2>> qr(k);
  Eigen::Matrix4d full = qr.householderQ();
  return full.rightCols<2>();
}

}  // namespace

BivariateBlaschke build_bivariate(Cplx alpha_plus, const Eigen::Vector2cd& w,
                                  const Tolerances& tol) {
  if (alpha_plus.imag() <= tol.pairing)
    throw Error(ErrorCode::not_complex_pair,
                "bivariate Blaschke factor needs an upper-half-plane pair member");
  if (std::abs(std::abs(alpha_plus) - 1.0) <= tol.unit_circle)
    throw Error(ErrorCode::unit_circle_root, "pair sits on the unit circle");

  Eigen::Matrix2d w_ri;
  w_ri << w(0).real(), w(0).imag(), w(1).real(), w(1).imag();
  double w_scale = w_ri.cwiseAbs().maxCoeff();
  if (w_scale == 0.0 || std::abs(w_ri.determinant()) <= tol.rank * w_scale * w_scale)
    throw Error(ErrorCode::degenerate_w,
                "Re(w) and Im(w) are linearly dependent; the root behaves as real, "
                "use the elementary path");

  StateSpace2x2 ss;
  if (std::abs(alpha_plus) > 1.0) {
    // Stable orientation: A has spectral radius 1/|alpha| < 1. The
    // column-space condition pins C = (Re w | Im w); the observability
    // Gramian from the Lyapunov solve balances the realization, and an
    // orthonormal completion supplies B and D.
    Eigen::Matrix2d a = rot_scale(1.0 / alpha_plus);
    Eigen::Matrix2d c = w_ri;
    Eigen::Matrix2d gram =
        solve_discrete_lyapunov_2x2(a.transpose(), c.transpose() * c);
    Eigen::LLT<Eigen::Matrix2d> llt(gram);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::degenerate_w, "observability Gramian is not positive definite");
    Eigen::Matrix2d s = llt.matrixL().transpose();  // gram = s' s
    Eigen::Matrix2d s_inv = s.inverse();
    Eigen::Matrix<double, 4, 2> k;
    k << s * a * s_inv, c * s_inv;
    Eigen::Matrix<double, 4, 2> completion = complement(k);
    ss.A = a;
    ss.B = s_inv * completion.topRows<2>();
    ss.C = c;
    ss.D = completion.bottomRows<2>();
  } else {
    // Inside pair: A would be expansive, so build the reflected filter
    // H(z) with poles at 1/conj(alpha) (stable) and return F(z) = H(1/z)'.
    // The transpose moves the column-space condition onto B of H.
    Eigen::Matrix2d a_h = rot_scale(std::conj(alpha_plus));
    Eigen::Matrix2d b_h = w_ri.transpose();
    Eigen::Matrix2d gram = solve_discrete_lyapunov_2x2(a_h, b_h * b_h.transpose());
    Eigen::LLT<Eigen::Matrix2d> llt(gram);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::degenerate_w, "controllability Gramian is not positive definite");
    Eigen::Matrix2d l = llt.matrixL();
    Eigen::Matrix2d l_inv = l.inverse();
    Eigen::Matrix2d a_bal = l_inv * a_h * l;
    Eigen::Matrix2d b_bal = l_inv * b_h;
    Eigen::Matrix<double, 4, 2> k;
    k << a_bal.transpose(), b_bal.transpose();
    Eigen::Matrix<double, 4, 2> completion = complement(k);
    Eigen::Matrix2d c_h = completion.topRows<2>().transpose() * l_inv;
    Eigen::Matrix2d d_h = completion.bottomRows<2>().transpose();
    Eigen::Matrix2d a_h_invt = a_h.inverse().transpose();
    ss.A = rot_scale(1.0 / alpha_plus);  // equals a_h^{-T}
    ss.B = c_h.transpose();
    ss.C = -b_h.transpose() * a_h_invt * a_h_invt;
    ss.D = d_h.transpose() - b_h.transpose() * a_h.inverse().transpose() * c_h.transpose();
  }

  // Normalize the free right orthogonal factor so that B2(1) = I.
  Eigen::Matrix2cd at_one = ss.eval(1.0);
  Eigen::Matrix2d at_one_real = at_one.real();
  if (at_one.imag().cwiseAbs().maxCoeff() > 1e-9 ||
      (at_one_real * at_one_real.transpose() - Eigen::Matrix2d::Identity())
              .cwiseAbs()
              .maxCoeff() > 1e-7)
    throw Error(ErrorCode::residual_imag_too_large,
                "realization failed the z = 1 orthogonality check");
  Eigen::Matrix2d norm = at_one_real.inverse();
  ss.B = ss.B * norm;
  ss.D = ss.D * norm;

  return BivariateBlaschke{ss, alpha_plus, w};
}

PolyFraction bivariate_to_polyfrac(const BivariateBlaschke& f) {
  const double abs2 = std::norm(f.alpha);
  const double ar = f.alpha.real();
  const StateSpace2x2& ss = f.realization;
  // b(z) = (|a|^2 - 2 a_r z + z^2) B2(z) expands in closed form through the
  // 2x2 adjugate of (z^{-1} I - A).
  Eigen::Matrix2d b0 = abs2 * ss.D;
  Eigen::Matrix2d b1 = abs2 * ss.C * ss.B - 2.0 * ar * ss.D;
  Eigen::Matrix2d b2 = -abs2 * ss.C * ss.A.transpose() * ss.B + ss.D;
  std::vector<Eigen::MatrixXcd> coeffs = {b0.cast<Cplx>(), b1.cast<Cplx>(),
                                          b2.cast<Cplx>()};
  return PolyFraction{PolyMat(std::move(coeffs), true),
                      SquaredBlaschke{ar, abs2}};
}

}  // namespace allpass
