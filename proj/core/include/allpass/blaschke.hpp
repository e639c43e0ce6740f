#ifndef ALLPASS_BLASCHKE_HPP
#define ALLPASS_BLASCHKE_HPP

#include <Eigen/Dense>
#include <array>

#include "allpass/polymat.hpp"
#include "allpass/types.hpp"

namespace allpass {

/// Scalar all-pass factor B(z, alpha) = (1 - conj(alpha) z) / (-alpha + z),
/// which swaps a zero at alpha for one at 1/conj(alpha).
struct ElementaryBlaschke {
  Cplx alpha;

  /// Throws `pole_hit` when z is numerically at the pole alpha.
  Cplx eval(Cplx z) const;
};

/// Product of the two elementary factors of a conjugate pair. Both
/// coefficient arrays are real:
///   numerator   1 - 2 alpha_r z + |alpha|^2 z^2
///   denominator |alpha|^2 - 2 alpha_r z + z^2
struct SquaredBlaschke {
  double alpha_r;
  double alpha_abs2;

  std::array<double, 3> numerator() const {
    return {1.0, -2.0 * alpha_r, alpha_abs2};
  }
  std::array<double, 3> denominator() const {
    return {alpha_abs2, -2.0 * alpha_r, 1.0};
  }
  Cplx eval_numerator(Cplx z) const;
  Cplx eval_denominator(Cplx z) const;
  Cplx eval(Cplx z) const;  // throws pole_hit at the pair itself
};

/// Throws `not_complex_pair` unless Im(alpha_plus) > tol.pairing.
SquaredBlaschke squared_from_pair(Cplx alpha_plus, const Tolerances& tol = {});

/// Real 2x2 realization  B2(z) = C (z^{-1} I - A)^{-1} B + D  with the poles
/// pinned at the conjugate pair: A = [[lr, li], [-li, lr]], l = 1/alpha_plus.
struct StateSpace2x2 {
  Eigen::Matrix2d A, B, C, D;

  Eigen::Matrix2cd eval(Cplx z) const;
};

/// Solves P = A P A' + Q for symmetric P through the vectorized 3x3 system.
/// Throws `unstable` when the spectral radius of A reaches 1.
Eigen::Matrix2d solve_discrete_lyapunov_2x2(const Eigen::Matrix2d& a,
                                            const Eigen::Matrix2d& q,
                                            double stability_margin = 1e-9);

/// Real bivariate all-pass filter for a conjugate pair, with the column space
/// of its polynomial part at alpha_plus spanned by w.
struct BivariateBlaschke {
  StateSpace2x2 realization;
  Cplx alpha;          // upper-half-plane pair member
  Eigen::Vector2cd w;  // target column space at alpha

  Eigen::Matrix2cd eval(Cplx z) const { return realization.eval(z); }
};

/// State-space construction: poles fixed by A, the column-space condition
/// pins C (resp. B for the inside orientation), and B, D come from a Lyapunov
/// solve plus an orthonormal completion of the balanced realization. The
/// result is normalized so that B2(1) = I.
/// Throws `degenerate_w` when Re(w), Im(w) are linearly dependent and
/// `not_complex_pair` / `unit_circle_root` for invalid pairs.
BivariateBlaschke build_bivariate(Cplx alpha_plus, const Eigen::Vector2cd& w,
                                  const Tolerances& tol = {});

/// B2(z) = a^{-1}(z) b(z): b is the real degree-2 polynomial part
/// b(z) = (|alpha|^2 - 2 alpha_r z + z^2) B2(z), and a is the squared
/// Blaschke factor whose denominator carries that quadratic.
struct PolyFraction {
  PolyMat b;
  SquaredBlaschke a;
};

PolyFraction bivariate_to_polyfrac(const BivariateBlaschke& f);

}  // namespace allpass

#endif  // ALLPASS_BLASCHKE_HPP
