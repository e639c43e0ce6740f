#ifndef ALLPASS_POLYMAT_HPP
#define ALLPASS_POLYMAT_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "allpass/types.hpp"
#include "json.hpp"

namespace allpass {

/// Scalar polynomial with complex coefficients, ascending degree.
struct ScalarPoly {
  std::vector<Cplx> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Cplx eval(Cplx z) const;

  /// Drops leading coefficients below `tol` relative to the largest one.
  ScalarPoly trimmed(double tol = 1e-10) const;
};

/// Square matrix polynomial Theta(z) = Theta_0 + Theta_1 z + ... + Theta_q z^q
/// with dense complex coefficient slices. The degree is declared, not
/// inferred: mirroring transforms rely on a stable slice structure.
///
/// Theta_0 must be non-singular (condition threshold `tol.rank`); a zero
/// leading slice is rejected unless the caller explicitly permits it.
class PolyMat {
 public:
  explicit PolyMat(std::vector<Eigen::MatrixXcd> coeffs,
                   bool allow_zero_leading = false, const Tolerances& tol = {});

  static PolyMat identity(int n);

  /// Builds (I_n - Theta z) C, the VMA(1) parametrization with the static
  /// shock transmission matrix folded in. Throws `singular_c`.
  static PolyMat from_gmr_form(const Eigen::MatrixXd& theta,
                               const Eigen::MatrixXd& c,
                               const Tolerances& tol = {});

  int n() const { return static_cast<int>(coeffs_[0].rows()); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Eigen::MatrixXcd& coeff(int j) const { return coeffs_[j]; }
  const std::vector<Eigen::MatrixXcd>& coeffs() const { return coeffs_; }

  /// Horner evaluation of Theta(z).
  Eigen::MatrixXcd eval(Cplx z) const;

  /// Theta(e^{i omega}) Theta(e^{i omega})^*, Hermitian by construction.
  Eigen::MatrixXcd spectral_density(double omega) const;

  /// Largest |Im| over all coefficient entries.
  double max_imag() const;
  /// Largest |.| over all coefficient entries.
  double max_abs() const;
  bool is_real(double tol) const { return max_imag() <= tol; }

  /// Copy with imaginary parts removed. Throws `residual_imag_too_large`
  /// when something bigger than `tol` would be discarded.
  PolyMat real_part(double tol) const;

  /// Copy truncated to a smaller declared degree. Throws
  /// `residual_imag_too_large`-style check: dropped slices must be below
  /// `tol` relative to the coefficient scale.
  PolyMat truncated(int new_degree, double tol) const;

 private:
  std::vector<Eigen::MatrixXcd> coeffs_;
};

ScalarPoly det_poly(const PolyMat& p, const Tolerances& tol = {});

struct Deflation {
  PolyMat poly;     // column divided by (z - alpha), top slice zero-padded
  double residual;  // largest division remainder over the column entries
};

/// Synthetic division of one column by (z - alpha). Pre: every entry of the
/// column vanishes at alpha within tolerance; throws `not_divisible` when the
/// remainder says otherwise.
Deflation deflate_column(const PolyMat& p, int col, Cplx alpha,
                         const Tolerances& tol = {});

/// Multiplies one column by the linear factor (c0 + c1 z). The column's top
/// coefficient must be zero so the declared degree can absorb the shift.
PolyMat column_times_linear(const PolyMat& p, int col, Cplx c0, Cplx c1);

PolyMat mul(const PolyMat& p, const PolyMat& q);

enum class Side { left, right };
PolyMat mul_const(const PolyMat& p, const Eigen::MatrixXcd& m, Side side);

/// JSON wire format: {"n", "q", "coeffs": [[[{"re", "im"?}]]]}, degree-major,
/// then row-major. "im" may be omitted for real entries.
nlohmann::json polymat_to_json(const PolyMat& p);
PolyMat polymat_from_json(const nlohmann::json& j);

}  // namespace allpass

#endif  // ALLPASS_POLYMAT_HPP
