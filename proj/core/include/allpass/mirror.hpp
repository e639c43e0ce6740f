#ifndef ALLPASS_MIRROR_HPP
#define ALLPASS_MIRROR_HPP

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "allpass/blaschke.hpp"
#include "allpass/polymat.hpp"
#include "allpass/roots.hpp"
#include "allpass/types.hpp"

namespace allpass {

/// Per-group mirror/keep selection. Pairs are selected atomically: one flag
/// per group, never per member.
struct MirrorConfig {
  std::vector<bool> selections;

  static MirrorConfig from_bitstring(std::string_view bits);
  std::string to_bitstring() const;
  std::size_t size() const { return selections.size(); }
  bool mirror(std::size_t i) const { return selections[i]; }
};

/// Groups after applying a config: selected groups mirrored, order preserved.
std::vector<RootGroup> mirrored_groups(const std::vector<RootGroup>& groups,
                                       const MirrorConfig& config);

enum class MirrorMethod { svd, qr };

/// QR data of the kernel vector v = v_r + i v_i of Theta(alpha_plus):
/// (v_r | v_i) = q_tilde (r; 0), r upper triangular with positive diagonal.
struct KernelQR {
  Eigen::VectorXd v_r, v_i;
  Eigen::MatrixXd q_tilde;  // n x n orthogonal
  Eigen::Matrix2d r;

  /// w = r (1, i)^T, the kernel coordinate vector in the Q basis.
  Eigen::Vector2cd w() const;
};

/// Throws `kernel_degenerate` when v_r, v_i are linearly dependent.
KernelQR kernel_qr(const PolyMat& p, Cplx alpha_plus, const Tolerances& tol = {});

/// Four-angle parametrization of a 2x2 unitary matrix.
struct UnitaryParams {
  double phi0 = 0, phi1 = 0, phi2 = 0, phi3 = 0;
};

/// e^{i phi0/2} [[e^{i phi1} cos phi3, e^{i phi2} sin phi3],
///               [-e^{-i phi2} sin phi3, e^{-i phi1} cos phi3]]
Eigen::Matrix2cd unitary_from_params(const UnitaryParams& p);
UnitaryParams params_from_unitary(const Eigen::Matrix2cd& u);

struct SingleRootMirror {
  PolyMat poly;       // P V diag(I, B(z, alpha)) expanded
  Eigen::MatrixXcd v;  // right singular vectors of P(alpha), phase-normalized
};

/// One SVD + elementary-Blaschke step at an arbitrary root alpha. This is the
/// building block shared by the real-root and pair pipelines; applied to one
/// member of a conjugate pair it deliberately produces complex coefficients.
SingleRootMirror mirror_step(const PolyMat& p, Cplx alpha,
                             const Tolerances& tol = {});

/// Mirrors a real root; real input gives real output.
/// Throws `not_a_root` / `rank_deficiency_mismatch`.
SingleRootMirror mirror_real_root(const PolyMat& p, double alpha,
                                  const Tolerances& tol = {});

/// Mirrors both members of a conjugate pair through two SVD steps. The result
/// preserves the spectral density but is in general complex-valued; follow
/// with realize_via_polar.
PolyMat mirror_pair_svd(const PolyMat& p, const RootGroup& group,
                        const Tolerances& tol = {});

/// Restores realness after mirror_pair_svd: right-multiplies the unitary
/// polar factor X W' of Theta(1), computed from the real symmetric
/// eigenproblem of Theta(1) Theta(1)^*. Throws `degenerate_singular_values`
/// when the singular values of Theta(1) coincide and
/// `residual_imag_too_large` when the result fails to come out real.
PolyMat realize_via_polar(const PolyMat& p_tilde, const Tolerances& tol = {});

/// Real-throughout pair mirroring: kernel QR, bivariate Blaschke, and exact
/// two-step column deflation by the squared-factor denominator.
/// Throws `kernel_degenerate` / `deflation_residual`.
PolyMat mirror_pair_qr(const PolyMat& p, const RootGroup& group,
                       const Tolerances& tol = {});

/// The three-unitary chain V_beta diag(B(z,a+),1) V_gamma diag(B(z,a-),1)
/// V_delta equivalent to the bivariate filter; real at real z.
struct UnitaryChain {
  UnitaryParams v_beta, v_gamma, v_delta;
  Cplx alpha;

  Eigen::Matrix2cd eval(Cplx z) const;
};

/// beta solved in closed form from the span condition on r (1, i)^T, gamma
/// numerically from the span condition on r (1, -i)^T, delta from the z = 1
/// normalization. Throws `span_unsolvable` for degenerate r.
UnitaryChain solve_unitary_chain(const Eigen::Matrix2d& r, Cplx alpha_plus,
                                 const Tolerances& tol = {});

/// Applies a mirror/keep selection group by group, re-locating each group's
/// current root by nearest-root matching after earlier transforms.
/// Throws `root_relocation_ambiguous` when that matching is not unique.
PolyMat apply_config(const PolyMat& p, const std::vector<RootGroup>& groups,
                     const MirrorConfig& config, MirrorMethod method,
                     const Tolerances& tol = {});

}  // namespace allpass

#endif  // ALLPASS_MIRROR_HPP
