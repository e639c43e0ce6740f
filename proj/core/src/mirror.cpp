#include "allpass/mirror.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace allpass {

MirrorConfig MirrorConfig::from_bitstring(std::string_view bits) {
  MirrorConfig cfg;
  cfg.selections.reserve(bits.size());
  for (char ch : bits) {
    if (ch != '0' && ch != '1')
      throw Error(ErrorCode::bad_config,
                  "config bitstring may only contain '0' and '1'");
    cfg.selections.push_back(ch == '1');
  }
  return cfg;
}

std::string MirrorConfig::to_bitstring() const {
  std::string out;
  out.reserve(selections.size());
  for (bool b : selections) out.push_back(b ? '1' : '0');
  return out;
}

std::vector<RootGroup> mirrored_groups(const std::vector<RootGroup>& groups,
                                       const MirrorConfig& config) {
  if (config.size() != groups.size())
    throw Error(ErrorCode::bad_config, "config length does not match group count");
  std::vector<RootGroup> out;
  out.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i)
    out.push_back(config.mirror(i) ? groups[i].mirrored() : groups[i]);
  return out;
}

namespace {

// Orient every column so its anchor entry (the last one, or the largest when
// the last is numerically zero) is real non-negative. Keeps SVD output
// deterministic across platforms.
void normalize_columns(Eigen::MatrixXcd& v) {
  for (int j = 0; j < v.cols(); ++j) {
    int anchor = static_cast<int>(v.rows()) - 1;
    if (std::abs(v(anchor, j)) < 1e-12) v.col(j).cwiseAbs().maxCoeff(&anchor);
    double mag = std::abs(v(anchor, j));
    if (mag > 0.0) v.col(j) /= v(anchor, j) / mag;
  }
}

Eigen::MatrixXcd eval_derivative(const PolyMat& p, Cplx z) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(p.n(), p.n());
  for (int j = p.degree(); j >= 1; --j)
    out = out * z + static_cast<double>(j) * p.coeff(j);
  return out;
}

// Newton refinement of a determinantal root at the rank-drop locus:
// with the smallest singular pair (u, v) of P(alpha), the scalar
// f(alpha) = u^* P(alpha) v vanishes at the root and f' = u^* P'(alpha) v.
// This recovers machine accuracy even where the scalar determinant is too
// ill-conditioned to place the root better than ~1e-7. Guarded so a point
// that is not a root at all stays where it is and fails the later checks.
Cplx refine_root(const PolyMat& p, Cplx alpha) {
  const int n = p.n();
  const Cplx start = alpha;
  const double radius = 1e-3 * (1.0 + std::abs(start));
  for (int iteration = 0; iteration < 4; ++iteration) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        p.eval(alpha), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXcd u = svd.matrixU().col(n - 1);
    Eigen::VectorXcd v = svd.matrixV().col(n - 1);
    Cplx value = (u.adjoint() * p.eval(alpha) * v)(0);
    Cplx slope = (u.adjoint() * eval_derivative(p, alpha) * v)(0);
    if (std::abs(slope) < 1e-290) break;
    Cplx step = value / slope;
    if (std::abs(alpha - step - start) > radius) return start;
    alpha -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(alpha))) break;
  }
  return alpha;
}

}  // namespace

SingleRootMirror mirror_step(const PolyMat& p, Cplx alpha, const Tolerances& tol) {
  const int n = p.n();
  alpha = refine_root(p, alpha);
  if (alpha.imag() != 0.0 && std::abs(alpha.imag()) <= 1e-14 * std::abs(alpha))
    alpha = Cplx(alpha.real(), 0.0);  // keep real roots exactly real
  Eigen::MatrixXcd at_alpha = p.eval(alpha);
  Eigen::MatrixXcd v;
  Eigen::VectorXd sv;
  if (alpha.imag() == 0.0 && p.is_real(0.0)) {
    // Real root of a real polynomial: stay in real arithmetic so the
    // rotation is orthogonal rather than merely unitary.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(at_alpha.real(), Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV().cast<Cplx>();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(at_alpha, Eigen::ComputeFullV);
    sv = svd.singularValues();
    v = svd.matrixV();
  }
  const double scale = std::max(sv(0), 1.0);
  if (sv(n - 1) > tol.deflation * scale) {
    std::ostringstream msg;
    msg << "Theta(alpha) is regular at alpha = " << alpha
        << " (smallest singular value " << sv(n - 1) << ")";
    throw Error(ErrorCode::not_a_root, msg.str());
  }
  // A genuine rank-2 drop puts the second singular value at the noise floor
  // next to the smallest one; a wide gap between them means the drop is
  // exactly one even when row scales are skewed.
  const double noise_floor =
      std::max(sv(n - 1), 1e-14 * std::max(sv(0), 1.0));
  if (n >= 2 && sv(n - 2) <= tol.deflation * scale &&
      sv(n - 2) <= 1e3 * noise_floor)
    throw Error(ErrorCode::rank_deficiency_mismatch,
                "rank deficiency at the root exceeds one");
  normalize_columns(v);
  PolyMat rotated = mul_const(p, v, Side::right);
  Deflation deflated = deflate_column(rotated, n - 1, alpha, tol);
  PolyMat out =
      column_times_linear(deflated.poly, n - 1, 1.0, -std::conj(alpha));
  return SingleRootMirror{std::move(out), std::move(v)};
}

SingleRootMirror mirror_real_root(const PolyMat& p, double alpha,
                                  const Tolerances& tol) {
  SingleRootMirror result = mirror_step(p, Cplx(alpha, 0.0), tol);
  if (p.is_real(tol.realness))
    result.poly = result.poly.real_part(tol.realness);
  return result;
}

PolyMat mirror_pair_svd(const PolyMat& p, const RootGroup& group,
                        const Tolerances& tol) {
  if (group.kind != RootKind::complex_pair)
    throw Error(ErrorCode::not_complex_pair, "mirror_pair_svd needs a complex pair");
  SingleRootMirror first = mirror_step(p, group.alpha, tol);
  SingleRootMirror second = mirror_step(first.poly, std::conj(group.alpha), tol);
  return second.poly;
}

PolyMat realize_via_polar(const PolyMat& p_tilde, const Tolerances& tol) {
  const int n = p_tilde.n();
  Eigen::MatrixXcd at_one = p_tilde.eval(1.0);
  Eigen::MatrixXcd herm = at_one * at_one.adjoint();
  // Theta(1) Theta(1)^* equals the original real product when p_tilde came
  // out of a pair mirror; its real symmetric eigenbasis is the W we need.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(herm.real());
  Eigen::VectorXd values = eig.eigenvalues().reverse();
  Eigen::MatrixXd w = eig.eigenvectors().rowwise().reverse();
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(values(i) - values(i + 1)) <=
        1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::degenerate_singular_values,
                  "Theta(1) has (near-)equal singular values; W is not unique");
  }
  if (values(n - 1) <= 0.0)
    throw Error(ErrorCode::degenerate_singular_values,
                "Theta(1) is numerically rank-deficient");
  Eigen::VectorXd s = values.cwiseSqrt();
  Eigen::MatrixXcd x =
      at_one.adjoint() * w.cast<Cplx>() * s.cwiseInverse().asDiagonal();
  PolyMat rotated =
      mul_const(p_tilde, x * w.transpose().cast<Cplx>(), Side::right);
  // The complex detour cancels out by subtraction, so the leftover dust
  // scales with the coefficients; judge it relative to them.
  const double realness_gate = tol.realness * std::max(1.0, rotated.max_abs());
  if (rotated.max_imag() > realness_gate) {
    std::ostringstream msg;
    msg << "polar step left imaginary residue " << rotated.max_imag();
    throw Error(ErrorCode::residual_imag_too_large, msg.str());
  }
  return rotated.real_part(realness_gate);
}

KernelQR kernel_qr(const PolyMat& p, Cplx alpha_plus, const Tolerances& tol) {
  const int n = p.n();
  if (n < 2)
    throw Error(ErrorCode::kernel_degenerate,
                "kernel QR needs at least two rows to separate Re(v) and Im(v)");
  Eigen::MatrixXcd at_alpha = p.eval(alpha_plus);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(at_alpha, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) > tol.deflation * std::max(sv(0), 1.0))
    throw Error(ErrorCode::not_a_root, "alpha_plus is not a root of det Theta(z)");
  Eigen::VectorXcd v = svd.matrixV().col(n - 1);
  int anchor;
  v.cwiseAbs().maxCoeff(&anchor);
  v /= v(anchor) / std::abs(v(anchor));

  Eigen::MatrixXd ri(n, 2);
  ri.col(0) = v.real();
  ri.col(1) = v.imag();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ri);
  Eigen::MatrixXd q_tilde = qr.householderQ();
  Eigen::Matrix2d r =
      qr.matrixQR().topRows<2>().triangularView<Eigen::Upper>();
  for (int j = 0; j < 2; ++j) {
    if (r(j, j) < 0) {
      r.row(j) *= -1.0;
      q_tilde.col(j) *= -1.0;
    }
  }
  if (std::abs(r(1, 1)) <= tol.rank * std::max(1.0, std::abs(r(0, 0))))
    throw Error(ErrorCode::kernel_degenerate,
                "kernel vector has linearly dependent real and imaginary parts");
  return KernelQR{ri.col(0), ri.col(1), std::move(q_tilde), r};
}

Eigen::Vector2cd KernelQR::w() const {
  return Eigen::Vector2cd(Cplx(r(0, 0), r(0, 1)), Cplx(0.0, r(1, 1)));
}

PolyMat mirror_pair_qr(const PolyMat& p, const RootGroup& group,
                       const Tolerances& tol) {
  if (group.kind != RootKind::complex_pair)
    throw Error(ErrorCode::not_complex_pair, "mirror_pair_qr needs a complex pair");
  const int n = p.n();
  const int q = p.degree();
  const Cplx alpha = refine_root(p, group.alpha);

  KernelQR kqr = kernel_qr(p, alpha, tol);
  BivariateBlaschke filter = build_bivariate(alpha, kqr.w(), tol);
  PolyFraction frac = bivariate_to_polyfrac(filter);

  // P Q~ diag(b(z), I): degree q + 2 on the first two columns, then both
  // columns divided by the squared-factor denominator (z - a+)(z - a-).
  PolyMat rotated = mul_const(p, kqr.q_tilde.cast<Cplx>(), Side::right);
  std::vector<Eigen::MatrixXcd> expanded(q + 3, Eigen::MatrixXcd::Zero(n, n));
  for (int j = 0; j <= q; ++j) {
    for (int d = 0; d <= 2; ++d)
      expanded[j + d].leftCols(2) +=
          rotated.coeff(j).leftCols(2) * frac.b.coeff(d).topLeftCorner(2, 2);
    if (n > 2) expanded[j].rightCols(n - 2) += rotated.coeff(j).rightCols(n - 2);
  }
  PolyMat g(std::move(expanded), true);

  try {
    for (int col = 0; col < 2; ++col) {
      g = deflate_column(g, col, alpha, tol).poly;
      g = deflate_column(g, col, std::conj(alpha), tol).poly;
    }
    g = g.truncated(q, tol.deflation);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_divisible)
      throw Error(ErrorCode::deflation_residual, e.what());
    throw;
  }

  if (g.max_imag() > 1e-10 * std::max(1.0, g.max_abs()))
    throw Error(ErrorCode::residual_imag_too_large,
                "pair mirror through the bivariate filter failed to stay real");
  return g.real_part(1e-10 * std::max(1.0, g.max_abs()));
}

Eigen::Matrix2cd unitary_from_params(const UnitaryParams& p) {
  const Cplx i(0.0, 1.0);
  Eigen::Matrix2cd u;
  u << std::exp(i * p.phi1) * std::cos(p.phi3),
      std::exp(i * p.phi2) * std::sin(p.phi3),
      -std::exp(-i * p.phi2) * std::sin(p.phi3),
      std::exp(-i * p.phi1) * std::cos(p.phi3);
  return std::exp(i * (p.phi0 / 2.0)) * u;
}

UnitaryParams params_from_unitary(const Eigen::Matrix2cd& u) {
  UnitaryParams p;
  p.phi0 = std::arg(u.determinant());
  Eigen::Matrix2cd su = std::exp(Cplx(0.0, -p.phi0 / 2.0)) * u;
  double c = std::abs(su(0, 0)), s = std::abs(su(0, 1));
  p.phi3 = std::atan2(s, c);
  p.phi1 = c > 1e-14 ? std::arg(su(0, 0)) : 0.0;
  p.phi2 = s > 1e-14 ? std::arg(su(0, 1)) : 0.0;
  return p;
}

Eigen::Matrix2cd UnitaryChain::eval(Cplx z) const {
  ElementaryBlaschke plus{alpha}, minus{std::conj(alpha)};
  Eigen::Matrix2cd d_plus = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd d_minus = Eigen::Matrix2cd::Identity();
  d_plus(0, 0) = plus.eval(z);
  d_minus(0, 0) = minus.eval(z);
  return unitary_from_params(v_beta) * d_plus * unitary_from_params(v_gamma) *
         d_minus * unitary_from_params(v_delta);
}

UnitaryChain solve_unitary_chain(const Eigen::Matrix2d& r, Cplx alpha_plus,
                                 const Tolerances& tol) {
  if (r(1, 1) <= tol.rank * std::max(1.0, std::abs(r(0, 0))) || r(0, 0) <= 0.0)
    throw Error(ErrorCode::span_unsolvable,
                "R is degenerate; no unitary chain through its span conditions");
  UnitaryChain chain;
  chain.alpha = alpha_plus;

  // V_beta: first column proportional to R (1, i)^T, angles in closed form.
  Eigen::Vector2cd t(Cplx(r(0, 0), r(0, 1)), Cplx(0.0, r(1, 1)));
  chain.v_beta.phi3 = std::atan2(std::abs(t(1)), std::abs(t(0)));
  Cplx phase_t = t(0) / std::abs(t(0));
  Cplx second = t(1) / phase_t;
  chain.v_beta.phi2 = -std::arg(-second / std::abs(second));

  // V_gamma: first column of diag(B(a-, a+), 1) V_gamma proportional to
  // V_beta^* R (1, -i)^T; solved numerically from the same extraction.
  ElementaryBlaschke plus{alpha_plus};
  Eigen::Vector2cd t_minus(Cplx(r(0, 0), -r(0, 1)), Cplx(0.0, -r(1, 1)));
  Eigen::Vector2cd y =
      unitary_from_params(chain.v_beta).adjoint() * t_minus;
  Eigen::Vector2cd u(y(0) / plus.eval(std::conj(alpha_plus)), y(1));
  chain.v_gamma.phi3 = std::atan2(std::abs(u(1)), std::abs(u(0)));
  if (std::abs(u(0)) > 1e-14 && std::abs(u(1)) > 1e-14) {
    Cplx phase_u = u(0) / std::abs(u(0));
    Cplx second_u = u(1) / phase_u;
    chain.v_gamma.phi2 = -std::arg(-second_u / std::abs(second_u));
  }

  // V_delta: makes the chain equal the identity at z = 1.
  ElementaryBlaschke minus{std::conj(alpha_plus)};
  Eigen::Matrix2cd d_plus = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd d_minus = Eigen::Matrix2cd::Identity();
  d_plus(0, 0) = plus.eval(1.0);
  d_minus(0, 0) = minus.eval(1.0);
  Eigen::Matrix2cd head = unitary_from_params(chain.v_beta) * d_plus *
                          unitary_from_params(chain.v_gamma) * d_minus;
  chain.v_delta = params_from_unitary(head.adjoint());

  // The construction promises real values on the real axis; check it here
  // rather than trusting the algebra.
  for (double z : {-2.0, -1.0, -0.5, 0.5, 2.0}) {
    double residue = chain.eval(Cplx(z, 0.0)).imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9)
      throw Error(ErrorCode::residual_imag_too_large,
                  "unitary chain is not real on the real axis");
  }
  return chain;
}

namespace {

Cplx relocate_root(const std::vector<Cplx>& current, Cplx target,
                   const Tolerances& tol) {
  double best = -1.0, second_best = -1.0;
  Cplx pick;
  for (const Cplx& r : current) {
    double d = std::abs(r - target);
    if (best < 0 || d < best) {
      second_best = best;
      best = d;
      pick = r;
    } else if (second_best < 0 || d < second_best) {
      second_best = d;
    }
  }
  if (best < 0)
    throw Error(ErrorCode::not_a_root, "no roots available for relocation");
  if (second_best >= 0 && second_best - best <= tol.multiplicity)
    throw Error(ErrorCode::root_relocation_ambiguous,
                "nearest-root relocation is not unique within tolerance");
  return pick;
}

}  // namespace

PolyMat apply_config(const PolyMat& p, const std::vector<RootGroup>& groups,
                     const MirrorConfig& config, MirrorMethod method,
                     const Tolerances& tol) {
  if (config.size() != groups.size())
    throw Error(ErrorCode::bad_config, "config length does not match group count");
  PolyMat work = p;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!config.mirror(i)) continue;
    std::vector<Cplx> current = determinantal_roots(work, tol);
    Cplx located = relocate_root(current, groups[i].alpha, tol);
    if (groups[i].kind == RootKind::real_root) {
      if (std::abs(located.imag()) > tol.pairing)
        throw Error(ErrorCode::root_relocation_ambiguous,
                    "relocated real root acquired an imaginary part");
      work = mirror_real_root(work, located.real(), tol).poly;
    } else {
      RootGroup relocated = groups[i];
      relocated.alpha = located.imag() > 0 ? located : std::conj(located);
      if (method == MirrorMethod::qr && p.n() >= 2) {
        work = mirror_pair_qr(work, relocated, tol);
      } else {
        // Scalar polynomials have no kernel-QR path; the two elementary
        // factors of the pair already combine to a real polynomial.
        work = realize_via_polar(mirror_pair_svd(work, relocated, tol), tol);
      }
    }
  }
  if (p.is_real(tol.realness) &&
      work.max_imag() > tol.realness * std::max(1.0, work.max_abs()))
    throw Error(ErrorCode::residual_imag_too_large,
                "mirrored polynomial failed the realness check");
  return work;
}

}  // namespace allpass
