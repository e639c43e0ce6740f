#include "allpass/polymat.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace allpass {

namespace {

double sv_ratio(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double largest = svd.singularValues()(0);
  if (largest == 0.0) return 0.0;
  return svd.singularValues()(m.rows() - 1) / largest;
}

}  // namespace

Cplx ScalarPoly::eval(Cplx z) const {
  Cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ScalarPoly ScalarPoly::trimmed(double tol) const {
  double scale = 0.0;
  for (const Cplx& c : coeffs) scale = std::max(scale, std::abs(c));
  std::size_t keep = coeffs.size();
  while (keep > 1 && std::abs(coeffs[keep - 1]) <= tol * scale) --keep;
  return ScalarPoly{std::vector<Cplx>(coeffs.begin(), coeffs.begin() + keep)};
}

PolyMat::PolyMat(std::vector<Eigen::MatrixXcd> coeffs, bool allow_zero_leading,
                 const Tolerances& tol)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::bad_config, "PolyMat needs at least one coefficient slice");
  const auto rows = coeffs_[0].rows();
  if (rows == 0 || coeffs_[0].cols() != rows)
    throw Error(ErrorCode::bad_config, "PolyMat coefficients must be square and non-empty");
  for (const auto& m : coeffs_)
    if (m.rows() != rows || m.cols() != rows)
      throw Error(ErrorCode::bad_config, "PolyMat coefficient slices differ in shape");
  if (!allow_zero_leading && coeffs_.size() > 1 &&
      coeffs_.back().cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorCode::bad_config,
                "declared degree has an all-zero leading slice (pass allow_zero_leading to permit)");
  if (sv_ratio(coeffs_[0]) <= tol.rank)
    throw Error(ErrorCode::singular_theta0,
                "Theta(0) is singular beyond the condition threshold");
}

PolyMat PolyMat::identity(int n) {
  return PolyMat({Eigen::MatrixXcd::Identity(n, n)});
}

PolyMat PolyMat::from_gmr_form(const Eigen::MatrixXd& theta,
                               const Eigen::MatrixXd& c, const Tolerances& tol) {
  if (theta.rows() != theta.cols() || c.rows() != c.cols() ||
      theta.rows() != c.rows())
    throw Error(ErrorCode::bad_config, "Theta and C must be square and of equal size");
  if (sv_ratio(c.cast<Cplx>()) <= tol.rank)
    throw Error(ErrorCode::singular_c, "C is singular beyond the condition threshold");
  std::vector<Eigen::MatrixXcd> coeffs(2);
  coeffs[0] = c.cast<Cplx>();
  coeffs[1] = (-theta * c).cast<Cplx>();
  // Theta = 0 yields the constant polynomial C.
  if (coeffs[1].cwiseAbs().maxCoeff() == 0.0) coeffs.resize(1);
  return PolyMat(std::move(coeffs), false, tol);
}

Eigen::MatrixXcd PolyMat::eval(Cplx z) const {
  Eigen::MatrixXcd acc = coeffs_.back();
  for (int j = degree() - 1; j >= 0; --j) acc = acc * z + coeffs_[j];
  return acc;
}

Eigen::MatrixXcd PolyMat::spectral_density(double omega) const {
  Eigen::MatrixXcd m = eval(std::polar(1.0, omega));
  return m * m.adjoint();
}

double PolyMat::max_imag() const {
  double v = 0.0;
  for (const auto& m : coeffs_) v = std::max(v, m.imag().cwiseAbs().maxCoeff());
  return v;
}

double PolyMat::max_abs() const {
  double v = 0.0;
  for (const auto& m : coeffs_) v = std::max(v, m.cwiseAbs().maxCoeff());
  return v;
}

PolyMat PolyMat::real_part(double tol) const {
  if (max_imag() > tol) {
    std::ostringstream msg;
    msg << "imaginary residue " << max_imag() << " exceeds " << tol;
    throw Error(ErrorCode::residual_imag_too_large, msg.str());
  }
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(coeffs_.size());
  for (const auto& m : coeffs_) out.push_back(m.real().cast<Cplx>());
  return PolyMat(std::move(out), true);
}

PolyMat PolyMat::truncated(int new_degree, double tol) const {
  if (new_degree >= degree()) return *this;
  double scale = std::max(1.0, max_abs());
  for (int j = new_degree + 1; j <= degree(); ++j) {
    double leftover = coeffs_[j].cwiseAbs().maxCoeff();
    if (leftover > tol * scale) {
      std::ostringstream msg;
      msg << "dropping degree-" << j << " slice with magnitude " << leftover;
      throw Error(ErrorCode::not_divisible, msg.str());
    }
  }
  return PolyMat(std::vector<Eigen::MatrixXcd>(coeffs_.begin(),
                                               coeffs_.begin() + new_degree + 1),
                 true);
}

ScalarPoly det_poly(const PolyMat& p, const Tolerances& tol) {
  const int m = p.n() * p.degree() + 1;
  // Interpolation at the m-th roots of unity: the Vandermonde system is the
  // DFT matrix, so the solve is an inverse DFT with condition number one.
  std::vector<Cplx> nodes(m), values(m);
  for (int k = 0; k < m; ++k) {
    nodes[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
    values[k] = p.eval(nodes[k]).determinant();
  }
  std::vector<Cplx> coeffs(m);
  for (int j = 0; j < m; ++j) {
    Cplx acc = 0.0;
    for (int k = 0; k < m; ++k)
      acc += std::conj(std::pow(nodes[k], j)) * values[k];
    coeffs[j] = acc / static_cast<double>(m);
  }
  ScalarPoly det{std::move(coeffs)};
  // Residual check at the nodes; anything visible signals a breakdown.
  double scale = 0.0;
  for (const Cplx& v : values) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < m; ++k) {
    if (std::abs(det.eval(nodes[k]) - values[k]) > 1e-8 * std::max(1.0, scale))
      throw Error(ErrorCode::interpolation_ill_conditioned,
                  "determinant interpolation residual exceeds tolerance");
  }
  // Real input polynomials have real determinants; drop rounding dust so the
  // roots keep their conjugate symmetry.
  double max_im = 0.0, max_ab = 0.0;
  for (const Cplx& c : det.coeffs) {
    max_im = std::max(max_im, std::abs(c.imag()));
    max_ab = std::max(max_ab, std::abs(c));
  }
  if (max_im <= 1e-12 * std::max(1.0, max_ab))
    for (Cplx& c : det.coeffs) c = Cplx(c.real(), 0.0);
  (void)tol;
  return det.trimmed();
}

Deflation deflate_column(const PolyMat& p, int col, Cplx alpha,
                         const Tolerances& tol) {
  if (col < 0 || col >= p.n())
    throw Error(ErrorCode::bad_config, "deflate_column: column index out of range");
  const int q = p.degree();
  std::vector<Eigen::MatrixXcd> out = p.coeffs();
  double residual = 0.0;
  double scale = 0.0;
  for (int j = 0; j <= q; ++j)
    scale = std::max(scale, out[j].col(col).cwiseAbs().maxCoeff());
  std::vector<Cplx> quotient(std::max(q, 1));
  for (int i = 0; i < p.n(); ++i) {
    if (std::abs(alpha) <= 1.0) {
      // Top-down: b_{q-1} = c_q; b_{j-1} = c_j + alpha b_j. Stable while
      // multiplications by alpha do not grow.
      Cplx carry = out[q](i, col);
      for (int j = q - 1; j >= 0; --j) {
        quotient[j] = carry;
        carry = out[j](i, col) + alpha * carry;
      }
    } else {
      // Bottom-up for |alpha| > 1: b_0 = -c_0/alpha; b_j = (b_{j-1}-c_j)/alpha.
      // Each step divides by alpha, so rounding errors decay instead of
      // being amplified by |alpha|^q.
      Cplx carry = -out[0](i, col) / alpha;
      for (int j = 0; j < q; ++j) {
        quotient[j] = carry;
        if (j + 1 < q) carry = (carry - out[j + 1](i, col)) / alpha;
      }
    }
    // Residual as the reconstruction defect of (z - alpha) * quotient, the
    // same measure for both recurrences.
    for (int j = 0; j <= q; ++j) {
      Cplx rebuilt = (j > 0 ? quotient[j - 1] : Cplx(0.0)) -
                     (j < q ? alpha * quotient[j] : Cplx(0.0));
      residual = std::max(residual, std::abs(out[j](i, col) - rebuilt));
    }
    for (int j = 0; j < q; ++j) out[j](i, col) = quotient[j];
    out[q](i, col) = 0.0;
  }
  if (residual > tol.deflation * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "column " << col << " is not divisible by (z - alpha): remainder "
        << residual;
    throw Error(ErrorCode::not_divisible, msg.str());
  }
  return Deflation{PolyMat(std::move(out), true), residual};
}

PolyMat column_times_linear(const PolyMat& p, int col, Cplx c0, Cplx c1) {
  const int q = p.degree();
  if (c1 != Cplx(0.0) && p.coeff(q).col(col).cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::bad_config,
                "column_times_linear: top coefficient of the column must be zero");
  std::vector<Eigen::MatrixXcd> out = p.coeffs();
  for (int i = 0; i < p.n(); ++i) {
    for (int j = q; j >= 0; --j) {
      Cplx v = p.coeff(j)(i, col) * c0;
      if (j > 0) v += p.coeff(j - 1)(i, col) * c1;
      out[j](i, col) = v;
    }
  }
  return PolyMat(std::move(out), true);
}

PolyMat mul(const PolyMat& p, const PolyMat& q) {
  if (p.n() != q.n())
    throw Error(ErrorCode::bad_config, "mul: dimension mismatch");
  std::vector<Eigen::MatrixXcd> out(p.degree() + q.degree() + 1,
                                    Eigen::MatrixXcd::Zero(p.n(), p.n()));
  for (int i = 0; i <= p.degree(); ++i)
    for (int j = 0; j <= q.degree(); ++j) out[i + j] += p.coeff(i) * q.coeff(j);
  return PolyMat(std::move(out), true);
}

PolyMat mul_const(const PolyMat& p, const Eigen::MatrixXcd& m, Side side) {
  if (m.rows() != p.n() || m.cols() != p.n())
    throw Error(ErrorCode::bad_config, "mul_const: dimension mismatch");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(p.degree() + 1);
  for (const auto& c : p.coeffs())
    out.push_back(side == Side::left ? Eigen::MatrixXcd(m * c)
                                     : Eigen::MatrixXcd(c * m));
  return PolyMat(std::move(out), true);
}

nlohmann::json polymat_to_json(const PolyMat& p) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int j = 0; j <= p.degree(); ++j) {
    nlohmann::json slice = nlohmann::json::array();
    for (int r = 0; r < p.n(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < p.n(); ++c) {
        Cplx v = p.coeff(j)(r, c);
        nlohmann::json entry{{"re", v.real()}};
        if (v.imag() != 0.0) entry["im"] = v.imag();
        row.push_back(std::move(entry));
      }
      slice.push_back(std::move(row));
    }
    coeffs.push_back(std::move(slice));
  }
  return nlohmann::json{{"n", p.n()}, {"q", p.degree()}, {"coeffs", coeffs}};
}

PolyMat polymat_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int q = j.at("q").get<int>();
    if (n < 1 || q < 0)
      throw Error(ErrorCode::io_error, "polymat json: n must be >= 1 and q >= 0");
    const auto& coeffs = j.at("coeffs");
    if (static_cast<int>(coeffs.size()) != q + 1)
      throw Error(ErrorCode::io_error, "polymat json: coeffs must have q+1 slices");
    std::vector<Eigen::MatrixXcd> slices(q + 1, Eigen::MatrixXcd::Zero(n, n));
    for (int d = 0; d <= q; ++d) {
      const auto& slice = coeffs.at(d);
      if (static_cast<int>(slice.size()) != n)
        throw Error(ErrorCode::io_error, "polymat json: slice row count mismatch");
      for (int r = 0; r < n; ++r) {
        const auto& row = slice.at(r);
        if (static_cast<int>(row.size()) != n)
          throw Error(ErrorCode::io_error, "polymat json: slice column count mismatch");
        for (int c = 0; c < n; ++c) {
          const auto& e = row.at(c);
          slices[d](r, c) = Cplx(e.at("re").get<double>(),
                                 e.contains("im") ? e.at("im").get<double>() : 0.0);
        }
      }
    }
    // The file declares its degree; a zero leading slice is the caller's call.
    return PolyMat(std::move(slices), true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("polymat json: ") + e.what());
  }
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::singular_c: return "SingularC";
    case ErrorCode::singular_theta0: return "SingularTheta0";
    case ErrorCode::interpolation_ill_conditioned: return "InterpolationIllConditioned";
    case ErrorCode::not_divisible: return "NotDivisible";
    case ErrorCode::degenerate_determinant: return "DegenerateDeterminant";
    case ErrorCode::unit_circle_root: return "UnitCircleRoot";
    case ErrorCode::unpaired_complex_root: return "UnpairedComplexRoot";
    case ErrorCode::multiple_root: return "MultipleRoot";
    case ErrorCode::pole_hit: return "PoleHit";
    case ErrorCode::not_complex_pair: return "NotComplexPair";
    case ErrorCode::unstable: return "Unstable";
    case ErrorCode::degenerate_w: return "DegenerateW";
    case ErrorCode::rank_deficiency_mismatch: return "RankDeficiencyMismatch";
    case ErrorCode::not_a_root: return "NotARoot";
    case ErrorCode::residual_imag_too_large: return "ResidualImagTooLarge";
    case ErrorCode::degenerate_singular_values: return "DegenerateSingularValues";
    case ErrorCode::kernel_degenerate: return "KernelDegenerate";
    case ErrorCode::deflation_residual: return "DeflationResidual";
    case ErrorCode::span_unsolvable: return "SpanUnsolvable";
    case ErrorCode::root_relocation_ambiguous: return "RootRelocationAmbiguous";
    case ErrorCode::regime_explosion: return "RegimeExplosion";
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace allpass
