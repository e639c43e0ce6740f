#include "allpass/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace allpass {

std::vector<Cplx> RootGroup::members() const {
  if (kind == RootKind::complex_pair) return {alpha, std::conj(alpha)};
  return {alpha};
}

RootGroup RootGroup::mirrored() const {
  RootGroup out = *this;
  out.alpha = 1.0 / std::conj(alpha);
  out.location = location == CircleSide::inside ? CircleSide::outside
                                                : CircleSide::inside;
  return out;
}

std::vector<Cplx> determinantal_roots(const PolyMat& p, const Tolerances& tol) {
  ScalarPoly det = det_poly(p, tol);
  double scale = 0.0;
  for (const Cplx& c : det.coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0)
    throw Error(ErrorCode::degenerate_determinant,
                "det Theta(z) is numerically the zero polynomial");
  const int d = det.degree();
  if (d == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -det.coeffs[i] / det.coeffs[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Cplx> roots(d);
  for (int i = 0; i < d; ++i) roots[i] = solver.eigenvalues()(i);
  return roots;
}

namespace {

// Minimal-cost perfect matching between upper and lower half-plane roots,
// brute force; used as fallback when greedy conjugate matching fails.
bool optimal_pairing(const std::vector<Cplx>& upper,
                     const std::vector<Cplx>& lower, double tol,
                     std::vector<int>& match) {
  const int k = static_cast<int>(upper.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  std::vector<int> best_perm;
  do {
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
      worst = std::max(worst, std::abs(upper[i] - std::conj(lower[perm[i]])));
    if (best < 0 || worst < best) {
      best = worst;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best < 0 || best > tol) return false;
  match = best_perm;
  return true;
}

}  // namespace

std::vector<RootGroup> group_roots(const std::vector<Cplx>& roots,
                                   const Tolerances& tol) {
  for (const Cplx& r : roots) {
    if (std::abs(std::abs(r) - 1.0) <= tol.unit_circle) {
      std::ostringstream msg;
      msg << "root " << r << " lies on the unit circle within tolerance";
      throw Error(ErrorCode::unit_circle_root, msg.str());
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      // Conjugate partners may sit close to each other near the real axis;
      // that is a pair, not a multiple root.
      bool conjugates = std::abs(roots[i] - std::conj(roots[j])) <= tol.pairing &&
                        std::abs(roots[i].imag()) > tol.pairing;
      if (!conjugates && std::abs(roots[i] - roots[j]) <= tol.multiplicity) {
        std::ostringstream msg;
        msg << "roots " << roots[i] << " and " << roots[j]
            << " coincide within the multiplicity tolerance";
        throw Error(ErrorCode::multiple_root, msg.str());
      }
    }

  std::vector<RootGroup> groups;
  std::vector<Cplx> upper, lower;
  for (const Cplx& r : roots) {
    if (std::abs(r.imag()) <= tol.pairing) {
      groups.push_back({RootKind::real_root, Cplx(r.real(), 0.0),
                        std::abs(r) < 1.0 ? CircleSide::inside
                                          : CircleSide::outside});
    } else if (r.imag() > 0) {
      upper.push_back(r);
    } else {
      lower.push_back(r);
    }
  }

  if (upper.size() != lower.size())
    throw Error(ErrorCode::unpaired_complex_root,
                "complex roots do not split evenly across the real axis");

  // Greedy nearest-conjugate matching; well separated pairs are the generic
  // case. Fall back to the optimal assignment for small clusters.
  std::vector<bool> used(lower.size(), false);
  std::vector<int> match(upper.size(), -1);
  bool greedy_ok = true;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    double best = -1.0;
    int pick = -1;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(upper[i] - std::conj(lower[j]));
      if (pick < 0 || d < best) {
        best = d;
        pick = static_cast<int>(j);
      }
    }
    if (pick < 0 || best > tol.pairing) {
      greedy_ok = false;
      break;
    }
    used[pick] = true;
    match[i] = pick;
  }
  if (!greedy_ok) {
    if (upper.size() > 6 || !optimal_pairing(upper, lower, tol.pairing, match))
      throw Error(ErrorCode::unpaired_complex_root,
                  "failed to match complex roots into conjugate pairs");
  }
  for (std::size_t i = 0; i < upper.size(); ++i) {
    (void)match[i];  // pairing validated; the group stores the upper member
    groups.push_back({RootKind::complex_pair, upper[i],
                      std::abs(upper[i]) < 1.0 ? CircleSide::inside
                                               : CircleSide::outside});
  }

  std::sort(groups.begin(), groups.end(), [](const RootGroup& a, const RootGroup& b) {
    double ma = a.modulus(), mb = b.modulus();
    if (ma != mb) return ma < mb;
    return std::arg(a.alpha) < std::arg(b.alpha);
  });
  return groups;
}

nlohmann::json root_group_to_json(const RootGroup& g) {
  return nlohmann::json{
      {"kind", g.kind == RootKind::complex_pair ? "complex_pair" : "real"},
      {"alpha", {{"re", g.alpha.real()}, {"im", g.alpha.imag()}}},
      {"modulus", g.modulus()},
      {"location", g.location == CircleSide::inside ? "inside" : "outside"}};
}

}  // namespace allpass
