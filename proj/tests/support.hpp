#ifndef ALLPASS_TESTS_SUPPORT_HPP
#define ALLPASS_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <random>
#include <vector>

#include "allpass/polymat.hpp"
#include "allpass/roots.hpp"

namespace allpass::testing {

// (1 - 3/4 z)(1 - 1/4 z) = 1 - z + (3/16) z^2, roots 4/3 and 4.
inline PolyMat ma2_example() {
  std::vector<Eigen::MatrixXcd> coeffs = {
      Eigen::MatrixXcd::Constant(1, 1, 1.0),
      Eigen::MatrixXcd::Constant(1, 1, -1.0),
      Eigen::MatrixXcd::Constant(1, 1, 3.0 / 16.0)};
  return PolyMat(std::move(coeffs));
}

// (I - Theta z) with Theta = [[4,-3],[5,4]]: one conjugate root pair
// 0.1290323 +- 0.1249349i inside the unit circle.
inline PolyMat general_pair_example() {
  Eigen::Matrix2d theta;
  theta << 4, -3, 5, 4;
  return PolyMat::from_gmr_form(theta, Eigen::Matrix2d::Identity());
}

struct RandomInstance {
  PolyMat poly;
  std::vector<RootGroup> groups;
};

/// Random real instance with all roots at least `margin` away from the unit
/// circle (relative modulus gap) and optionally at least one conjugate pair.
/// Coefficient decay keeps the determinantal roots away from the circle;
/// rejection sampling handles the rest.
inline RandomInstance random_instance(std::mt19937& rng, int n, int q,
                                      bool need_pair, double margin = 0.05) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<Eigen::MatrixXcd> coeffs(q + 1);
    Eigen::MatrixXd head = (0.25 * Eigen::MatrixXd::NullaryExpr(
                                       n, n, [&]() { return gauss(rng); }))
                               .eval();
    coeffs[0] = (Eigen::MatrixXd::Identity(n, n) + head).cast<Cplx>();
    double scale = 0.45;
    for (int j = 1; j <= q; ++j) {
      coeffs[j] = (scale * Eigen::MatrixXd::NullaryExpr(
                               n, n, [&]() { return gauss(rng); }))
                      .cast<Cplx>();
      scale *= 0.5;
    }
    try {
      PolyMat p(std::move(coeffs));
      std::vector<Cplx> roots = determinantal_roots(p);
      bool margin_ok = true;
      for (const Cplx& r : roots)
        if (std::abs(std::abs(r) - 1.0) < margin) margin_ok = false;
      if (!margin_ok) continue;
      std::vector<RootGroup> groups = group_roots(roots);
      if (need_pair) {
        bool has_pair = false;
        for (const auto& g : groups)
          if (g.kind == RootKind::complex_pair) has_pair = true;
        if (!has_pair) continue;
      }
      return RandomInstance{std::move(p), std::move(groups)};
    } catch (const Error&) {
      continue;
    }
  }
  throw std::runtime_error("random_instance: rejection sampling exhausted");
}

}  // namespace allpass::testing

#endif  // ALLPASS_TESTS_SUPPORT_HPP
