#ifndef ALLPASS_VERIFY_HPP
#define ALLPASS_VERIFY_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "allpass/mirror.hpp"
#include "allpass/polymat.hpp"
#include "allpass/roots.hpp"

namespace allpass {

struct RootDisplacement {
  Cplx expected;
  Cplx found;
  double distance;
};

struct ReportThresholds {
  double allpass = 1e-8;
  double spectral = 1e-8;
  double realness = 1e-8;
  double root = 1e-6;
};

/// Grid-based certificate for one transformation.
struct VerificationReport {
  int grid_points = 0;
  double max_allpass_defect = 0;
  double max_spectral_defect = 0;  // Frobenius norm of the density mismatch
  double max_imag = 0;
  std::vector<RootDisplacement> root_displacements;
  ReportThresholds thresholds;
  bool allpass_ok = false;
  bool spectral_ok = false;
  bool realness_ok = false;
  bool roots_ok = false;

  bool passed() const {
    return allpass_ok && spectral_ok && realness_ok && roots_ok;
  }
};

/// Pointwise spectral-density comparison on z_k = e^{2 pi i k / grid}.
/// dist_herm is the entrywise squared sum of the density difference (the
/// squared Frobenius norm), kept separately for regression against reference
/// listings; frobenius is its square root.
struct SpectralComparison {
  std::vector<double> dist_herm;
  double max_dist_herm = 0;
  double max_frobenius = 0;
};

SpectralComparison spectral_equivalence(const PolyMat& a, const PolyMat& b,
                                        int grid);

using MatrixFilter = std::function<Eigen::MatrixXcd(Cplx)>;

/// max over the grid of || V(z) V(z)^* - I ||_F on |z| = 1 (where V^*(1/z)
/// coincides with the conjugate transpose of V(z)).
double allpass_defect(const MatrixFilter& filter, int grid);

/// z -> a(z)^{-1} b(z); the all-pass quotient implied by a mirror transform.
MatrixFilter quotient_filter(const PolyMat& a, const PolyMat& b);

/// Matches each expected root (alpha or 1/conj(alpha), per config) of the
/// transformed polynomial to its nearest actual root.
std::vector<RootDisplacement> roots_mirrored(const PolyMat& original,
                                             const PolyMat& transformed,
                                             const std::vector<RootGroup>& groups,
                                             const MirrorConfig& config,
                                             const Tolerances& tol = {});

/// Full report for `transformed` against `original` under `config`.
VerificationReport verify_mirror(const PolyMat& original,
                                 const PolyMat& transformed,
                                 const std::vector<RootGroup>& groups,
                                 const MirrorConfig& config, int grid = 512,
                                 const ReportThresholds& thresholds = {},
                                 const Tolerances& tol = {});

nlohmann::json report_to_json(const VerificationReport& r);

}  // namespace allpass

#endif  // ALLPASS_VERIFY_HPP
