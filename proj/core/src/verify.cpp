#include "allpass/verify.hpp"

#include <cmath>
#include <numbers>

namespace allpass {

SpectralComparison spectral_equivalence(const PolyMat& a, const PolyMat& b,
                                        int grid) {
  if (a.n() != b.n())
    throw Error(ErrorCode::bad_config, "spectral_equivalence: dimension mismatch");
  SpectralComparison out;
  out.dist_herm.reserve(grid);
  for (int k = 0; k < grid; ++k) {
    double omega = 2.0 * std::numbers::pi * k / grid;
    Eigen::MatrixXcd diff = a.spectral_density(omega) - b.spectral_density(omega);
    // Entrywise squared sum: the squared Frobenius norm of the mismatch.
    double dist = diff.squaredNorm();
    out.dist_herm.push_back(dist);
    out.max_dist_herm = std::max(out.max_dist_herm, dist);
    out.max_frobenius = std::max(out.max_frobenius, std::sqrt(dist));
  }
  return out;
}

double allpass_defect(const MatrixFilter& filter, int grid) {
  double worst = 0.0;
  for (int k = 0; k < grid; ++k) {
    Cplx z = std::polar(1.0, 2.0 * std::numbers::pi * k / grid);
    Eigen::MatrixXcd v = filter(z);
    Eigen::MatrixXcd defect =
        v * v.adjoint() - Eigen::MatrixXcd::Identity(v.rows(), v.cols());
    worst = std::max(worst, defect.norm());
  }
  return worst;
}

MatrixFilter quotient_filter(const PolyMat& a, const PolyMat& b) {
  if (a.n() != b.n())
    throw Error(ErrorCode::bad_config, "quotient_filter: dimension mismatch");
  return [a, b](Cplx z) -> Eigen::MatrixXcd {
    return a.eval(z).partialPivLu().solve(b.eval(z));
  };
}

std::vector<RootDisplacement> roots_mirrored(const PolyMat& original,
                                             const PolyMat& transformed,
                                             const std::vector<RootGroup>& groups,
                                             const MirrorConfig& config,
                                             const Tolerances& tol) {
  (void)original;
  std::vector<Cplx> expected;
  for (const RootGroup& g : mirrored_groups(groups, config))
    for (const Cplx& m : g.members()) expected.push_back(m);
  std::vector<Cplx> found = determinantal_roots(transformed, tol);
  std::vector<RootDisplacement> out;
  out.reserve(expected.size());
  std::vector<bool> used(found.size(), false);
  for (const Cplx& e : expected) {
    int pick = -1;
    double best = -1.0;
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(found[j] - e);
      if (pick < 0 || d < best) {
        best = d;
        pick = static_cast<int>(j);
      }
    }
    if (pick < 0) {
      out.push_back({e, Cplx(0, 0), std::numeric_limits<double>::infinity()});
      continue;
    }
    used[pick] = true;
    out.push_back({e, found[pick], best});
  }
  return out;
}

VerificationReport verify_mirror(const PolyMat& original,
                                 const PolyMat& transformed,
                                 const std::vector<RootGroup>& groups,
                                 const MirrorConfig& config, int grid,
                                 const ReportThresholds& thresholds,
                                 const Tolerances& tol) {
  VerificationReport report;
  report.grid_points = grid;
  report.thresholds = thresholds;
  report.max_allpass_defect =
      allpass_defect(quotient_filter(original, transformed), grid);
  report.max_spectral_defect =
      spectral_equivalence(original, transformed, grid).max_frobenius;
  report.max_imag = transformed.max_imag();
  report.root_displacements =
      roots_mirrored(original, transformed, groups, config, tol);
  double worst_root = 0.0;
  for (const auto& d : report.root_displacements)
    worst_root = std::max(worst_root, d.distance);
  report.allpass_ok = report.max_allpass_defect < thresholds.allpass;
  report.spectral_ok = report.max_spectral_defect < thresholds.spectral;
  report.realness_ok = report.max_imag < thresholds.realness;
  report.roots_ok = worst_root < thresholds.root;
  return report;
}

nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json displacements = nlohmann::json::array();
  for (const auto& d : r.root_displacements)
    displacements.push_back(
        {{"expected", {{"re", d.expected.real()}, {"im", d.expected.imag()}}},
         {"found", {{"re", d.found.real()}, {"im", d.found.imag()}}},
         {"distance", d.distance}});
  return nlohmann::json{
      {"grid_points", r.grid_points},
      {"max_allpass_defect", r.max_allpass_defect},
      {"max_spectral_defect", r.max_spectral_defect},
      {"max_imag", r.max_imag},
      {"root_displacements", displacements},
      {"thresholds",
       {{"allpass", r.thresholds.allpass},
        {"spectral", r.thresholds.spectral},
        {"realness", r.thresholds.realness},
        {"root", r.thresholds.root}}},
      {"passed",
       {{"allpass", r.allpass_ok},
        {"spectral", r.spectral_ok},
        {"realness", r.realness_ok},
        {"roots", r.roots_ok},
        {"all", r.passed()}}}};
}

}  // namespace allpass
