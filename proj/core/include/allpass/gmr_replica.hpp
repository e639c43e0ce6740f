#ifndef ALLPASS_GMR_REPLICA_HPP
#define ALLPASS_GMR_REPLICA_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "allpass/types.hpp"
#include "json.hpp"

namespace allpass {

// Behavioral port of the three Blaschke routines shipped with GMR's
// replication package (build.othonormal.basis, compute.other.basic.form,
// compute.all.forms), bugs included: squared vector length without
// conjugation, exact-zero comparisons, per-member flips of conjugate pairs,
// first-index tie breaking. Console prints and R errors become typed
// outcomes so the failures are testable.

enum class ReplicaStatus { ok, zero_norm_failure, downstream_dimension_error };

const char* replica_status_name(ReplicaStatus s);

struct ReplicaOutcome {
  ReplicaStatus status = ReplicaStatus::ok;
  std::optional<Eigen::MatrixXcd> theta;
  std::optional<Eigen::MatrixXcd> c;
  std::string message;
};

/// R's eigen() for the replica: dgeev for real-typed input, zgeev otherwise.
/// The LAPACK path matters: the reference implementation's exact-zero check
/// fires or not depending on these exact rounding patterns.
struct ReplicaEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};
ReplicaEigen replica_eigen(const Eigen::MatrixXcd& m, bool real_typed);

/// Port of build.othonormal.basis: "normalises" by sqrt of the plain sum of
/// squares and orthogonalizes against it with bilinear projections. Returns
/// nothing when sum(vec^2) == 0 exactly (the printed "z should not be 0").
std::optional<Eigen::MatrixXcd> gmr_orthonormal_basis(
    const Eigen::VectorXcd& vec);

/// Port of compute.other.basic.form. w entries != 1 select the zeros to be
/// flipped, one at a time, each member of a conjugate pair on its own.
ReplicaOutcome gmr_other_basic_form(const Eigen::MatrixXd& theta,
                                    const Eigen::MatrixXd& c,
                                    const std::vector<int>& w);

struct ReplicaForms {
  std::vector<std::vector<int>> combi;  // 2^n rows of the flip table
  std::vector<ReplicaOutcome> outcomes;
};

/// Port of compute.all.forms, including the scalar n = 1 shortcut.
ReplicaForms gmr_all_forms(const Eigen::MatrixXd& theta,
                           const Eigen::MatrixXd& c);

enum class DiagnoseCase {
  purely_complex,   // [[0,-b],[b,0]]: zero-norm failure
  skew_symmetric,   // [[a,-b],[b,a]]: exact-zero check pathology
  general_complex,  // [[a,-b],[b+c,a]]: finite but not observationally equivalent
  discard_imag,     // regime flip when imaginary parts are dropped
};

DiagnoseCase diagnose_case_from_name(const std::string& name);
const char* diagnose_case_name(DiagnoseCase c);

struct DiagnoseCheck {
  std::string name;
  double observed = 0;
  double expected = 0;
  double rel_tol = 0;
  bool pass = false;
};

/// End-to-end run of one reference scenario: the replica outcome, numeric
/// checks against the documented values, and the correct mirror pipeline on
/// the same input for contrast. Mismatches are reported, never thrown.
struct DiagnoseReport {
  DiagnoseCase which;
  ReplicaStatus status = ReplicaStatus::ok;
  std::vector<DiagnoseCheck> checks;
  std::string contrast;  // what the correct pipeline does on this input

  bool all_match() const;
};

DiagnoseReport diagnose(DiagnoseCase which);

nlohmann::json diagnose_report_to_json(const DiagnoseReport& r);

}  // namespace allpass

#endif  // ALLPASS_GMR_REPLICA_HPP
