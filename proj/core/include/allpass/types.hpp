#ifndef ALLPASS_TYPES_HPP
#define ALLPASS_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace allpass {

using Cplx = std::complex<double>;

enum class ErrorCode {
  singular_c,
  singular_theta0,
  interpolation_ill_conditioned,
  not_divisible,
  degenerate_determinant,
  unit_circle_root,
  unpaired_complex_root,
  multiple_root,
  pole_hit,
  not_complex_pair,
  unstable,
  degenerate_w,
  rank_deficiency_mismatch,
  not_a_root,
  residual_imag_too_large,
  degenerate_singular_values,
  kernel_degenerate,
  deflation_residual,
  span_unsolvable,
  root_relocation_ambiguous,
  regime_explosion,
  bad_config,
  io_error,
};

const char* error_code_name(ErrorCode code);

/// Domain error carrying a stable machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

/// Numerical thresholds used across the library. All of them are surfaced on
/// the CLI; the defaults are deliberate choices, not magic constants scattered
/// through the code.
struct Tolerances {
  double unit_circle = 1e-6;   // relative margin around |z| = 1
  double pairing = 1e-8;       // realness of a root / conjugate matching, absolute
  double multiplicity = 1e-7;  // minimal separation between distinct roots
  double rank = 1e-10;         // smallest/largest singular value ratio for "non-singular"
  double realness = 1e-8;      // residual imaginary part allowed on real outputs
  double deflation = 1e-6;     // synthetic-division remainder, relative to column scale
};

}  // namespace allpass

#endif  // ALLPASS_TYPES_HPP
