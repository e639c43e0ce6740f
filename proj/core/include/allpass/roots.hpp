#ifndef ALLPASS_ROOTS_HPP
#define ALLPASS_ROOTS_HPP

#include <vector>

#include "allpass/polymat.hpp"
#include "allpass/types.hpp"

namespace allpass {

enum class RootKind { real_root, complex_pair };
enum class CircleSide { inside, outside };

/// One mirrorable unit: a real determinantal root, or a complex-conjugate
/// pair represented by its member with positive imaginary part.
struct RootGroup {
  RootKind kind;
  Cplx alpha;  // for complex_pair the upper-half-plane member
  CircleSide location;

  int size() const { return kind == RootKind::complex_pair ? 2 : 1; }
  double modulus() const { return std::abs(alpha); }

  /// Members of the group: {alpha} or {alpha, conj(alpha)}.
  std::vector<Cplx> members() const;
  /// Group after mirroring: every member alpha -> 1/conj(alpha).
  RootGroup mirrored() const;
};

/// Roots of det Theta(z) via companion-matrix eigenvalues of the trimmed
/// determinant polynomial. Count equals the effective degree; unsorted.
/// Throws `degenerate_determinant` when det Theta(z) is numerically zero.
std::vector<Cplx> determinantal_roots(const PolyMat& p,
                                      const Tolerances& tol = {});

/// Classifies roots into real singletons and conjugate pairs, sorted by
/// (modulus, argument). Throws `unit_circle_root`, `multiple_root`,
/// `unpaired_complex_root`.
std::vector<RootGroup> group_roots(const std::vector<Cplx>& roots,
                                   const Tolerances& tol = {});

nlohmann::json root_group_to_json(const RootGroup& g);

}  // namespace allpass

#endif  // ALLPASS_ROOTS_HPP
