#ifndef ALLPASS_ENUMERATE_HPP
#define ALLPASS_ENUMERATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "allpass/mirror.hpp"
#include "allpass/verify.hpp"

namespace allpass {

/// All 2^k mirror/keep selections over k root groups, in lexicographic
/// bitstring order (group 0 is the most significant position).
struct RegimeSet {
  std::vector<RootGroup> groups;
  std::vector<MirrorConfig> configs;
};

/// Throws `regime_explosion` when 2^k exceeds `cap`.
RegimeSet make_regime_set(std::vector<RootGroup> groups,
                          std::uint64_t cap = 1u << 16);

struct Regime {
  MirrorConfig config;
  PolyMat poly;
  VerificationReport report;
};

/// One transformed polynomial per fundamentalness regime, each certified
/// against the input. The all-keep config returns the input itself.
std::vector<Regime> enumerate_regimes(const PolyMat& p, MirrorMethod method,
                                      const Tolerances& tol = {},
                                      std::uint64_t cap = 1u << 16,
                                      int grid = 512);

struct RegimeCount {
  std::uint64_t raw = 0;      // 2^(n q)
  std::uint64_t grouped = 0;  // 2^(n q - n_pairs)
  bool overflow = false;      // counts saturated at 2^63
};

/// Throws `bad_config` when 2 n_pairs > n q.
RegimeCount count_regimes(int n, int q, int n_pairs);

struct CostEstimate {
  double seconds = 0;
  std::string human;  // "... s", "≈x.y hours" or "≈x.y years"

  double years() const { return seconds / (3600.0 * 24.0 * 365.0); }
};

CostEstimate estimate_cost(std::uint64_t count, double secs_per_item);

}  // namespace allpass

#endif  // ALLPASS_ENUMERATE_HPP
