#include "allpass/enumerate.hpp"

#include <cmath>
#include <sstream>

namespace allpass {

RegimeSet make_regime_set(std::vector<RootGroup> groups, std::uint64_t cap) {
  const std::size_t k = groups.size();
  if (k >= 63 || (std::uint64_t(1) << k) > cap) {
    std::ostringstream msg;
    msg << "2^" << k << " regimes exceed the cap of " << cap;
    throw Error(ErrorCode::regime_explosion, msg.str());
  }
  RegimeSet set;
  set.groups = std::move(groups);
  const std::uint64_t total = std::uint64_t(1) << k;
  set.configs.reserve(total);
  for (std::uint64_t row = 0; row < total; ++row) {
    MirrorConfig cfg;
    cfg.selections.resize(k);
    for (std::size_t j = 0; j < k; ++j)
      cfg.selections[j] = (row >> (k - 1 - j)) & 1u;  // lexicographic rows
    set.configs.push_back(std::move(cfg));
  }
  return set;
}

std::vector<Regime> enumerate_regimes(const PolyMat& p, MirrorMethod method,
                                      const Tolerances& tol, std::uint64_t cap,
                                      int grid) {
  RegimeSet set = make_regime_set(group_roots(determinantal_roots(p, tol), tol), cap);
  std::vector<Regime> out;
  out.reserve(set.configs.size());
  for (const MirrorConfig& cfg : set.configs) {
    PolyMat transformed = apply_config(p, set.groups, cfg, method, tol);
    VerificationReport report =
        verify_mirror(p, transformed, set.groups, cfg, grid, {}, tol);
    out.push_back(Regime{cfg, std::move(transformed), std::move(report)});
  }
  return out;
}

RegimeCount count_regimes(int n, int q, int n_pairs) {
  if (n < 1 || q < 0 || n_pairs < 0 || 2 * n_pairs > n * q)
    throw Error(ErrorCode::bad_config,
                "count_regimes needs n >= 1, q >= 0 and 2 n_pairs <= n q");
  const int raw_exp = n * q;
  const int grouped_exp = raw_exp - n_pairs;
  RegimeCount out;
  if (raw_exp >= 63) {
    out.overflow = true;
    out.raw = std::uint64_t(1) << 63;
    out.grouped = grouped_exp >= 63 ? out.raw : std::uint64_t(1) << grouped_exp;
    return out;
  }
  out.raw = std::uint64_t(1) << raw_exp;
  out.grouped = std::uint64_t(1) << grouped_exp;
  return out;
}

CostEstimate estimate_cost(std::uint64_t count, double secs_per_item) {
  CostEstimate est;
  est.seconds = static_cast<double>(count) * secs_per_item;
  std::ostringstream human;
  constexpr double year = 3600.0 * 24.0 * 365.0;
  if (est.seconds == 0.0) {
    human << "0 s";
  } else if (est.seconds < 3600.0) {
    human << est.seconds << " s";
  } else if (est.seconds < year) {
    human.precision(1);
    human << "≈" << std::fixed << est.seconds / 3600.0 << " hours";
  } else {
    human.precision(1);
    human << "≈" << std::fixed << est.seconds / year << " years";
  }
  est.human = human.str();
  return est;
}

}  // namespace allpass
