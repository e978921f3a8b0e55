#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>

#include "gavel/common/rng.hpp"
#include "gavel/gdl/sites.hpp"

namespace gavel::qd {

struct ArmStats {
  int pulls = 0;
  int successes = 0;
};

/// UCB1 over mutation arms keyed by the leading keyword of the mutated
/// expression.
struct BanditStats {
  std::map<std::string, ArmStats, std::less<>> arms;
  int total_pulls = 0;
  double c = std::sqrt(2.0);

  void record_pull(std::string_view arm);
  void record_success(std::string_view arm);
  /// successes/pulls + c * sqrt(ln N / pulls); +inf for unpulled arms.
  double score(std::string_view arm) const;
};

/// Arm name for a site (its head keyword).
std::string arm_of(const gdl::ExpressionSite& site);

/// Picks among `arms`: a uniformly random unpulled arm if any, else the
/// highest UCB score (ties to the first in order). Does not record a pull.
std::string choose_arm(const BanditStats& bandit, std::span<const std::string> arms, Rng& rng);

/// Groups sites by arm, chooses an arm, records the pull and returns the index
/// of a uniformly chosen site within it. Throws Error(NoSites).
std::size_t ucb_select(BanditStats& bandit, std::span<const gdl::ExpressionSite> sites, Rng& rng);

}  // namespace gavel::qd
