#include "gavel/qd/bandit.hpp"

#include <limits>
#include <vector>

#include "gavel/common/error.hpp"

namespace gavel::qd {

void BanditStats::record_pull(std::string_view arm) {
  auto it = arms.find(arm);
  if (it == arms.end()) it = arms.emplace(std::string(arm), ArmStats{}).first;
  it->second.pulls++;
  total_pulls++;
}

void BanditStats::record_success(std::string_view arm) {
  auto it = arms.find(arm);
  if (it == arms.end() || it->second.successes >= it->second.pulls)
    throw Error(Errc::InvalidParams, "success recorded without a matching pull");
  it->second.successes++;
}

double BanditStats::score(std::string_view arm) const {
  const auto it = arms.find(arm);
  if (it == arms.end() || it->second.pulls == 0) return std::numeric_limits<double>::infinity();
  const ArmStats& a = it->second;
  const double n = std::max(1, total_pulls);
  return static_cast<double>(a.successes) / a.pulls + c * std::sqrt(std::log(n) / a.pulls);
}

std::string arm_of(const gdl::ExpressionSite& site) { return site.head; }

std::string choose_arm(const BanditStats& bandit, std::span<const std::string> arms, Rng& rng) {
  if (arms.empty()) throw Error(Errc::NoSites, "no arms to choose from");
  std::vector<std::string> fresh;
  for (const auto& a : arms) {
    const auto it = bandit.arms.find(a);
    if (it == bandit.arms.end() || it->second.pulls == 0) fresh.push_back(a);
  }
  if (!fresh.empty()) return fresh[rng.below(fresh.size())];
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const double s = bandit.score(arms[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return arms[best];
}

std::size_t ucb_select(BanditStats& bandit, std::span<const gdl::ExpressionSite> sites, Rng& rng) {
  if (sites.empty()) throw Error(Errc::NoSites, "no mutable sites");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sites.size(); ++i) groups[arm_of(sites[i])].push_back(i);
  std::vector<std::string> names;
  for (const auto& [name, _] : groups) names.push_back(name);
  const std::string arm = choose_arm(bandit, names, rng);
  bandit.record_pull(arm);
  const auto& members = groups[arm];
  return members[rng.below(members.size())];
}

}  // namespace gavel::qd
