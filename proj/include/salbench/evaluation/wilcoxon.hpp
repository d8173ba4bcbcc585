#pragma once

#include <salbench/evaluation/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace salbench {

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample (midranks)
  double u = 0.0;          // Mann–Whitney U of the first sample
  double p_value = 1.0;    // two-sided
  bool exact = false;
};

namespace detail {

/// Two-sided permutation p-value for the sum of `m` pooled ranks. Ranks are
/// passed doubled so that midranks stay integral; `observed2` is the doubled
/// observed sum.
inline double exact_rank_sum_p(std::span<const std::int64_t> doubled_ranks, std::size_t m,
                               std::int64_t observed2) {
  const std::size_t total = doubled_ranks.size();
  // A size-m subset cannot exceed m times the largest doubled rank (2·total).
  const auto max_sum = static_cast<std::int64_t>(2 * m * total);
  // counts[j][s]: number of size-j subsets with doubled rank sum s.
  std::vector<std::vector<double>> counts(m + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  counts[0][0] = 1.0;
  for (std::size_t i = 0; i < total; ++i) {
    const auto r = static_cast<std::size_t>(doubled_ranks[i]);
    for (std::size_t j = std::min(m, i + 1); j >= 1; --j) {
      auto& dst = counts[j];
      const auto& src = counts[j - 1];
      for (std::size_t s = dst.size(); s-- > r;) dst[s] += src[s - r];
    }
  }
  const auto expected2 = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(total + 1);
  const std::int64_t obs_dev = std::abs(observed2 - expected2);
  double extreme = 0.0, all = 0.0;
  for (std::size_t s = 0; s < counts[m].size(); ++s) {
    const double c = counts[m][s];
    if (c == 0.0) continue;
    all += c;
    if (std::abs(static_cast<std::int64_t>(s) - expected2) >= obs_dev) extreme += c;
  }
  return std::min(1.0, extreme / all);
}

}  // namespace detail

/// Wilcoxon rank-sum (Mann–Whitney) test, two-sided. Exact permutation
/// distribution when the smaller sample has fewer than 10 values, otherwise a
/// normal approximation with tie-corrected variance and continuity correction.
inline RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("rank-sum test needs two non-empty samples");
  const std::size_t na = a.size(), nb = b.size(), total = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);

  RankSumResult res;
  for (std::size_t i = 0; i < na; ++i) res.statistic += ranks[i];
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(total);
  res.u = res.statistic - dna * (dna + 1.0) / 2.0;

  if (std::min(na, nb) < 10) {
    std::vector<std::int64_t> doubled(total);
    for (std::size_t i = 0; i < total; ++i) doubled[i] = std::llround(2.0 * ranks[i]);
    // Enumerate over the smaller sample; its deviation from the mean mirrors the other's.
    const bool first_small = na <= nb;
    const std::size_t m = first_small ? na : nb;
    std::int64_t observed2 = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if ((i < na) == first_small) observed2 += doubled[i];
    }
    res.p_value = detail::exact_rank_sum_p(doubled, m, observed2);
    res.exact = true;
    return res;
  }

  std::map<double, std::size_t> tie_counts;
  for (auto v : pooled) ++tie_counts[v];
  double tie_term = 0.0;
  for (const auto& [value, t] : tie_counts) {
    const double dt = static_cast<double>(t);
    tie_term += dt * dt * dt - dt;
  }
  const double variance = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(variance > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double mean_u = dna * dnb / 2.0;
  const double z = (std::abs(res.u - mean_u) - 0.5) / std::sqrt(variance);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

}  // namespace salbench
