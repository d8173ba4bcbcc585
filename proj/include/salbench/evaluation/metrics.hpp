#pragma once

#include <salbench/saliency_map.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace salbench {

/// Human-derived ground truth for one shape.
struct GroundTruth {
  std::string shape_id;
  std::vector<double> field;                             // smoothed selection frequency per vertex
  std::vector<std::vector<std::uint32_t>> participants;  // selected vertices per participant

  /// Union of every participant's selections, sorted and unique.
  std::vector<std::uint32_t> fixations() const {
    std::vector<std::uint32_t> out;
    for (const auto& p : participants) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct MetricScores {
  std::string shape_id;
  ModelTag model = ModelTag::GS;
  double auc = 0.5;
  double nss = 0.0;
  double lcc = 0.0;
};

/// 1-based ranks with ties given their average (mid) rank.
inline std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Area under the ROC curve with the fixation vertices as positives and every
/// other point as a negative. Ties count one half (Mann–Whitney U / (P·N)).
inline double roc_auc(std::span<const double> values, std::span<const std::uint32_t> fixations) {
  const std::size_t n = values.size();
  std::vector<char> positive(n, 0);
  std::size_t p = 0;
  for (auto f : fixations) {
    if (f >= n) throw DataError("fixation index " + std::to_string(f) + " out of range");
    if (!positive[f]) {
      positive[f] = 1;
      ++p;
    }
  }
  if (p == 0 || p == n) throw Error("degenerate positive set");
  const auto ranks = midranks(values);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (positive[i]) rank_sum += ranks[i];
  }
  const double pp = static_cast<double>(p);
  const double nn = static_cast<double>(n - p);
  return (rank_sum - pp * (pp + 1.0) / 2.0) / (pp * nn);
}

/// Normalised scanpath saliency: the map is z-scored (population standard
/// deviation), each participant scores the mean at their selected vertices,
/// and the result is the mean over participants. A constant map scores 0.
inline double nss(std::span<const double> values, std::span<const std::vector<std::uint32_t>> participants,
                  Warnings* warnings = nullptr) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (auto v : values) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(n, 1));
  double var = 0.0;
  for (auto v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(std::max<std::size_t>(n, 1));
  double sd = std::sqrt(var);
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) sd = 0.0;

  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < participants.size(); ++p) {
    std::vector<std::uint32_t> sel(participants[p].begin(), participants[p].end());
    std::sort(sel.begin(), sel.end());
    sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
    if (sel.empty()) {
      warn(warnings, "participant " + std::to_string(p) + " has no selection; skipped in NSS");
      continue;
    }
    double s = 0.0;
    for (auto v : sel) {
      if (v >= n) throw DataError("selected vertex " + std::to_string(v) + " out of range");
      s += sd > 0.0 ? (values[v] - mean) / sd : 0.0;
    }
    total += s / static_cast<double>(sel.size());
    ++used;
  }
  if (used == 0) throw Error("NSS needs at least one participant with a selection");
  return total / static_cast<double>(used);
}

/// |Pearson correlation|; 0 when either input is constant.
inline double lcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("LCC inputs differ in length");
  if (x.size() < 2) throw Error("LCC needs at least 2 values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  auto flat = [n](double ss, double mean) { return !(std::sqrt(ss / n) > 1e-12 * std::max(1.0, std::abs(mean))); };
  if (flat(sxx, mx) || flat(syy, my)) return 0.0;
  return std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
}

}  // namespace salbench
