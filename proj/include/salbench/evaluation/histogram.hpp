#pragma once

#include <salbench/saliency_map.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace salbench {

/// Cumulative distribution over [0,1] at bin resolution: cdf[b] is the mass
/// at or below the upper edge of bin b. Between edges it is linear.
struct ReferenceCdf {
  std::vector<double> cdf;

  std::size_t bins() const { return cdf.size(); }

  /// Piecewise-linear CDF value at x in [0,1].
  double at(double x) const {
    const auto nb = static_cast<double>(cdf.size());
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double pos = x * nb;
    const auto b = std::min(static_cast<std::size_t>(pos), cdf.size() - 1);
    const double lo = b == 0 ? 0.0 : cdf[b - 1];
    return lo + (cdf[b] - lo) * (pos - static_cast<double>(b));
  }

  /// Inverse CDF with linear interpolation inside the first bin whose upper
  /// edge reaches q. Empty bins are skipped.
  double quantile(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    const auto nb = static_cast<double>(cdf.size());
    double lo = 0.0;
    for (std::size_t b = 0; b < cdf.size(); ++b) {
      const double hi = cdf[b];
      if (hi > lo && hi >= q) {
        const double frac = std::clamp((q - lo) / (hi - lo), 0.0, 1.0);
        return (static_cast<double>(b) + frac) / nb;
      }
      lo = hi;
    }
    return 1.0;
  }
};

/// Normalised histogram of values in [0,1]; values are clamped and 1.0 falls in the last bin.
inline std::vector<double> unit_histogram(std::span<const double> values, std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  if (values.empty()) return h;
  for (auto v : values) {
    const double c = std::clamp(v, 0.0, 1.0);
    const auto b = std::min(static_cast<std::size_t>(c * static_cast<double>(bins)), bins - 1);
    h[b] += 1.0;
  }
  for (auto& x : h) x /= static_cast<double>(values.size());
  return h;
}

/// CDF of the mean of the per-field normalised histograms.
inline ReferenceCdf reference_histogram(std::span<const std::vector<double>> fields, std::size_t bins = 256) {
  if (bins < 2) throw Error("reference histogram needs at least 2 bins");
  if (fields.empty()) throw Error("reference histogram needs at least one ground-truth field");
  std::vector<double> mean(bins, 0.0);
  for (const auto& f : fields) {
    const auto h = unit_histogram(f, bins);
    for (std::size_t b = 0; b < bins; ++b) mean[b] += h[b];
  }
  ReferenceCdf ref;
  ref.cdf.resize(bins);
  double acc = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    acc += mean[b] / static_cast<double>(fields.size());
    ref.cdf[b] = std::min(acc, 1.0);
  }
  if (ref.cdf.back() > 0.0) {
    const double total = ref.cdf.back();
    for (auto& c : ref.cdf) c = std::min(c / total, 1.0);
  }
  ref.cdf.back() = 1.0;
  return ref;
}

/// Remaps values so their distribution follows the reference: v ↦ F_ref⁻¹(F_map(v)),
/// F_map the empirical CDF of the map. Monotone non-decreasing; a constant map
/// goes to the reference median.
inline SaliencyMap histogram_match(const SaliencyMap& map, const ReferenceCdf& ref, Warnings* warnings = nullptr) {
  SaliencyMap out{map.shape_id, map.model, std::vector<double>(map.size(), 0.0)};
  const std::size_t n = map.size();
  if (n == 0) return out;
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  if (*lo == *hi) {
    warn(warnings, "histogram matching a constant map to the reference median");
    std::fill(out.values.begin(), out.values.end(), ref.quantile(0.5));
    return out;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return map.values[a] < map.values[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && map.values[order[j + 1]] == map.values[order[i]]) ++j;
    const double q = static_cast<double>(j + 1) / static_cast<double>(n);  // #{x <= v} / n
    const double y = ref.quantile(q);
    for (std::size_t t = i; t <= j; ++t) out.values[order[t]] = y;
    i = j + 1;
  }
  return out;
}

}  // namespace salbench
