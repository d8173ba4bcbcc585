#pragma once

#include <salbench/evaluation/metrics.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace salbench {

/// Mean with the half-width of its 95% Student-t confidence interval.
struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
};

struct MetricSummary {
  Interval auc, nss, lcc;
  std::size_t count = 0;
};

struct ClassSummary {
  std::string class_name;
  std::map<ModelTag, MetricSummary> models;

  /// Mean AUC across the models present; the sort key of the class table.
  double cross_model_auc() const {
    if (models.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [tag, m] : models) s += m.auc.mean;
    return s / static_cast<double>(models.size());
  }
};

/// t_{0.025, n−1} · s / √n; zero for a single sample (with a warning).
inline Interval confidence_interval(std::span<const double> sample, Warnings* warnings = nullptr) {
  Interval out;
  if (sample.empty()) return out;
  const double n = static_cast<double>(sample.size());
  for (auto v : sample) out.mean += v;
  out.mean /= n;
  if (sample.size() < 2) {
    warn(warnings, "confidence interval of a single sample reported as 0");
    return out;
  }
  double ss = 0.0;
  for (auto v : sample) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  out.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return out;
}

/// Per-class, per-model means and 95% intervals. Classes are ordered by
/// descending cross-model mean AUC (ties by name).
inline std::vector<ClassSummary> aggregate_by_class(std::span<const MetricScores> scores,
                                                    const std::map<std::string, std::string>& class_of,
                                                    Warnings* warnings = nullptr) {
  struct Samples {
    std::vector<double> auc, nss, lcc;
  };
  std::map<std::string, std::map<ModelTag, Samples>> grouped;
  for (const auto& s : scores) {
    const auto it = class_of.find(s.shape_id);
    if (it == class_of.end() || it->second.empty()) {
      throw DataError("shape '" + s.shape_id + "' has no class label");
    }
    auto& g = grouped[it->second][s.model];
    g.auc.push_back(s.auc);
    g.nss.push_back(s.nss);
    g.lcc.push_back(s.lcc);
  }

  std::vector<ClassSummary> out;
  for (const auto& [name, models] : grouped) {
    ClassSummary cs;
    cs.class_name = name;
    bool single = false;
    for (const auto& [tag, g] : models) {
      MetricSummary m;
      m.count = g.auc.size();
      m.auc = confidence_interval(g.auc);
      m.nss = confidence_interval(g.nss);
      m.lcc = confidence_interval(g.lcc);
      single = single || m.count < 2;
      cs.models[tag] = m;
    }
    if (single) warn(warnings, "class '" + name + "' has a single shape; interval half-width reported as 0");
    out.push_back(std::move(cs));
  }
  std::stable_sort(out.begin(), out.end(), [](const ClassSummary& a, const ClassSummary& b) {
    return a.cross_model_auc() > b.cross_model_auc();
  });
  return out;
}

}  // namespace salbench
