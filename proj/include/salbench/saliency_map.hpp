#pragma once

#include <salbench/core.hpp>
#include <salbench/neighbor_index.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace salbench {

enum class ModelTag { LS, MS, CS, PS, RS, HS, GS };

inline constexpr std::array<ModelTag, 6> kEvaluatedModels{ModelTag::LS, ModelTag::MS, ModelTag::CS,
                                                           ModelTag::PS, ModelTag::RS, ModelTag::HS};

inline std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::LS: return "LS";
    case ModelTag::MS: return "MS";
    case ModelTag::CS: return "CS";
    case ModelTag::PS: return "PS";
    case ModelTag::RS: return "RS";
    case ModelTag::HS: return "HS";
    case ModelTag::GS: return "GS";
  }
  return "?";
}

inline std::optional<ModelTag> parse_model_tag(std::string_view s) {
  for (auto tag : {ModelTag::LS, ModelTag::MS, ModelTag::CS, ModelTag::PS, ModelTag::RS, ModelTag::HS,
                   ModelTag::GS}) {
    if (s == to_string(tag)) return tag;
  }
  return std::nullopt;
}

/// Per-point saliency in [0,1]. A constant map is stored as all zeros.
struct SaliencyMap {
  std::string shape_id;
  ModelTag model = ModelTag::GS;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Parameters of every model. Radii and scales are fractions of the bounding
/// sphere radius R.
struct ModelParams {
  // LS
  double r_low = 0.01;
  double r_high = 0.1;
  double ls_focus_sigma = 0.1;         // association kernel width
  std::size_t ls_exact_limit = 5000;   // above this, distinctiveness is sampled
  std::size_t ls_sample_near = 512;
  std::size_t ls_sample_far = 512;
  bool exact_ls = false;
  // MS
  double epsilon = 0.004;
  std::size_t n_freq = 9;
  std::size_t ms_window = 9;
  double ms_smoothing_sigma = 0.02;
  std::size_t ms_dense_limit = 600;    // dense eigensolver up to this many vertices
  // CS
  double r_cs = 0.02;
  std::size_t clusters = 100;
  double cs_sigma = 0.05;
  std::size_t kmeans_iterations = 50;
  // PS
  double r_ps = 0.01;
  // HS
  std::size_t n_p = 1;
  double hs_sigma = 0.03;
  // Normals for clouds without them
  std::size_t normal_k = 10;
  std::size_t riemann_k = 8;

  std::uint64_t seed = 0;

  /// Throws Error on an invalid combination.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw Error(std::string("parameter ") + name + " must be > 0");
    };
    positive(r_low, "r_low");
    positive(r_high, "r_high");
    positive(epsilon, "epsilon");
    positive(r_cs, "r_cs");
    positive(r_ps, "r_ps");
    positive(ls_focus_sigma, "ls_focus_sigma");
    positive(cs_sigma, "cs_sigma");
    if (n_freq < 1) throw Error("parameter n_freq must be >= 1");
    if (clusters < 1) throw Error("parameter K must be >= 1");
    if (n_p < 1) throw Error("parameter n_p must be >= 1");
    if (hs_sigma < 0.0) throw Error("parameter hs_sigma must be >= 0");
  }
};

/// Linear rescale to [0,1]; constant (or empty) input becomes all zeros.
inline std::vector<double> rescale_unit(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const double a = *lo;
  const double span = *hi - *lo;
  if (!(span > 0.0) || !std::isfinite(span)) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (auto& v : out) v = (v - a) / span;
  return out;
}

inline SaliencyMap make_map(std::string shape_id, ModelTag model, std::span<const double> raw) {
  return SaliencyMap{std::move(shape_id), model, rescale_unit(raw)};
}

/// Σ_u w(u) exp(−‖p − u‖²/(2σ²)) for every point p. σ = 0 returns the weights
/// unchanged. The kernel is truncated at 6σ.
inline std::vector<double> gaussian_smooth(std::span<const Vec3> points, std::span<const double> weights,
                                           double sigma) {
  std::vector<double> out(weights.begin(), weights.end());
  if (sigma <= 0.0 || points.empty()) return out;
  std::vector<Vec3> sources;
  std::vector<double> source_weight;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] != 0.0) {
      sources.push_back(points[i]);
      source_weight.push_back(weights[i]);
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (sources.empty()) return out;
  const NeighborIndex index(sources);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double acc = 0.0;
    for (const auto& nb : index.radius_search(points[i], 6.0 * sigma)) {
      acc += source_weight[nb.index] * std::exp(-nb.dist2 * inv);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace salbench
