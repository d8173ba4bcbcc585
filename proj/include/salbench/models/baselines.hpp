#pragma once

#include <salbench/geometry.hpp>
#include <salbench/random.hpp>
#include <salbench/saliency_map.hpp>

#include <span>
#include <vector>

namespace salbench {

/// Chance baseline: i.i.d. uniform [0,1) values. Not rescaled, so the values
/// keep their uniform distribution.
inline SaliencyMap compute_rs(std::size_t count, std::uint64_t seed, std::string shape_id = {}) {
  if (count < 1) throw Error("random saliency needs at least one point");
  Rng rng(seed);
  SaliencyMap m{std::move(shape_id), ModelTag::RS, std::vector<double>(count)};
  for (auto& v : m.values) v = uniform01(rng);
  return m;
}

/// Per-vertex selection counts over the chosen participants.
inline std::vector<double> selection_counts(std::span<const std::vector<std::uint32_t>> selections,
                                            std::span<const std::size_t> chosen, std::size_t vertex_count) {
  std::vector<double> counts(vertex_count, 0.0);
  for (auto p : chosen) {
    if (p >= selections.size()) throw Error("participant index out of range");
    for (auto v : selections[p]) {
      if (v >= vertex_count) throw DataError("selected vertex " + std::to_string(v) + " out of range");
      counts[v] += 1.0;
    }
  }
  return counts;
}

/// Human baseline: Gaussian-smoothed selection frequency of the chosen
/// participants. `sigma` is a fraction of the bounding radius R; the kernel
/// uses Euclidean distance.
inline SaliencyMap compute_hs(std::span<const std::vector<std::uint32_t>> selections,
                              std::span<const std::size_t> chosen, std::span<const Vec3> vertices, double sigma,
                              std::string shape_id = {}) {
  if (chosen.empty()) throw Error("human saliency needs at least one participant");
  auto freq = selection_counts(selections, chosen, vertices.size());
  for (auto& f : freq) f /= static_cast<double>(chosen.size());
  const double R = vertices.empty() ? 0.0 : bounding_sphere(vertices).radius;
  return make_map(std::move(shape_id), ModelTag::HS, gaussian_smooth(vertices, freq, sigma * R));
}

}  // namespace salbench
