#pragma once

#include <salbench/io/mesh_io.hpp>
#include <salbench/saliency_map.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>

namespace salbench {

using Rgb = std::array<std::uint8_t, 3>;

struct ColorStop {
  double at;
  double r, g, b;
};

// Blue through cyan and green to yellow.
inline constexpr std::array<ColorStop, 5> kColormapStops{{
    {0.00, 62.0, 38.0, 168.0},
    {0.25, 20.0, 132.0, 212.0},
    {0.50, 56.0, 185.0, 158.0},
    {0.75, 201.0, 194.0, 39.0},
    {1.00, 249.0, 251.0, 14.0},
}};

/// 256-entry lookup table: entry i is the stop interpolation at i/255, rounded.
inline const std::array<Rgb, 256>& colormap_table() {
  static const std::array<Rgb, 256> table = [] {
    std::array<Rgb, 256> t{};
    for (std::size_t i = 0; i < 256; ++i) {
      const double x = static_cast<double>(i) / 255.0;
      std::size_t s = 0;
      while (s + 2 < kColormapStops.size() && x > kColormapStops[s + 1].at) ++s;
      const auto& a = kColormapStops[s];
      const auto& b = kColormapStops[s + 1];
      const double f = (x - a.at) / (b.at - a.at);
      auto mix = [f](double u, double v) { return static_cast<std::uint8_t>(std::lround(u + (v - u) * f)); };
      t[i] = {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
    }
    return t;
  }();
  return table;
}

/// Colour of a value in [0,1]; entry min(255, floor(v·256)), values clamped.
inline Rgb colormap(double v) {
  if (!(v > 0.0)) return colormap_table()[0];
  const auto i = static_cast<std::size_t>(std::min(255.0, std::floor(v * 256.0)));
  return colormap_table()[i];
}

/// Writes the geometry (faces optional) with per-vertex colours as binary PLY.
inline void export_colored_map(const TriangleMesh& geometry, const SaliencyMap& map,
                               const std::filesystem::path& path) {
  if (map.size() != geometry.vertices.size()) {
    throw Error("saliency map has " + std::to_string(map.size()) + " values for " +
                std::to_string(geometry.vertices.size()) + " vertices");
  }
  MeshFile file;
  file.mesh = geometry;
  file.colors.reserve(map.size());
  for (auto v : map.values) file.colors.push_back(colormap(v));
  write_ply(file, path, true);
}

inline void export_colored_map(const PointCloud& cloud, const SaliencyMap& map, const std::filesystem::path& path) {
  TriangleMesh m;
  m.vertices = cloud.points;
  export_colored_map(m, map, path);
}

}  // namespace salbench
