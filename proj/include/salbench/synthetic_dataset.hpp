#pragma once

#include <salbench/io/ground_truth_io.hpp>
#include <salbench/io/manifest.hpp>
#include <salbench/io/mesh_io.hpp>
#include <salbench/synthetic.hpp>

#include <filesystem>
#include <string>

namespace salbench::synthetic {

struct PlantedDatasetOptions {
  std::size_t shapes = 4;        // alternating bumped spheres and dented cubes
  std::size_t participants = 8;
  double jitter = 0.08;          // selection scatter around each feature
  std::size_t stray = 0;         // uniformly random extra selections per participant
  int sphere_subdivisions = 3;
  int cube_resolution = 10;
  std::uint64_t seed = 1;
};

/// Writes a small watertight dataset of planted shapes (OFF meshes, selection
/// CSVs and manifest.json) to `dir` and returns the manifest.
inline DatasetManifest write_planted_dataset(const std::filesystem::path& dir, const PlantedDatasetOptions& o) {
  if (o.shapes == 0 || o.participants == 0) throw Error("planted dataset needs shapes and participants");
  std::filesystem::create_directories(dir);
  Rng rng(o.seed);
  DatasetManifest m;
  m.directory = dir;
  for (std::size_t s = 0; s < o.shapes; ++s) {
    PlantedShape shape;
    std::string cls;
    if (s % 2 == 0) {
      std::vector<Vec3> dirs;
      while (dirs.size() < 2) {
        const Vec3 d = Vec3(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
        if (d.norm() < 0.2 || d.norm() > 1.0) continue;
        if (!dirs.empty() && d.normalized().dot(dirs[0]) > 0.3) continue;
        dirs.push_back(d.normalized());
      }
      shape = bumped_sphere(o.sphere_subdivisions, dirs);
      cls = "Sphere";
    } else {
      const int first = static_cast<int>(uniform_below(rng, 6));
      int second = first;
      while (second == first) second = static_cast<int>(uniform_below(rng, 6));
      shape = dented_cube(o.cube_resolution, {{first / 2, first % 2 ? 1 : -1}, {second / 2, second % 2 ? 1 : -1}});
      cls = "Cube";
    }
    ShapeEntry e;
    e.id = "planted" + std::to_string(s);
    e.mesh = e.id + ".off";
    e.ground_truth = e.id + ".csv";
    e.class_label = cls;
    GroundTruth gt;
    gt.participants = plant_selections(shape.mesh, shape.features, o.participants, o.jitter, rng, o.stray);
    write_off(shape.mesh, dir / e.mesh);
    write_ground_truth(gt, dir / e.ground_truth);
    m.shapes.push_back(std::move(e));
  }
  write_manifest(m, dir / "manifest.json");
  return m;
}

}  // namespace salbench::synthetic
