#pragma once

#include <salbench/evaluation/aggregate.hpp>
#include <salbench/evaluation/histogram.hpp>
#include <salbench/evaluation/human.hpp>
#include <salbench/evaluation/metrics.hpp>
#include <salbench/evaluation/wilcoxon.hpp>
#include <salbench/io/colormap.hpp>
#include <salbench/io/config.hpp>
#include <salbench/io/ground_truth_io.hpp>
#include <salbench/io/manifest.hpp>
#include <salbench/io/mesh_io.hpp>
#include <salbench/models/baselines.hpp>
#include <salbench/models/cs.hpp>
#include <salbench/models/ls.hpp>
#include <salbench/models/ms.hpp>
#include <salbench/models/ps.hpp>
#include <salbench/neighbor_index.hpp>
#include <salbench/normals.hpp>
#include <salbench/scanner.hpp>
#include <salbench/triangulation.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace salbench {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

/// One manifest entry with its geometry and ground truth loaded.
struct ShapeData {
  ShapeEntry entry;
  MeshFile file;
  GroundTruth truth;

  const TriangleMesh& mesh() const { return file.mesh; }
};

inline ShapeData load_shape(const DatasetManifest& manifest, const ShapeEntry& entry, double gt_sigma = 0.03) {
  ShapeData s;
  s.entry = entry;
  s.file = load_mesh_file(manifest.resolve(entry.mesh));
  if (s.file.mesh.vertices.empty()) throw DataError("shape '" + entry.id + "' has no vertices");
  std::optional<std::filesystem::path> field;
  if (entry.field) field = manifest.resolve(*entry.field);
  s.truth = load_ground_truth(manifest.resolve(entry.ground_truth), s.file.mesh, field, entry.id, gt_sigma);
  s.file.mesh.class_label = entry.class_label;
  return s;
}

/// FNV-1a, used to derive per-shape seeds that do not depend on manifest order.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t shape_seed(std::uint64_t seed, std::string_view shape_id, ModelTag tag) {
  return seed ^ stable_hash(shape_id) ^ (static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ull);
}

/// Point cloud of a shape as the point-based models see it.
inline PointCloud shape_cloud(const ShapeData& shape) {
  if (!shape.mesh().faces.empty() && shape.file.normals.empty()) {
    PointCloud c = mesh_to_cloud(shape.mesh());
    c.provenance = shape.file.provenance;
    return c;
  }
  PointCloud c;
  c.points = shape.mesh().vertices;
  c.normals = shape.file.normals;
  c.provenance = shape.file.provenance;
  return c;
}

/// Runs one model on a loaded shape. HS draws n_p participants with a seeded shuffle.
inline SaliencyMap compute_model(ModelTag tag, const ShapeData& shape, const ModelParams& params,
                                 Warnings* warnings = nullptr) {
  const auto& id = shape.entry.id;
  switch (tag) {
    case ModelTag::LS: return compute_ls(shape_cloud(shape), params, id, warnings);
    case ModelTag::CS: return compute_cs(shape_cloud(shape), params, id, warnings);
    case ModelTag::PS: return compute_ps(shape_cloud(shape), params, id, warnings);
    case ModelTag::MS:
      if (shape.mesh().faces.empty()) {
        warn(warnings, id + ": spectral saliency needs faces, assigning 0");
        return SaliencyMap{id, ModelTag::MS, std::vector<double>(shape.mesh().vertices.size(), 0.0)};
      }
      return compute_ms(shape.mesh(), params, id, warnings);
    case ModelTag::RS: return compute_rs(shape.mesh().vertices.size(), shape_seed(params.seed, id, tag), id);
    case ModelTag::HS: {
      const auto& parts = shape.truth.participants;
      if (parts.size() < params.n_p) {
        throw Error(id + ": human saliency needs " + std::to_string(params.n_p) + " participants, have " +
                    std::to_string(parts.size()));
      }
      std::vector<std::size_t> order(parts.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(shape_seed(params.seed, id, tag));
      shuffle(std::span<std::size_t>(order), rng);
      order.resize(params.n_p);
      return compute_hs(parts, order, shape.mesh().vertices, params.hs_sigma, id);
    }
    case ModelTag::GS: break;
  }
  throw Error("model " + std::string(to_string(tag)) + " cannot be computed");
}

struct BenchOptions {
  std::vector<ModelTag> models;
  RunConfig config;
  bool export_maps = false;
};

struct BenchFailure {
  std::string shape_id;
  std::string model;  // empty when the shape itself failed to load
  std::string message;
};

struct BenchmarkReport {
  std::vector<MetricScores> scores;  // ordered by shape id, then model order
  std::vector<BenchFailure> failures;
  Warnings warnings;
  std::vector<ClassSummary> classes;
  std::vector<ModelTag> models;
  std::size_t shape_count = 0;
  nlohmann::ordered_json json;

  /// True when no shape produced any score.
  bool all_failed() const { return shape_count > 0 && scores.empty(); }
};

namespace detail {

inline std::vector<double> metric_column(std::span<const MetricScores> scores, ModelTag tag, int metric) {
  std::vector<double> out;
  for (const auto& s : scores) {
    if (s.model != tag) continue;
    out.push_back(metric == 0 ? s.auc : metric == 1 ? s.nss : s.lcc);
  }
  return out;
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (auto x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline nlohmann::ordered_json interval_json(const Interval& i) {
  return nlohmann::ordered_json{{"mean", i.mean}, {"half_width", i.half_width}};
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace detail

/// Models ordered by descending mean of the metric over all scores.
inline std::vector<std::pair<ModelTag, double>> rank_models(std::span<const MetricScores> scores,
                                                            std::span<const ModelTag> models, int metric) {
  std::vector<std::pair<ModelTag, double>> out;
  for (auto m : models) {
    const auto col = detail::metric_column(scores, m, metric);
    if (!col.empty()) out.emplace_back(m, detail::mean_of(col));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

/// Symmetric matrix of two-sided rank-sum p-values between the per-shape
/// scores of each pair of models; the diagonal is 1.
inline std::vector<std::vector<double>> pairwise_wilcoxon(std::span<const MetricScores> scores,
                                                          std::span<const ModelTag> models, int metric) {
  const std::size_t k = models.size();
  std::vector<std::vector<double>> p(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    const auto a = detail::metric_column(scores, models[i], metric);
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto b = detail::metric_column(scores, models[j], metric);
      const double v = a.empty() || b.empty() ? 1.0 : wilcoxon_rank_sum(a, b).p_value;
      p[i][j] = p[j][i] = v;
    }
  }
  return p;
}

/// The whole evaluation: each model's map is min-max normalised, histogram
/// matched to the mean ground-truth distribution and scored. Failures are
/// recorded and the run continues. When `out_dir` is non-empty, writes
/// report.json, classes.csv and (optionally) coloured maps.
inline BenchmarkReport run_benchmark(const DatasetManifest& manifest, const BenchOptions& options,
                                     const std::filesystem::path& out_dir = {}) {
  options.config.params.validate();
  BenchmarkReport report;
  report.shape_count = manifest.shapes.size();
  const auto& params = options.config.params;

  for (auto m : options.models) {
    if (m == ModelTag::GS) throw Error("GS is the ground truth, not a model");
    if (m == ModelTag::HS && manifest.kind == DatasetKind::Scans) {
      warn(&report.warnings, "HS skipped: human baseline is not evaluated on scans");
      continue;
    }
    if (std::find(report.models.begin(), report.models.end(), m) == report.models.end()) report.models.push_back(m);
  }

  std::vector<const ShapeEntry*> entries;
  for (const auto& e : manifest.shapes) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](const ShapeEntry* a, const ShapeEntry* b) { return a->id < b->id; });

  std::vector<ShapeData> shapes;
  for (const auto* e : entries) {
    try {
      shapes.push_back(load_shape(manifest, *e, params.hs_sigma));
    } catch (const Error& err) {
      report.failures.push_back({e->id, "", err.what()});
    }
  }

  std::vector<std::vector<double>> fields;
  for (const auto& s : shapes) fields.push_back(s.truth.field);
  std::optional<ReferenceCdf> ref;
  if (!fields.empty()) ref = reference_histogram(fields);

  std::map<std::string, std::string> class_of;
  for (const auto& shape : shapes) {
    class_of[shape.entry.id] = shape.entry.class_label.empty() ? "unlabeled" : shape.entry.class_label;
    const auto fix = shape.truth.fixations();
    for (auto tag : report.models) {
      try {
        Warnings w;
        const auto raw = compute_model(tag, shape, params, &w);
        for (auto& msg : w) report.warnings.push_back(shape.entry.id + " " + std::string(to_string(tag)) + ": " + msg);
        const SaliencyMap normalized = make_map(shape.entry.id, tag, raw.values);
        const SaliencyMap matched = histogram_match(normalized, *ref);
        MetricScores sc;
        sc.shape_id = shape.entry.id;
        sc.model = tag;
        sc.auc = roc_auc(matched.values, fix);
        sc.nss = nss(matched.values, shape.truth.participants);
        sc.lcc = lcc(matched.values, shape.truth.field);
        report.scores.push_back(sc);
        if (options.export_maps && !out_dir.empty()) {
          export_colored_map(shape.mesh(), normalized,
                             out_dir / "maps" / (shape.entry.id + "_" + std::string(to_string(tag)) + ".ply"));
        }
      } catch (const Error& err) {
        report.failures.push_back({shape.entry.id, std::string(to_string(tag)), err.what()});
      }
    }
  }

  if (!report.scores.empty()) {
    Warnings w;
    report.classes = aggregate_by_class(report.scores, class_of, &w);
    report.warnings.insert(report.warnings.end(), w.begin(), w.end());
  }

  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = json{{"name", "salbench"}, {"version", kVersion}};
  j["config"] = config_to_json(options.config);
  j["dataset"] = json{{"kind", to_string(manifest.kind)}, {"shapes", manifest.shapes.size()}};
  json models = json::array();
  for (auto m : report.models) models.push_back(std::string(to_string(m)));
  j["models"] = models;

  json scores = json::array();
  for (const auto& s : report.scores) {
    scores.push_back(json{{"shape_id", s.shape_id},
                          {"class", class_of[s.shape_id]},
                          {"model", std::string(to_string(s.model))},
                          {"status", "ok"},
                          {"auc", s.auc},
                          {"nss", s.nss},
                          {"lcc", s.lcc}});
  }
  j["scores"] = scores;
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back(json{{"shape_id", f.shape_id}, {"model", f.model}, {"status", "failed"}, {"message", f.message}});
  }
  j["failures"] = failures;

  json classes = json::array();
  for (const auto& c : report.classes) {
    json cj;
    cj["class"] = c.class_name;
    cj["mean_auc"] = c.cross_model_auc();
    json per = json::object();
    for (const auto& [tag, m] : c.models) {
      per[std::string(to_string(tag))] = json{{"count", m.count},
                                              {"auc", detail::interval_json(m.auc)},
                                              {"nss", detail::interval_json(m.nss)},
                                              {"lcc", detail::interval_json(m.lcc)}};
    }
    cj["models"] = per;
    classes.push_back(std::move(cj));
  }
  j["classes"] = classes;

  const char* metric_names[3] = {"auc", "nss", "lcc"};
  json rankings = json::object();
  json tests = json::object();
  for (int metric = 0; metric < 3; ++metric) {
    json r = json::array();
    for (const auto& [tag, mean] : rank_models(report.scores, report.models, metric)) {
      r.push_back(json{{"model", std::string(to_string(tag))}, {"mean", mean}});
    }
    rankings[metric_names[metric]] = r;
    tests[metric_names[metric]] = pairwise_wilcoxon(report.scores, report.models, metric);
  }
  j["rankings"] = rankings;
  j["wilcoxon"] = json{{"test", "rank-sum, two-sided"}, {"models", models}, {"p_values", tests}};
  j["warnings"] = report.warnings;
  report.json = std::move(j);

  if (!out_dir.empty()) {
    detail::write_file(out_dir / "report.json", report.json.dump(2) + "\n");

    // Per-class AUC table; models ordered by descending overall mean AUC.
    const auto order = rank_models(report.scores, report.models, 0);
    std::ostringstream csv;
    csv << "class";
    for (const auto& [tag, mean] : order) csv << ',' << to_string(tag) << "_auc," << to_string(tag) << "_ci";
    csv << ",avg_auc\n";
    for (const auto& c : report.classes) {
      csv << c.class_name;
      for (const auto& [tag, mean] : order) {
        const auto it = c.models.find(tag);
        if (it == c.models.end()) csv << ",,";
        else csv << ',' << detail::fixed(it->second.auc.mean) << ',' << detail::fixed(it->second.auc.half_width);
      }
      csv << ',' << detail::fixed(c.cross_model_auc()) << '\n';
    }
    detail::write_file(out_dir / "classes.csv", csv.str());
  }
  return report;
}

/// Scans every mesh from the 12 icosahedron cameras, reconstructs a partial
/// mesh per scan, transfers the ground-truth field and moves each selection to
/// the nearest scan point within 0.01R (farther ones are dropped). Writes scan
/// PLYs, ground truth and `manifest.json` into `out_dir`.
inline DatasetManifest generate_scan_dataset(const DatasetManifest& manifest, const RunConfig& config,
                                             const std::filesystem::path& out_dir, Warnings* warnings = nullptr,
                                             const TriangulationConfig& triangulation = {}) {
  config.scan.validate();
  DatasetManifest out;
  out.kind = DatasetKind::Scans;
  out.directory = out_dir;
  std::filesystem::create_directories(out_dir);

  for (const auto& entry : manifest.shapes) {
    ShapeData shape;
    try {
      shape = load_shape(manifest, entry, config.params.hs_sigma);
    } catch (const Error& e) {
      warn(warnings, entry.id + ": skipped, " + e.what());
      continue;
    }
    const auto& mesh = shape.mesh();
    const ShapeScale scale = bounding_sphere(mesh.vertices);
    const auto cameras = icosahedron_cameras(scale, config.scan);
    const TriangleBvh bvh(mesh);
    std::size_t rendered = 0;
    for (std::size_t view = 0; view < cameras.size(); ++view) {
      Warnings w;
      RangeScan scan = render_scan(mesh, cameras[view], config.scan, &w, &bvh);
      scan.base_shape_id = entry.id;
      scan.view_index = view;
      std::ostringstream sid;
      sid << entry.id << "_v" << std::setw(2) << std::setfill('0') << view;
      const std::string id = sid.str();
      if (scan.cloud.size() < 3) {
        warn(warnings, id + ": fewer than 3 scan points, skipped");
        continue;
      }

      // Fixations: nearest scan point within 0.01R of each selected vertex.
      const NeighborIndex index(scan.cloud.points);
      const double reach2 = std::pow(0.01 * scale.radius, 2);
      GroundTruth gt;
      gt.shape_id = id;
      for (const auto& part : shape.truth.participants) {
        std::vector<std::uint32_t> moved;
        for (auto v : part) {
          const auto nn = index.nearest(mesh.vertices[v]);
          if (nn.dist2 <= reach2) moved.push_back(static_cast<std::uint32_t>(nn.index));
        }
        std::sort(moved.begin(), moved.end());
        moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
        if (!moved.empty()) gt.participants.push_back(std::move(moved));
      }
      if (gt.participants.empty()) {
        warn(warnings, id + ": no selection within reach of the scan, skipped");
        continue;
      }
      gt.field = transfer_ground_truth(shape.truth.field, scan, mesh);

      MeshFile file;
      file.mesh.vertices = scan.cloud.points;
      file.provenance = scan.cloud.provenance;
      try {
        file.mesh.faces = reconstruct_partial_mesh(scan.cloud, triangulation, &w).faces;
      } catch (const Error& e) {
        warn(&w, std::string("triangulation failed: ") + e.what());
      }
      for (auto& m : w) warn(warnings, id + ": " + m);

      const std::string stem = "scans/" + id;
      write_ply(file, out_dir / (stem + ".ply"));
      write_ground_truth(gt, out_dir / (stem + ".csv"));
      write_field(gt.field, out_dir / (stem + ".field"));
      ShapeEntry se;
      se.id = id;
      se.mesh = stem + ".ply";
      se.ground_truth = stem + ".csv";
      se.field = stem + ".field";
      se.class_label = entry.class_label;
      se.base_shape = entry.id;
      se.view = view;
      out.shapes.push_back(std::move(se));
      ++rendered;
    }
    if (rendered == 0) warn(warnings, entry.id + ": no view produced a usable scan");
  }
  write_manifest(out, out_dir / "manifest.json");
  return out;
}

/// Loads every shape of a manifest for the human-performance curve.
inline std::vector<HumanShape> load_human_shapes(const DatasetManifest& manifest, double sigma,
                                                 Warnings* warnings = nullptr) {
  std::vector<HumanShape> out;
  for (const auto& e : manifest.shapes) {
    try {
      auto s = load_shape(manifest, e, sigma);
      out.push_back(HumanShape{std::move(s.file.mesh.vertices), std::move(s.truth)});
    } catch (const Error& err) {
      warn(warnings, e.id + ": skipped, " + err.what());
    }
  }
  return out;
}

}  // namespace salbench
