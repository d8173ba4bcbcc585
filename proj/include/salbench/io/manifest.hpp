#pragma once

#include <salbench/io/mesh_io.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace salbench {

enum class DatasetKind { Watertight, Scans };

inline const char* to_string(DatasetKind k) { return k == DatasetKind::Scans ? "scans" : "watertight"; }

struct ShapeEntry {
  std::string id;
  std::filesystem::path mesh;          // relative paths resolve against the manifest directory
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> field;
  std::string class_label;
  std::optional<std::string> base_shape;  // scans only
  std::optional<std::size_t> view;        // scans only
};

/// A list of shapes with their ground truth.
///
/// JSON layout:
///
///     {"kind": "watertight",
///      "shapes": [{"id": "ant1", "mesh": "ant1.off", "ground_truth": "ant1.csv",
///                  "field": "ant1.field", "class": "Ant"}]}
///
/// `field` is optional; scan manifests add `base_shape` and `view`.
struct DatasetManifest {
  DatasetKind kind = DatasetKind::Watertight;
  std::vector<ShapeEntry> shapes;
  std::filesystem::path directory;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : directory / p;
  }
};

inline DatasetManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& directory,
                                      bool check_files = true) {
  DatasetManifest m;
  m.directory = directory;
  try {
    const auto kind = j.value("kind", std::string("watertight"));
    if (kind == "watertight") m.kind = DatasetKind::Watertight;
    else if (kind == "scans") m.kind = DatasetKind::Scans;
    else throw DataError("manifest kind must be 'watertight' or 'scans', got '" + kind + "'");
    if (!j.contains("shapes") || !j.at("shapes").is_array()) throw DataError("manifest lacks a 'shapes' array");
    std::set<std::string> seen;
    for (const auto& s : j.at("shapes")) {
      ShapeEntry e;
      e.id = s.at("id").get<std::string>();
      e.mesh = s.at("mesh").get<std::string>();
      e.ground_truth = s.at("ground_truth").get<std::string>();
      if (s.contains("field") && !s.at("field").is_null()) e.field = s.at("field").get<std::string>();
      e.class_label = s.value("class", std::string());
      if (s.contains("base_shape")) e.base_shape = s.at("base_shape").get<std::string>();
      if (s.contains("view")) e.view = s.at("view").get<std::size_t>();
      if (e.id.empty()) throw DataError("manifest shape with an empty id");
      if (!seen.insert(e.id).second) throw DataError("duplicate shape id '" + e.id + "'");
      m.shapes.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  if (check_files) {
    for (const auto& e : m.shapes) {
      for (const auto& p : {std::optional(e.mesh), std::optional(e.ground_truth), e.field}) {
        if (p && !std::filesystem::exists(m.resolve(*p))) {
          throw DataError("shape '" + e.id + "': missing file '" + m.resolve(*p).string() + "'");
        }
      }
    }
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true) {
  const auto text = detail::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return parse_manifest(j, path.parent_path(), check_files);
}

inline nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(m.kind);
  j["shapes"] = nlohmann::ordered_json::array();
  for (const auto& e : m.shapes) {
    nlohmann::ordered_json s;
    s["id"] = e.id;
    s["mesh"] = e.mesh.generic_string();
    s["ground_truth"] = e.ground_truth.generic_string();
    if (e.field) s["field"] = e.field->generic_string();
    s["class"] = e.class_label;
    if (e.base_shape) s["base_shape"] = *e.base_shape;
    if (e.view) s["view"] = *e.view;
    j["shapes"].push_back(std::move(s));
  }
  return j;
}

inline void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  detail::write_file(path, manifest_to_json(m).dump(2) + "\n");
}

}  // namespace salbench
