#pragma once

#include <salbench/evaluation/metrics.hpp>
#include <salbench/geometry.hpp>
#include <salbench/io/mesh_io.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace salbench {

/// Ground-truth field synthesised from raw selections: total selection counts
/// smoothed with a Euclidean Gaussian of width sigma·R and divided by the maximum.
inline std::vector<double> synthesize_field(std::span<const Vec3> vertices,
                                            std::span<const std::vector<std::uint32_t>> participants,
                                            double sigma = 0.03) {
  std::vector<double> counts(vertices.size(), 0.0);
  for (const auto& p : participants) {
    for (auto v : p) counts.at(v) += 1.0;
  }
  const double R = vertices.empty() ? 0.0 : bounding_sphere(vertices).radius;
  auto field = gaussian_smooth(vertices, counts, sigma * R);
  const double top = field.empty() ? 0.0 : *std::max_element(field.begin(), field.end());
  if (top > 0.0) {
    for (auto& f : field) f /= top;
  }
  return field;
}

/// Parses `participant_id,vertex_index` rows (an optional header line is
/// skipped). Participants keep their first-appearance order; each selection
/// set is sorted and deduplicated. The field comes from `field_path` (one value
/// per line) or is synthesised.
inline GroundTruth load_ground_truth(const std::filesystem::path& csv_path, const TriangleMesh& mesh,
                                     const std::optional<std::filesystem::path>& field_path = std::nullopt,
                                     std::string shape_id = {}, double sigma = 0.03) {
  const auto text = detail::read_file(csv_path);
  const std::string name = csv_path.string();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> slot;
  GroundTruth gt;
  gt.shape_id = std::move(shape_id);
  const auto nv = mesh.vertices.size();
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError(name + ":" + std::to_string(line_no) + ": expected 'participant_id,vertex_index'");
    }
    const auto pid = detail::trim(line.substr(0, comma));
    const auto vtx = detail::trim(line.substr(comma + 1));
    long long v = -1;
    try {
      std::size_t used = 0;
      v = std::stoll(vtx, &used);
      if (used != vtx.size()) throw std::invalid_argument(vtx);
    } catch (const std::exception&) {
      if (!any && slot.empty()) continue;  // header row
      throw DataError(name + ":" + std::to_string(line_no) + ": bad vertex index '" + vtx + "'");
    }
    if (v < 0 || static_cast<std::size_t>(v) >= nv) {
      throw DataError(name + ":" + std::to_string(line_no) + ": vertex index " + std::to_string(v) +
                      " out of range for " + std::to_string(nv) + " vertices");
    }
    auto [it, inserted] = slot.emplace(pid, gt.participants.size());
    if (inserted) gt.participants.emplace_back();
    gt.participants[it->second].push_back(static_cast<std::uint32_t>(v));
    any = true;
  }
  if (!any) throw DataError(name + ": no selections");
  for (auto& p : gt.participants) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }

  if (field_path) {
    const auto ftext = detail::read_file(*field_path);
    std::istringstream fin(ftext);
    std::size_t fl = 0;
    while (std::getline(fin, line)) {
      ++fl;
      line = detail::trim(line);
      if (line.empty()) continue;
      try {
        std::size_t used = 0;
        gt.field.push_back(std::stod(line, &used));
        if (used != line.size()) throw std::invalid_argument(line);
      } catch (const std::exception&) {
        throw DataError(field_path->string() + ":" + std::to_string(fl) + ": bad field value '" + line + "'");
      }
    }
    if (gt.field.size() != nv) {
      throw DataError(field_path->string() + ": " + std::to_string(gt.field.size()) + " values for " +
                      std::to_string(nv) + " vertices");
    }
  } else {
    gt.field = synthesize_field(mesh.vertices, gt.participants, sigma);
  }
  return gt;
}

/// Participants are written as p0, p1, ... in order.
inline void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& csv_path) {
  std::ostringstream s;
  s << "participant_id,vertex_index\n";
  for (std::size_t p = 0; p < gt.participants.size(); ++p) {
    for (auto v : gt.participants[p]) s << 'p' << p << ',' << v << '\n';
  }
  detail::write_file(csv_path, s.str());
}

inline void write_field(std::span<const double> values, const std::filesystem::path& path) {
  std::ostringstream s;
  s.precision(17);
  for (auto v : values) s << v << '\n';
  detail::write_file(path, s.str());
}

}  // namespace salbench
