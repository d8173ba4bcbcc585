#pragma once

#include <salbench/io/mesh_io.hpp>
#include <salbench/saliency_map.hpp>
#include <salbench/scanner.hpp>

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>

namespace salbench {

/// Everything a run can be configured with.
struct RunConfig {
  ModelParams params;
  ScanConfig scan;
};

namespace detail {

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw Error("config key '" + key + "' expects true/false, got '" + text + "'");
  } else {
    if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text[0] == '-') throw Error("config key '" + key + "' must be non-negative");
    }
    in >> v;
    if (in.fail() || !(in >> std::ws).eof()) {
      throw Error("config key '" + key + "' has invalid value '" + text + "'");
    }
  }
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& config_setters() {
  static const std::map<std::string, Setter> setters = [] {
    std::map<std::string, Setter> m;
    auto bind = [&m](const std::string& key, auto member_of) {
      m[key] = [key, member_of](RunConfig& c, const std::string& text) {
        auto& field = member_of(c);
        field = parse_value<std::decay_t<decltype(field)>>(key, text);
      };
    };
#define SALBENCH_PARAM(name) bind(#name, [](RunConfig& c) -> auto& { return c.params.name; })
    SALBENCH_PARAM(r_low);
    SALBENCH_PARAM(r_high);
    SALBENCH_PARAM(ls_focus_sigma);
    SALBENCH_PARAM(ls_exact_limit);
    SALBENCH_PARAM(ls_sample_near);
    SALBENCH_PARAM(ls_sample_far);
    SALBENCH_PARAM(exact_ls);
    SALBENCH_PARAM(epsilon);
    SALBENCH_PARAM(n_freq);
    SALBENCH_PARAM(ms_window);
    SALBENCH_PARAM(ms_smoothing_sigma);
    SALBENCH_PARAM(ms_dense_limit);
    SALBENCH_PARAM(r_cs);
    SALBENCH_PARAM(clusters);
    SALBENCH_PARAM(cs_sigma);
    SALBENCH_PARAM(kmeans_iterations);
    SALBENCH_PARAM(r_ps);
    SALBENCH_PARAM(n_p);
    SALBENCH_PARAM(hs_sigma);
    SALBENCH_PARAM(normal_k);
    SALBENCH_PARAM(riemann_k);
    SALBENCH_PARAM(seed);
#undef SALBENCH_PARAM
#define SALBENCH_SCAN(name) bind(#name, [](RunConfig& c) -> auto& { return c.scan.name; })
    SALBENCH_SCAN(image_width);
    SALBENCH_SCAN(image_height);
    SALBENCH_SCAN(fov_degrees);
    SALBENCH_SCAN(icosahedron_scale);
#undef SALBENCH_SCAN
    m["K"] = m.at("clusters");
    return m;
  }();
  return setters;
}

}  // namespace detail

/// Sets one key from its textual value. Unknown keys are errors.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& setters = detail::config_setters();
  const auto it = setters.find(key);
  if (it == setters.end()) throw Error("unknown config key '" + key + "'");
  it->second(config, value);
}

/// Flat `key = value` text (also accepts `key: value`); '#' starts a comment.
/// Quoted values have their quotes removed.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}, const std::string& name = "config") {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos) throw Error(name + ":" + std::to_string(n) + ": expected 'key = value'");
    const auto key = detail::trim(line.substr(0, sep));
    auto value = detail::trim(line.substr(sep + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    try {
      apply_setting(base, key, value);
    } catch (const Error& e) {
      throw Error(name + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return base;
}

/// A flat JSON object of the same keys.
inline RunConfig parse_config_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw Error("JSON config must be an object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_unsigned()) text = std::to_string(value.get<std::uint64_t>());
    else if (value.is_number_integer()) text = std::to_string(value.get<std::int64_t>());
    else if (value.is_number()) {
      std::ostringstream s;
      s.precision(17);
      s << value.get<double>();
      text = s.str();
    } else {
      throw Error("config key '" + key + "' must be a scalar");
    }
    apply_setting(base, key, text);
  }
  return base;
}

/// Loads a config file; `.json` files are parsed as JSON, anything else as flat text.
inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  const auto text = detail::read_file(path);
  RunConfig out;
  if (detail::has_extension(path, ".json")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
    out = parse_config_json(j, std::move(base));
  } else {
    out = parse_config_text(text, std::move(base), path.string());
  }
  out.params.validate();
  out.scan.validate();
  return out;
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  const auto& p = c.params;
  nlohmann::ordered_json j;
  j["r_low"] = p.r_low;
  j["r_high"] = p.r_high;
  j["ls_focus_sigma"] = p.ls_focus_sigma;
  j["ls_exact_limit"] = p.ls_exact_limit;
  j["ls_sample_near"] = p.ls_sample_near;
  j["ls_sample_far"] = p.ls_sample_far;
  j["exact_ls"] = p.exact_ls;
  j["epsilon"] = p.epsilon;
  j["n_freq"] = p.n_freq;
  j["ms_window"] = p.ms_window;
  j["ms_smoothing_sigma"] = p.ms_smoothing_sigma;
  j["ms_dense_limit"] = p.ms_dense_limit;
  j["r_cs"] = p.r_cs;
  j["clusters"] = p.clusters;
  j["cs_sigma"] = p.cs_sigma;
  j["kmeans_iterations"] = p.kmeans_iterations;
  j["r_ps"] = p.r_ps;
  j["n_p"] = p.n_p;
  j["hs_sigma"] = p.hs_sigma;
  j["normal_k"] = p.normal_k;
  j["riemann_k"] = p.riemann_k;
  j["seed"] = p.seed;
  j["image_width"] = c.scan.image_width;
  j["image_height"] = c.scan.image_height;
  j["fov_degrees"] = c.scan.fov_degrees;
  j["icosahedron_scale"] = c.scan.icosahedron_scale;
  return j;
}

}  // namespace salbench
