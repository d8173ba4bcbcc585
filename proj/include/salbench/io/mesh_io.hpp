#pragma once

#include <salbench/geometry.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace salbench {

/// Geometry read from or written to a PLY/OFF file. Per-vertex attributes are
/// empty when absent.
struct MeshFile {
  TriangleMesh mesh;
  std::vector<Vec3> normals;
  std::vector<Provenance> provenance;            // triangle_id, bary_u, bary_v
  std::vector<std::array<std::uint8_t, 3>> colors;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Line-oriented token reader that skips '#' comments and remembers line numbers.
class TokenReader {
 public:
  TokenReader(const std::string& text, std::string name) : text_(text), name_(std::move(name)) {}

  std::optional<std::string> next() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        const auto start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '#') ++pos_;
        return text_.substr(start, pos_ - start);
      }
    }
    return std::nullopt;
  }

  std::string require(const char* what) {
    auto t = next();
    if (!t) fail(std::string("unexpected end of file, expected ") + what);
    return *t;
  }

  double number(const char* what) {
    const auto t = require(what);
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(std::string("expected ") + what + ", got '" + t + "'");
    }
  }

  long long integer(const char* what) {
    const auto t = require(what);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(std::string("expected ") + what + ", got '" + t + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError(name_ + ":" + std::to_string(line_) + ": " + message);
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  std::size_t position() const { return pos_; }
  std::size_t line() const { return line_; }

 private:
  const std::string& text_;
  std::string name_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline void add_polygon(TriangleMesh& mesh, const std::vector<long long>& idx, const TokenReader* reader,
                        const std::string& where) {
  const auto n = static_cast<long long>(mesh.vertices.size());
  for (auto v : idx) {
    if (v < 0 || v >= n) {
      const std::string msg = "face index " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")";
      if (reader) reader->fail(msg);
      throw DataError(where + ": " + msg);
    }
  }
  if (idx.size() < 3) {
    const std::string msg = "face with fewer than 3 vertices";
    if (reader) reader->fail(msg);
    throw DataError(where + ": " + msg);
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {  // fan
    mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                          static_cast<std::uint32_t>(idx[k + 1])});
  }
}

inline MeshFile parse_off(const std::string& text, const std::string& name) {
  TokenReader r(text, name);
  const auto magic = r.require("OFF header");
  if (magic != "OFF") r.fail("missing OFF header (got '" + magic + "')");
  const auto nv = r.integer("vertex count");
  const auto nf = r.integer("face count");
  r.integer("edge count");
  if (nv < 0 || nf < 0) r.fail("negative element count");
  MeshFile out;
  out.mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    const double x = r.number("vertex coordinate");
    const double y = r.number("vertex coordinate");
    const double z = r.number("vertex coordinate");
    out.mesh.vertices.emplace_back(x, y, z);
  }
  for (long long f = 0; f < nf; ++f) {
    const auto k = r.integer("face vertex count");
    if (k < 3) r.fail("face with fewer than 3 vertices");
    std::vector<long long> idx(static_cast<std::size_t>(k));
    for (auto& v : idx) v = r.integer("face vertex index");
    add_polygon(out.mesh, idx, &r, name);
    r.skip_line();  // optional per-face colour
  }
  return out;
}

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline std::optional<PlyType> ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::Int8;
  if (s == "uchar" || s == "uint8") return PlyType::UInt8;
  if (s == "short" || s == "int16") return PlyType::Int16;
  if (s == "ushort" || s == "uint16") return PlyType::UInt16;
  if (s == "int" || s == "int32") return PlyType::Int32;
  if (s == "uint" || s == "uint32") return PlyType::UInt32;
  if (s == "float" || s == "float32") return PlyType::Float32;
  if (s == "double" || s == "float64") return PlyType::Float64;
  return std::nullopt;
}

inline std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

/// Reads values either from ASCII tokens or a little-endian byte stream.
class PlyValueReader {
 public:
  PlyValueReader(const std::string& text, std::size_t offset, bool binary, const std::string& name,
                 std::size_t line)
      : text_(text),
        pos_(offset),
        binary_(binary),
        name_(name),
        ascii_(binary ? std::string() : text.substr(offset)),
        tokens_(ascii_, name),
        line_offset_(line - 1) {}

  double read(PlyType t) {
    if (!binary_) return tokens_.number("property value");
    const auto size = ply_size(t);
    if (pos_ + size > text_.size()) {
      throw DataError(name_ + ": truncated binary data at byte offset " + std::to_string(pos_));
    }
    const char* p = text_.data() + pos_;
    pos_ += size;
    return decode(p, t);
  }

  [[noreturn]] void fail(const std::string& message) const {
    if (binary_) throw DataError(name_ + ": byte offset " + std::to_string(pos_) + ": " + message);
    throw DataError(name_ + ":" + std::to_string(tokens_.line() + line_offset_) + ": " + message);
  }

 private:
  template <typename T>
  static T load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      auto* b = reinterpret_cast<unsigned char*>(&v);
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
    return v;
  }

  static double decode(const char* p, PlyType t) {
    switch (t) {
      case PlyType::Int8: return load<std::int8_t>(p);
      case PlyType::UInt8: return load<std::uint8_t>(p);
      case PlyType::Int16: return load<std::int16_t>(p);
      case PlyType::UInt16: return load<std::uint16_t>(p);
      case PlyType::Int32: return load<std::int32_t>(p);
      case PlyType::UInt32: return load<std::uint32_t>(p);
      case PlyType::Float32: return load<float>(p);
      case PlyType::Float64: return load<double>(p);
    }
    return 0.0;
  }

  const std::string& text_;
  std::size_t pos_;
  bool binary_;
  std::string name_;
  std::string ascii_;
  TokenReader tokens_;
  std::size_t line_offset_ = 0;
};

inline MeshFile parse_ply(const std::string& text, const std::string& name) {
  std::size_t pos = 0, line = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    if (pos >= text.size()) return std::nullopt;
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string l = text.substr(pos, end - pos);
    if (!l.empty() && l.back() == '\r') l.pop_back();
    pos = std::min(text.size(), end + 1);
    ++line;
    return l;
  };
  auto fail = [&](const std::string& m) -> void { throw DataError(name + ":" + std::to_string(line) + ": " + m); };

  auto first = next_line();
  if (!first || *first != "ply") fail("missing 'ply' magic");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    auto l = next_line();
    if (!l) fail("unexpected end of header");
    std::istringstream ls(*l);
    std::string kw;
    ls >> kw;
    if (kw.empty() || kw == "comment" || kw == "obj_info") continue;
    if (kw == "end_header") break;
    if (kw == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else fail("unsupported PLY format '" + fmt + "'");
      have_format = true;
    } else if (kw == "element") {
      PlyElement e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0) fail("malformed element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (elements.empty()) fail("property before any element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        const auto c = ply_type(ct);
        const auto i = ply_type(it);
        if (!c || !i || p.name.empty()) fail("malformed list property");
        p.is_list = true;
        p.count_type = *c;
        p.type = *i;
      } else {
        const auto t = ply_type(type);
        ls >> p.name;
        if (!t || p.name.empty()) fail("malformed property '" + type + "'");
        p.type = *t;
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      fail("unknown header keyword '" + kw + "'");
    }
  }
  if (!have_format) fail("missing format line");

  MeshFile out;
  PlyValueReader values(text, pos, binary, name, line + 1);
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      auto find = [&](const char* n) -> int {
        for (std::size_t i = 0; i < e.properties.size(); ++i) {
          if (e.properties[i].name == n) return static_cast<int>(i);
        }
        return -1;
      };
      const int ix = find("x"), iy = find("y"), iz = find("z");
      if (ix < 0 || iy < 0 || iz < 0) fail("vertex element lacks x/y/z");
      const int inx = find("nx"), iny = find("ny"), inz = find("nz");
      const int itri = find("triangle_id"), ibu = find("bary_u"), ibv = find("bary_v");
      const int ir = find("red"), ig = find("green"), ib = find("blue");
      const bool has_n = inx >= 0 && iny >= 0 && inz >= 0;
      const bool has_p = itri >= 0 && ibu >= 0 && ibv >= 0;
      const bool has_c = ir >= 0 && ig >= 0 && ib >= 0;
      std::vector<double> row(e.properties.size());
      for (std::size_t v = 0; v < e.count; ++v) {
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto& p = e.properties[k];
          if (p.is_list) {
            const auto cnt = static_cast<std::size_t>(values.read(p.count_type));
            for (std::size_t c = 0; c < cnt; ++c) values.read(p.type);
            row[k] = 0.0;
          } else {
            row[k] = values.read(p.type);
          }
        }
        out.mesh.vertices.emplace_back(row[ix], row[iy], row[iz]);
        if (has_n) out.normals.emplace_back(row[inx], row[iny], row[inz]);
        if (has_p) {
          const double u = row[ibu], w = row[ibv];
          if (row[itri] < 0) values.fail("negative triangle_id");
          out.provenance.push_back(Provenance{static_cast<std::uint32_t>(row[itri]), {1.0 - u - w, u, w}});
        }
        if (has_c) {
          out.colors.push_back({static_cast<std::uint8_t>(row[ir]), static_cast<std::uint8_t>(row[ig]),
                                static_cast<std::uint8_t>(row[ib])});
        }
      }
    } else if (e.name == "face") {
      int list = -1;
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        const auto& p = e.properties[i];
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) list = static_cast<int>(i);
      }
      if (list < 0) fail("face element lacks a vertex_indices list");
      for (std::size_t f = 0; f < e.count; ++f) {
        std::vector<long long> idx;
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto& p = e.properties[k];
          if (p.is_list) {
            const auto cnt = static_cast<std::size_t>(values.read(p.count_type));
            for (std::size_t c = 0; c < cnt; ++c) {
              const double v = values.read(p.type);
              if (static_cast<int>(k) == list) idx.push_back(static_cast<long long>(v));
            }
          } else {
            values.read(p.type);
          }
        }
        const auto n = static_cast<long long>(out.mesh.vertices.size());
        for (auto v : idx) {
          if (v < 0 || v >= n) values.fail("face index " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
        }
        if (idx.size() < 3) values.fail("face with fewer than 3 vertices");
        add_polygon(out.mesh, idx, nullptr, name);
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const auto cnt = static_cast<std::size_t>(values.read(p.count_type));
            for (std::size_t c = 0; c < cnt; ++c) values.read(p.type);
          } else {
            values.read(p.type);
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  out.append(buf, sizeof(T));
}

inline bool has_extension(const std::filesystem::path& path, const char* ext) {
  auto e = path.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Reads OFF or PLY (ASCII or binary little-endian), chosen by extension.
inline MeshFile load_mesh_file(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  MeshFile file = detail::has_extension(path, ".off") ? detail::parse_off(text, path.string())
                                                      : detail::parse_ply(text, path.string());
  for (std::size_t f = 0; f < file.mesh.faces.size(); ++f) {
    const auto& t = file.mesh.faces[f];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw DataError(path.string() + ": face " + std::to_string(f) + " repeats a vertex");
    }
  }
  return file;
}

inline TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh_file(path).mesh; }

inline void write_off(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ostringstream s;
  s.precision(17);
  s << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const auto& v : mesh.vertices) s << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) s << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  detail::write_file(path, s.str());
}

/// Binary little-endian PLY. Optional attributes are written when non-empty.
/// Coordinates are float64 unless `float_coordinates` is set.
inline void write_ply(const MeshFile& file, const std::filesystem::path& path, bool float_coordinates = false) {
  const auto& m = file.mesh;
  const auto nv = m.vertices.size();
  const bool has_n = file.normals.size() == nv && nv > 0;
  const bool has_p = file.provenance.size() == nv && nv > 0;
  const bool has_c = file.colors.size() == nv && nv > 0;
  const char* ct = float_coordinates ? "float" : "double";

  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(nv) + "\n";
  for (const char* c : {"x", "y", "z"}) out += std::string("property ") + ct + " " + c + "\n";
  if (has_n) {
    for (const char* c : {"nx", "ny", "nz"}) out += std::string("property ") + ct + " " + c + "\n";
  }
  if (has_p) out += "property uint triangle_id\nproperty float bary_u\nproperty float bary_v\n";
  if (has_c) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(m.faces.size()) + "\nproperty list uchar int vertex_indices\nend_header\n";

  auto put_coord = [&](double v) {
    if (float_coordinates) detail::put(out, static_cast<float>(v));
    else detail::put(out, v);
  };
  for (std::size_t i = 0; i < nv; ++i) {
    for (int c = 0; c < 3; ++c) put_coord(m.vertices[i][c]);
    if (has_n) {
      for (int c = 0; c < 3; ++c) put_coord(file.normals[i][c]);
    }
    if (has_p) {
      detail::put(out, file.provenance[i].triangle);
      detail::put(out, static_cast<float>(file.provenance[i].bary[1]));
      detail::put(out, static_cast<float>(file.provenance[i].bary[2]));
    }
    if (has_c) {
      for (auto c : file.colors[i]) detail::put(out, c);
    }
  }
  for (const auto& f : m.faces) {
    detail::put(out, std::uint8_t{3});
    for (auto v : f) detail::put(out, static_cast<std::int32_t>(v));
  }
  detail::write_file(path, out);
}

/// Writes OFF or binary PLY depending on the extension.
inline void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  if (detail::has_extension(path, ".off")) {
    write_off(mesh, path);
  } else {
    write_ply(MeshFile{mesh, {}, {}, {}}, path);
  }
}

}  // namespace salbench
