#include <salbench/io/colormap.hpp>
#include <salbench/io/config.hpp>
#include <salbench/io/ground_truth_io.hpp>
#include <salbench/io/manifest.hpp>
#include <salbench/io/mesh_io.hpp>
#include <salbench/synthetic.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace salbench;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("salbench_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

// ---- meshes -----------------------------------------------------------------

using MeshIo = TempDir;

TEST_F(MeshIo, MinimalOff) {
  const auto p = write("t.off", "OFF\n# comment\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3 255 0 0\n");
  const auto m = load_mesh(p);
  ASSERT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.faces.size(), 2u);
  EXPECT_EQ(m.faces[1], (std::array<std::uint32_t, 3>{0, 2, 3}));
  EXPECT_EQ(m.vertices[2], Vec3(1, 1, 0));
}

TEST_F(MeshIo, PolygonsAreFanTriangulated) {
  const auto m = load_mesh(write("q.off", "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"));
  EXPECT_EQ(m.faces.size(), 2u);
}

TEST_F(MeshIo, OffErrorsNameTheLine) {
  try {
    load_mesh(write("bad.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.off:6"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_mesh(write("trunc.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n")), DataError);
  EXPECT_THROW(load_mesh(write("magic.off", "FOO\n")), DataError);
  EXPECT_THROW(load_mesh(write("rep.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n")), DataError);
  EXPECT_THROW(load_mesh(dir_ / "missing.off"), DataError);
  EXPECT_THROW(load_mesh(write("x.stl", "solid")), Error);
}

TEST_F(MeshIo, OffRoundTripIsExact) {
  auto m = synthetic::icosphere(2);
  m.vertices[5] = Vec3(0.1, 1.0 / 3.0, -2e-17);
  write_off(m, dir_ / "r.off");
  const auto back = load_mesh(dir_ / "r.off");
  EXPECT_EQ(back.vertices, m.vertices);
  EXPECT_EQ(back.faces, m.faces);
}

TEST_F(MeshIo, AsciiPly) {
  const auto p = write("a.ply",
                       "ply\nformat ascii 1.0\ncomment x\nelement vertex 3\nproperty float x\nproperty float y\n"
                       "property float z\nproperty float nx\nproperty float ny\nproperty float nz\n"
                       "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
                       "0 0 0 0 0 1\n1 0 0 0 0 1\n0 1 0 0 0 1\n3 0 1 2\n");
  const auto f = load_mesh_file(p);
  ASSERT_EQ(f.mesh.vertices.size(), 3u);
  ASSERT_EQ(f.mesh.faces.size(), 1u);
  ASSERT_EQ(f.normals.size(), 3u);
  EXPECT_EQ(f.normals[1], Vec3(0, 0, 1));
}

TEST_F(MeshIo, BinaryPlyRoundTripWithProvenanceAndColors) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  MeshFile f;
  for (int i = 0; i < 60; ++i) {
    f.mesh.vertices.emplace_back(u(rng), u(rng), u(rng));
    f.normals.push_back(Vec3(u(rng), u(rng), u(rng)).normalized());
    const double a = std::fabs(u(rng)) / 10, b = std::fabs(u(rng)) / 10;
    f.provenance.push_back(Provenance{static_cast<std::uint32_t>(rng() % 1000), {1 - a - b, a, b}});
    f.colors.push_back({static_cast<std::uint8_t>(i), 7, 200});
  }
  for (int k = 0; k < 100; ++k) {
    std::uint32_t a = rng() % 60, b = rng() % 60, c = rng() % 60;
    if (a == b || b == c || a == c) continue;
    f.mesh.faces.push_back({a, b, c});
  }
  write_ply(f, dir_ / "b.ply");
  const auto back = load_mesh_file(dir_ / "b.ply");
  EXPECT_EQ(back.mesh.vertices, f.mesh.vertices);
  EXPECT_EQ(back.mesh.faces, f.mesh.faces);
  EXPECT_EQ(back.colors, f.colors);
  ASSERT_EQ(back.provenance.size(), 60u);
  for (std::size_t i = 0; i < 60; ++i) {
    EXPECT_EQ(back.provenance[i].triangle, f.provenance[i].triangle);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(back.provenance[i].bary[k], f.provenance[i].bary[k], 1e-6);
    EXPECT_NEAR((back.normals[i] - f.normals[i]).norm(), 0.0, 1e-6);
  }
}

TEST_F(MeshIo, TruncatedBinaryPlyFails) {
  MeshFile f;
  f.mesh = synthetic::icosphere(1);
  write_ply(f, dir_ / "t.ply");
  auto bytes = slurp(dir_ / "t.ply");
  bytes.resize(bytes.size() - 20);
  EXPECT_THROW(load_mesh(write("cut.ply", bytes)), DataError);
}

// ---- ground truth -------------------------------------------------------------

using GroundTruthIo = TempDir;

TEST_F(GroundTruthIo, ParticipantsAndDedup) {
  const auto mesh = synthetic::icosphere(1);
  const auto csv = write("g.csv", "participant,vertex\nbob,4\nann,2\nbob,1\nbob,4\nann,7\n");
  const auto gt = load_ground_truth(csv, mesh, std::nullopt, "g");
  ASSERT_EQ(gt.participants.size(), 2u);
  EXPECT_EQ(gt.participants[0], (std::vector<std::uint32_t>{1, 4}));
  EXPECT_EQ(gt.participants[1], (std::vector<std::uint32_t>{2, 7}));
  EXPECT_EQ(gt.fixations(), (std::vector<std::uint32_t>{1, 2, 4, 7}));
  ASSERT_EQ(gt.field.size(), mesh.vertices.size());
  EXPECT_DOUBLE_EQ(*std::max_element(gt.field.begin(), gt.field.end()), 1.0);
}

TEST_F(GroundTruthIo, FieldFileIsUsedVerbatim) {
  const auto mesh = synthetic::icosphere(0);
  std::string field;
  for (int i = 0; i < 12; ++i) field += std::to_string(i / 11.0) + "\n";
  const auto gt = load_ground_truth(write("g.csv", "p,3\n"), mesh, write("g.field", field));
  EXPECT_NEAR(gt.field[11], 1.0, 1e-6);
  EXPECT_NEAR(gt.field[3], 3 / 11.0, 1e-6);
  EXPECT_THROW(load_ground_truth(write("g2.csv", "p,3\n"), mesh, write("short.field", "0.1\n0.2\n")), DataError);
}

TEST_F(GroundTruthIo, Errors) {
  const auto mesh = synthetic::icosphere(0);
  EXPECT_THROW(load_ground_truth(write("oob.csv", "p,12\n"), mesh), DataError);
  EXPECT_THROW(load_ground_truth(write("neg.csv", "p,-1\n"), mesh), DataError);
  EXPECT_THROW(load_ground_truth(write("empty.csv", ""), mesh), DataError);
  EXPECT_THROW(load_ground_truth(write("hdr.csv", "participant,vertex\n"), mesh), DataError);
}

TEST_F(GroundTruthIo, WriteAndReloadAgree) {
  const auto mesh = synthetic::icosphere(2);
  GroundTruth gt;
  gt.participants = {{1, 5, 9}, {5, 100}};
  gt.field = synthesize_field(mesh.vertices, gt.participants);
  write_ground_truth(gt, dir_ / "w.csv");
  write_field(gt.field, dir_ / "w.field");
  const auto back = load_ground_truth(dir_ / "w.csv", mesh, dir_ / "w.field");
  EXPECT_EQ(back.participants, gt.participants);
  EXPECT_EQ(back.field, gt.field);
}

TEST(SynthesizedField, ZeroSigmaIsProportionalToCounts) {
  const auto mesh = synthetic::plane_grid(6, 6);
  const std::vector<std::vector<std::uint32_t>> parts{{0, 7, 20}, {7, 20}, {7}};
  const auto f = synthesize_field(mesh.vertices, parts, 0.0);
  EXPECT_DOUBLE_EQ(f[7], 1.0);
  EXPECT_NEAR(f[20], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(f[0], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(f[1], 0.0);
}

// ---- config ---------------------------------------------------------------------

using ConfigIo = TempDir;

TEST_F(ConfigIo, TextAndJson) {
  const auto t = load_config(write("p.cfg", "# radii\nr_low = 0.05\nK: 40\nimage_width = \"128\"\n"));
  EXPECT_EQ(t.params.r_low, 0.05);
  EXPECT_EQ(t.params.clusters, 40u);
  EXPECT_EQ(t.scan.image_width, 128);
  EXPECT_EQ(t.params.r_high, ModelParams{}.r_high);
  const auto j = load_config(write("p.json", R"({"r_high": 0.2, "n_freq": 5, "icosahedron_scale": 3})"));
  EXPECT_EQ(j.params.r_high, 0.2);
  EXPECT_EQ(j.params.n_freq, 5u);
  EXPECT_EQ(j.scan.icosahedron_scale, 3.0);
  const auto dumped = config_to_json(j);
  EXPECT_EQ(dumped["r_high"].get<double>(), 0.2);
  const auto again = parse_config_json(nlohmann::json::parse(dumped.dump()));
  EXPECT_EQ(config_to_json(again), dumped);
}

TEST_F(ConfigIo, Errors) {
  EXPECT_THROW(load_config(write("u.cfg", "bogus = 1\n")), Error);
  EXPECT_THROW(load_config(write("v.cfg", "r_low = abc\n")), Error);
  EXPECT_THROW(load_config(write("w.cfg", "r_low = -1\n")), Error);
  EXPECT_THROW(load_config(write("x.json", "{broken")), Error);
}

// ---- manifest -------------------------------------------------------------------

using ManifestIo = TempDir;

TEST_F(ManifestIo, RoundTripAndResolve) {
  write("a.off", "OFF\n0 0 0\n");
  write("a.csv", "p,0\n");
  const auto p = write("m.json", R"({"kind": "watertight", "shapes": [
      {"id": "a", "mesh": "a.off", "ground_truth": "a.csv", "class": "Cup"}]})");
  const auto m = load_manifest(p);
  ASSERT_EQ(m.shapes.size(), 1u);
  EXPECT_EQ(m.shapes[0].class_label, "Cup");
  EXPECT_EQ(m.resolve(m.shapes[0].mesh), dir_ / "a.off");
  write_manifest(m, dir_ / "m2.json");
  const auto again = load_manifest(dir_ / "m2.json");
  EXPECT_EQ(again.shapes[0].id, "a");
  EXPECT_EQ(again.kind, DatasetKind::Watertight);
}

TEST_F(ManifestIo, Errors) {
  write("a.off", "OFF\n0 0 0\n");
  write("a.csv", "p,0\n");
  EXPECT_THROW(load_manifest(write("dup.json", R"({"shapes": [
      {"id": "a", "mesh": "a.off", "ground_truth": "a.csv", "class": "C"},
      {"id": "a", "mesh": "a.off", "ground_truth": "a.csv", "class": "C"}]})")),
               DataError);
  EXPECT_THROW(load_manifest(write("miss.json", R"({"shapes": [
      {"id": "b", "mesh": "b.off", "ground_truth": "a.csv", "class": "C"}]})")),
               DataError);
  EXPECT_THROW(load_manifest(write("kind.json", R"({"kind": "soup", "shapes": []})")), DataError);
  EXPECT_THROW(load_manifest(write("bad.json", "[")), DataError);
}

// ---- colormap -------------------------------------------------------------------

TEST(Colormap, EndpointsAndMidpoint) {
  EXPECT_EQ(colormap(0.0), (Rgb{62, 38, 168}));
  EXPECT_EQ(colormap(-3.0), (Rgb{62, 38, 168}));
  EXPECT_EQ(colormap(1.0), (Rgb{249, 251, 14}));
  // 0.5 selects entry 128, i.e. 128/255 of the way: just past the middle stop.
  EXPECT_EQ(colormap(0.5), (Rgb{57, 185, 157}));
}

TEST(Colormap, TableIsMonotoneInBrightness) {
  const auto& t = colormap_table();
  auto luma = [](const Rgb& c) { return 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]; };
  for (std::size_t i = 1; i < 256; ++i) EXPECT_GE(luma(t[i]) + 1.0, luma(t[i - 1]));
}

using ColormapIo = TempDir;

TEST_F(ColormapIo, ExportWritesColoursAndChecksLength) {
  const auto mesh = synthetic::icosphere(1);
  SaliencyMap m{"s", ModelTag::LS, std::vector<double>(mesh.vertices.size())};
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = static_cast<double>(i) / (m.size() - 1);
  export_colored_map(mesh, m, dir_ / "c.ply");
  const auto back = load_mesh_file(dir_ / "c.ply");
  ASSERT_EQ(back.colors.size(), mesh.vertices.size());
  EXPECT_EQ(back.colors.front(), colormap(0.0));
  EXPECT_EQ(back.colors.back(), colormap(1.0));
  EXPECT_EQ(back.mesh.faces, mesh.faces);
  m.values.pop_back();
  EXPECT_THROW(export_colored_map(mesh, m, dir_ / "d.ply"), Error);
}
