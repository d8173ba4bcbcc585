// salbench: command-line front end for computing, scanning and benchmarking
// saliency maps.

#include <salbench/salbench.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace salbench;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAllFailed = 3;

std::vector<ModelTag> parse_models(const std::string& list) {
  std::vector<ModelTag> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      out.assign(kEvaluatedModels.begin(), kEvaluatedModels.end());
      continue;
    }
    const auto tag = parse_model_tag(item);
    if (!tag || *tag == ModelTag::GS) throw Error("unknown model '" + item + "'");
    out.push_back(*tag);
  }
  if (out.empty()) throw Error("no models given");
  return out;
}

void print_warnings(const Warnings& w) {
  for (const auto& m : w) std::cerr << "warning: " << m << '\n';
}

RunConfig make_config(const std::string& params_path) {
  RunConfig c;
  if (!params_path.empty()) c = load_config(params_path);
  return c;
}

int cmd_compute(const std::string& model, const std::string& mesh_path, const std::string& params_path,
                const std::string& gt_path, const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig cfg = make_config(params_path);
  if (seed) cfg.params.seed = *seed;
  const auto tags = parse_models(model);
  if (tags.size() != 1) throw Error("compute takes exactly one model");
  ShapeData shape;
  shape.entry.id = std::filesystem::path(mesh_path).stem().string();
  shape.file = load_mesh_file(mesh_path);
  if (tags[0] == ModelTag::HS) {
    if (gt_path.empty()) throw Error("HS needs --ground-truth");
    shape.truth = load_ground_truth(gt_path, shape.file.mesh, std::nullopt, shape.entry.id, cfg.params.hs_sigma);
  }
  Warnings w;
  const auto map = compute_model(tags[0], shape, cfg.params, &w);
  print_warnings(w);
  const std::filesystem::path out_path(out);
  if (detail::has_extension(out_path, ".ply")) {
    export_colored_map(shape.file.mesh, map, out_path);
  } else {
    write_field(map.values, out_path);
  }
  return kExitOk;
}

int cmd_scan(const std::string& manifest_path, const std::string& out, const std::string& params_path) {
  const RunConfig cfg = make_config(params_path);
  const auto manifest = load_manifest(manifest_path);
  Warnings w;
  const auto scans = generate_scan_dataset(manifest, cfg, out, &w);
  print_warnings(w);
  std::cout << "wrote " << scans.shapes.size() << " scans to " << (std::filesystem::path(out) / "manifest.json").string()
            << '\n';
  return scans.shapes.empty() && !manifest.shapes.empty() ? kExitAllFailed : kExitOk;
}

int cmd_bench(const std::string& manifest_path, const std::string& models, const std::string& out,
              const std::string& params_path, std::optional<std::uint64_t> seed, bool exact_ls, bool export_maps) {
  BenchOptions opts;
  opts.config = make_config(params_path);
  if (seed) opts.config.params.seed = *seed;
  if (exact_ls) opts.config.params.exact_ls = true;
  opts.models = parse_models(models);
  opts.export_maps = export_maps;
  const auto manifest = load_manifest(manifest_path);
  const auto report = run_benchmark(manifest, opts, out);
  print_warnings(report.warnings);
  for (const auto& f : report.failures) {
    std::cerr << "failed: " << f.shape_id << (f.model.empty() ? "" : " " + f.model) << ": " << f.message << '\n';
  }
  std::cout << "model   AUC     NSS     LCC\n";
  const auto auc = rank_models(report.scores, report.models, 0);
  for (const auto& [tag, mean] : auc) {
    std::cout << std::left << std::setw(8) << to_string(tag) << detail::fixed(mean, 4) << "  "
              << detail::fixed(detail::mean_of(detail::metric_column(report.scores, tag, 1)), 4) << "  "
              << detail::fixed(detail::mean_of(detail::metric_column(report.scores, tag, 2)), 4) << '\n';
  }
  std::cout << "report: " << (std::filesystem::path(out) / "report.json").string() << '\n';
  return report.all_failed() ? kExitAllFailed : kExitOk;
}

int cmd_human_curve(const std::string& manifest_path, std::size_t np_max, std::size_t trials, std::uint64_t seed,
                    double sigma, const std::string& out) {
  const auto manifest = load_manifest(manifest_path);
  Warnings w;
  const auto shapes = load_human_shapes(manifest, sigma, &w);
  if (shapes.empty()) throw DataError("no shape could be loaded");
  HumanCurveOptions opts;
  opts.np_max = np_max;
  opts.trials = trials;
  opts.seed = seed;
  opts.sigma = sigma;
  const auto curve = human_performance_curve(shapes, opts, &w);
  print_warnings(w);
  std::ostringstream csv;
  csv << "n_p,auc,nss,lcc,samples\n";
  for (const auto& p : curve) {
    csv << p.n_p << ',' << detail::fixed(p.auc, 6) << ',' << detail::fixed(p.nss, 6) << ','
        << detail::fixed(p.lcc, 6) << ',' << p.samples << '\n';
  }
  if (out.empty()) std::cout << csv.str();
  else detail::write_file(out, csv.str());
  return kExitOk;
}

int cmd_compare(const std::string& report_path, const std::string& test, const std::string& metric) {
  if (test != "wilcoxon") throw Error("unsupported test '" + test + "'");
  int m = 0;
  if (metric == "auc") m = 0;
  else if (metric == "nss") m = 1;
  else if (metric == "lcc") m = 2;
  else throw Error("unknown metric '" + metric + "'");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(report_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path + ": " + e.what());
  }
  std::vector<MetricScores> scores;
  std::vector<ModelTag> models;
  try {
    for (const auto& s : j.at("scores")) {
      const auto tag = parse_model_tag(s.at("model").get<std::string>());
      if (!tag) throw DataError("report names an unknown model");
      scores.push_back(MetricScores{s.at("shape_id").get<std::string>(), *tag, s.at("auc").get<double>(),
                                    s.at("nss").get<double>(), s.at("lcc").get<double>()});
      if (std::find(models.begin(), models.end(), *tag) == models.end()) models.push_back(*tag);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path + ": malformed report: " + e.what());
  }
  const auto p = pairwise_wilcoxon(scores, models, m);
  std::cout << "rank-sum p-values (" << metric << ")\n      ";
  for (auto t : models) std::cout << std::setw(8) << to_string(t);
  std::cout << '\n';
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::cout << std::left << std::setw(6) << to_string(models[i]) << std::right;
    for (std::size_t k = 0; k < models.size(); ++k) std::cout << std::setw(8) << detail::fixed(p[i][k], 4);
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_synth(const std::string& out, std::size_t shapes, std::size_t participants, std::uint64_t seed) {
  synthetic::PlantedDatasetOptions o;
  o.shapes = shapes;
  o.participants = participants;
  o.seed = seed;
  const auto m = synthetic::write_planted_dataset(out, o);
  std::cout << "wrote " << m.shapes.size() << " shapes to " << (std::filesystem::path(out) / "manifest.json").string()
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-set saliency models and their evaluation against human ground truth"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(salbench::kVersion));

  std::string model, mesh, params, gt, out, manifest, models = "LS,MS,CS,PS,RS,HS", report, test = "wilcoxon",
                                                     metric = "auc";
  std::optional<std::uint64_t> seed;
  std::uint64_t curve_seed = 0;
  bool exact_ls = false, export_maps = false;
  std::size_t np_max = 11, trials = 10;
  double sigma = 0.03;

  auto* compute = app.add_subcommand("compute", "Compute one saliency map for a mesh or point set");
  compute->add_option("--model", model, "Model tag: LS, MS, CS, PS, RS or HS")->required();
  compute->add_option("--mesh", mesh, "OFF or PLY input")->required()->check(CLI::ExistingFile);
  compute->add_option("--params", params, "Config file (flat key = value, or JSON)");
  compute->add_option("--ground-truth", gt, "Selections CSV (HS only)");
  compute->add_option("--out", out, "Output: .ply for a coloured map, anything else for one value per line")
      ->required();
  compute->add_option("--seed", seed, "Random seed");

  auto* scan = app.add_subcommand("scan", "Generate 12 simulated range scans per mesh");
  scan->add_option("--manifest", manifest, "Watertight dataset manifest")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out, "Output directory")->required();
  scan->add_option("--params", params, "Config file");

  auto* bench = app.add_subcommand("bench", "Evaluate models on a dataset");
  bench->add_option("--manifest", manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  bench->add_option("--models", models, "Comma-separated model tags, or 'all'")->capture_default_str();
  bench->add_option("--out", out, "Output directory")->required();
  bench->add_option("--params", params, "Config file");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_flag("--exact-ls", exact_ls, "Exact O(n^2) LS distinctiveness");
  bench->add_flag("--export-maps", export_maps, "Write coloured PLY maps");

  auto* curve = app.add_subcommand("human-curve", "Human performance as a function of group size");
  curve->add_option("--manifest", manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  curve->add_option("--np-max", np_max, "Largest group size")->capture_default_str();
  curve->add_option("--trials", trials, "Random splits per group size")->capture_default_str();
  curve->add_option("--seed", curve_seed, "Random seed")->capture_default_str();
  curve->add_option("--sigma", sigma, "Smoothing width as a fraction of R")->capture_default_str();
  curve->add_option("--out", out, "CSV output (default: stdout)");

  auto* compare = app.add_subcommand("compare", "Pairwise significance tests from a report");
  compare->add_option("--report", report, "report.json from bench")->required()->check(CLI::ExistingFile);
  compare->add_option("--test", test, "Statistical test")->capture_default_str();
  compare->add_option("--metric", metric, "auc, nss or lcc")->capture_default_str();

  std::size_t synth_shapes = 4, synth_participants = 8;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a small dataset of shapes with planted salient features");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--shapes", synth_shapes, "Number of shapes")->capture_default_str();
  synth->add_option("--participants", synth_participants, "Simulated participants per shape")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compute) return cmd_compute(model, mesh, params, gt, out, seed);
    if (*scan) return cmd_scan(manifest, out, params);
    if (*bench) return cmd_bench(manifest, models, out, params, seed, exact_ls, export_maps);
    if (*curve) return cmd_human_curve(manifest, np_max, trials, curve_seed, sigma, out);
    if (*compare) return cmd_compare(report, test, metric);
    if (*synth) return cmd_synth(out, synth_shapes, synth_participants, synth_seed);
  } catch (const salbench::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const salbench::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
