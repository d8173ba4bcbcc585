#pragma once

#include <salbench/evaluation/histogram.hpp>
#include <salbench/evaluation/metrics.hpp>
#include <salbench/models/baselines.hpp>
#include <salbench/random.hpp>

#include <numeric>
#include <span>
#include <vector>

namespace salbench {

struct HumanShape {
  std::vector<Vec3> vertices;
  GroundTruth truth;
};

struct HumanCurveOptions {
  std::size_t np_max = 11;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  double sigma = 0.03;         // smoothing as a fraction of R
  std::size_t bins = 256;
  bool same_groups = false;    // test hook: evaluators = predictors
};

struct HumanCurvePoint {
  std::size_t n_p = 0;
  double auc = 0.0, nss = 0.0, lcc = 0.0;
  std::size_t samples = 0;  // (trial, shape) pairs averaged
};

/// How well n_p participants predict another n_p, for n_p = 1..np_max.
/// Every trial draws disjoint predictor and evaluator groups without
/// replacement; predictions are histogram-matched to the mean ground-truth
/// distribution before scoring.
inline std::vector<HumanCurvePoint> human_performance_curve(std::span<const HumanShape> shapes,
                                                            const HumanCurveOptions& options,
                                                            Warnings* warnings = nullptr) {
  if (shapes.empty()) throw Error("human performance curve needs at least one shape");
  std::vector<std::vector<double>> fields;
  for (const auto& s : shapes) fields.push_back(s.truth.field);
  const ReferenceCdf ref = reference_histogram(fields, options.bins);

  Rng rng(options.seed);
  std::vector<HumanCurvePoint> curve;
  for (std::size_t np = 1; np <= options.np_max; ++np) {
    HumanCurvePoint point;
    point.n_p = np;
    const std::size_t needed = options.same_groups ? np : 2 * np;
    std::size_t eligible = 0;
    for (const auto& s : shapes) eligible += s.truth.participants.size() >= needed ? 1 : 0;
    if (eligible == 0) {
      throw Error("no shape has " + std::to_string(needed) + " participants for n_p = " + std::to_string(np));
    }
    if (eligible < shapes.size()) {
      warn(warnings, std::to_string(shapes.size() - eligible) + " shape(s) skipped at n_p = " + std::to_string(np));
    }

    for (std::size_t trial = 0; trial < options.trials; ++trial) {
      for (const auto& s : shapes) {
        const auto& parts = s.truth.participants;
        if (parts.size() < needed) continue;
        std::vector<std::size_t> order(parts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(std::span<std::size_t>(order), rng);
        const std::vector<std::size_t> predictors(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(np));
        const std::vector<std::size_t> evaluators =
            options.same_groups ? predictors
                                : std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(np),
                                                           order.begin() + static_cast<std::ptrdiff_t>(2 * np));

        std::vector<std::vector<std::uint32_t>> eval_sel;
        for (auto e : evaluators) eval_sel.push_back(parts[e]);
        GroundTruth eval_truth{s.truth.shape_id, {}, eval_sel};
        const auto fix = eval_truth.fixations();
        if (fix.empty() || fix.size() >= s.vertices.size()) continue;

        const auto prediction = histogram_match(compute_hs(parts, predictors, s.vertices, options.sigma), ref);
        const auto eval_field = compute_hs(parts, evaluators, s.vertices, options.sigma);
        point.auc += roc_auc(prediction.values, fix);
        point.nss += nss(prediction.values, eval_sel);
        point.lcc += lcc(eval_field.values, prediction.values);
        ++point.samples;
      }
    }
    if (point.samples > 0) {
      const double k = static_cast<double>(point.samples);
      point.auc /= k;
      point.nss /= k;
      point.lcc /= k;
    }
    curve.push_back(point);
  }
  return curve;
}

}  // namespace salbench
