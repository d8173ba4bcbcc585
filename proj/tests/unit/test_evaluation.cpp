#include "../support/oracles.hpp"

#include <salbench/evaluation/aggregate.hpp>
#include <salbench/evaluation/histogram.hpp>
#include <salbench/evaluation/human.hpp>
#include <salbench/evaluation/metrics.hpp>
#include <salbench/evaluation/wilcoxon.hpp>
#include <salbench/synthetic.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace salbench;

namespace {

std::vector<double> uniform_values(std::mt19937_64& rng, std::size_t n, bool with_ties) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = with_ties ? std::floor(u(rng) * 6) / 5 : u(rng);
  return v;
}

}  // namespace

// ---- AUC --------------------------------------------------------------------

TEST(Auc, MatchesPairEnumeration) {
  std::mt19937_64 rng(91);
  for (bool ties : {false, true}) {
    for (int t = 0; t < 20; ++t) {
      const auto v = uniform_values(rng, 60, ties);
      std::vector<std::uint32_t> pos;
      for (std::uint32_t i = 0; i < 60; ++i) {
        if (rng() % 4 == 0) pos.push_back(i);
      }
      if (pos.empty()) pos.push_back(0);
      EXPECT_NEAR(roc_auc(v, pos), oracle::auc_pairs(v, pos), 1e-12);
    }
  }
}

TEST(Auc, IndicatorMapIsPerfect) {
  std::vector<double> v(50, 0.0);
  const std::vector<std::uint32_t> pos{3, 9, 27};
  for (auto p : pos) v[p] = 1.0;
  EXPECT_DOUBLE_EQ(roc_auc(v, pos), 1.0);
  for (auto& x : v) x = 1.0 - x;
  EXPECT_DOUBLE_EQ(roc_auc(v, pos), 0.0);
}

TEST(Auc, ConstantMapIsChance) {
  const std::vector<double> v(40, 0.3);
  const std::vector<std::uint32_t> pos{1, 2, 30};
  EXPECT_DOUBLE_EQ(roc_auc(v, pos), 0.5);
}

TEST(Auc, DegeneratePositiveSetThrows) {
  const std::vector<double> v{0.1, 0.2, 0.3};
  EXPECT_THROW(roc_auc(v, std::vector<std::uint32_t>{}), Error);
  EXPECT_THROW(roc_auc(v, std::vector<std::uint32_t>{0, 1, 2}), Error);
}

TEST(Auc, DuplicateFixationsCountOnce) {
  const std::vector<double> v{0.1, 0.9, 0.5, 0.2};
  EXPECT_DOUBLE_EQ(roc_auc(v, std::vector<std::uint32_t>{1, 1, 2}), roc_auc(v, std::vector<std::uint32_t>{1, 2}));
}

// ---- NSS / LCC --------------------------------------------------------------

TEST(Nss, SingleSelectionIsStandardScore) {
  const std::vector<double> v{0, 1, 2, 3};
  const std::vector<std::vector<std::uint32_t>> parts{{3}};
  EXPECT_NEAR(nss(v, parts), 3.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(nss(v, parts), 1.3416, 1e-4);
}

TEST(Nss, ConstantMapScoresZero) {
  const std::vector<double> v(10, 0.7);
  const std::vector<std::vector<std::uint32_t>> parts{{1, 2}, {5}};
  EXPECT_EQ(nss(v, parts), 0.0);
}

TEST(Nss, AveragesParticipantsAndIgnoresRepeats) {
  const std::vector<double> v{0, 1, 2, 3};
  const std::vector<std::vector<std::uint32_t>> a{{3}, {0}};
  EXPECT_NEAR(nss(v, a), 0.0, 1e-12);
  const std::vector<std::vector<std::uint32_t>> b{{3, 3, 3}};
  EXPECT_NEAR(nss(v, b), 3.0 / std::sqrt(5.0), 1e-12);
}

TEST(Nss, EmptyParticipantWarnsAndAllEmptyThrows) {
  const std::vector<double> v{0, 1, 2, 3};
  Warnings w;
  const std::vector<std::vector<std::uint32_t>> a{{3}, {}};
  EXPECT_NEAR(nss(v, a, &w), 3.0 / std::sqrt(5.0), 1e-12);
  EXPECT_EQ(w.size(), 1u);
  const std::vector<std::vector<std::uint32_t>> none{{}};
  EXPECT_THROW(nss(v, none), Error);
}

TEST(Lcc, Cases) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_NEAR(lcc(x, x), 1.0, 1e-15);
  const std::vector<double> neg{4, 3, 2, 1};
  EXPECT_NEAR(lcc(x, neg), 1.0, 1e-15);
  const std::vector<double> flat{2, 2, 2, 2};
  EXPECT_EQ(lcc(x, flat), 0.0);
  std::vector<double> ramp(10), tenths(10, 0.1);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  EXPECT_EQ(lcc(ramp, tenths), 0.0);
  const std::vector<double> y{1, 3, 2, 5};
  // Centred sums: sxy = 5.5, sxx = 5, syy = 8.75.
  EXPECT_NEAR(lcc(x, y), 5.5 / std::sqrt(5.0 * 8.75), 1e-12);
  EXPECT_THROW(lcc(x, std::vector<double>{1, 2}), Error);
}

// ---- histogram matching -------------------------------------------------------

TEST(Histogram, ReferenceIsAverageOfPerFieldHistograms) {
  std::mt19937_64 rng(92);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> fields(3);
  fields[0].resize(100);
  fields[1].resize(250);
  fields[2].resize(40);
  for (auto& f : fields) {
    for (auto& x : f) x = u(rng) * u(rng);
  }
  fields[2][0] = 1.0;
  const std::size_t bins = 16;
  const auto ref = reference_histogram(fields, bins);
  std::vector<double> mean(bins, 0.0);
  for (const auto& f : fields) {
    std::vector<double> h(bins, 0.0);
    for (auto x : f) h[std::min<std::size_t>(bins - 1, static_cast<std::size_t>(x * bins))] += 1.0 / f.size();
    for (std::size_t b = 0; b < bins; ++b) mean[b] += h[b] / 3.0;
  }
  double acc = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    acc += mean[b];
    EXPECT_NEAR(ref.cdf[b], acc, 1e-12);
  }
  EXPECT_EQ(ref.cdf.back(), 1.0);
}

TEST(Histogram, MatchedMapFollowsReference) {
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> fields(1, std::vector<double>(5000));
  for (auto& x : fields[0]) x = std::pow(u(rng), 3.0);
  const auto ref = reference_histogram(fields, 256);
  SaliencyMap m{"s", ModelTag::RS, std::vector<double>(4000)};
  for (auto& x : m.values) x = u(rng);
  const auto out = histogram_match(m, ref);
  EXPECT_LT(oracle::ks_distance(out.values, [&](double x) { return ref.at(x); }), 2.0 / 256.0);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = 0; j < 200; ++j) {
      if (m.values[i] < m.values[j]) {
        EXPECT_LE(out.values[i], out.values[j]);
      }
    }
  }
}

TEST(Histogram, SelfMatchIsNearIdentity) {
  std::mt19937_64 rng(94);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> fields(1, std::vector<double>(20000));
  for (auto& x : fields[0]) x = u(rng);
  const auto ref = reference_histogram(fields, 256);
  SaliencyMap m{"s", ModelTag::LS, fields[0]};
  const auto out = histogram_match(m, ref);
  for (std::size_t i = 0; i < 2000; ++i) EXPECT_NEAR(out.values[i], m.values[i], 2.0 / 256.0);
}

TEST(Histogram, ConstantMapGoesToMedianWithWarning) {
  std::vector<std::vector<double>> fields{{0.0, 0.25, 0.5, 0.75, 1.0}};
  const auto ref = reference_histogram(fields, 4);
  SaliencyMap m{"s", ModelTag::LS, std::vector<double>(7, 0.2)};
  Warnings w;
  const auto out = histogram_match(m, ref, &w);
  for (auto v : out.values) EXPECT_DOUBLE_EQ(v, ref.quantile(0.5));
  EXPECT_EQ(w.size(), 1u);
}

TEST(Histogram, Errors) {
  EXPECT_THROW(reference_histogram(std::vector<std::vector<double>>{}), Error);
  const std::vector<std::vector<double>> f{{0.5}};
  EXPECT_THROW(reference_histogram(f, 1), Error);
}

// ---- Wilcoxon -----------------------------------------------------------------

TEST(Wilcoxon, SmallSamplesMatchEnumeration) {
  std::mt19937_64 rng(95);
  for (int t = 0; t < 30; ++t) {
    const std::size_t na = 2 + rng() % 7, nb = 2 + rng() % 9;
    const auto a = uniform_values(rng, na, t % 2 == 0);
    const auto b = uniform_values(rng, nb, t % 2 == 0);
    const auto r = wilcoxon_rank_sum(a, b);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.p_value, oracle::rank_sum_enumeration(a, b), 1e-12);
  }
}

TEST(Wilcoxon, SeparatedTriples) {
  const std::vector<double> a{1, 2, 3}, b{10, 11, 12};
  const auto r = wilcoxon_rank_sum(a, b);
  EXPECT_NEAR(r.p_value, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(r.statistic, 6.0);
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  EXPECT_NEAR(wilcoxon_rank_sum(b, a).p_value, 0.1, 1e-12);
}

TEST(Wilcoxon, LargeSamplesUseCorrectedNormalApproximation) {
  std::vector<double> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = (i * 7 % 31) / 10.0;
    b[i] = (i * 11 % 37) / 10.0 + 0.5;
  }
  const auto r = wilcoxon_rank_sum(a, b);
  EXPECT_FALSE(r.exact);
  // Reference: two-sided asymptotic Mann-Whitney with continuity and tie correction.
  EXPECT_DOUBLE_EQ(r.u, 266.0);
  EXPECT_NEAR(r.p_value, 0.006652200701045182, 1e-9);
}

TEST(Wilcoxon, EmptySampleThrows) {
  EXPECT_THROW(wilcoxon_rank_sum(std::vector<double>{}, std::vector<double>{1.0}), Error);
}

// ---- aggregation ------------------------------------------------------------------

TEST(Aggregate, StudentIntervalForTwoSamples) {
  const std::vector<double> s{0.6, 0.7};
  const auto ci = confidence_interval(s);
  EXPECT_NEAR(ci.mean, 0.65, 1e-12);
  EXPECT_NEAR(ci.half_width, 0.635, 5e-4);
  EXPECT_NEAR(ci.half_width, 12.706204736174698 * std::sqrt(0.005) / std::sqrt(2.0), 1e-9);
}

TEST(Aggregate, SingleSampleHasZeroWidth) {
  const std::vector<double> s{0.8};
  const auto ci = confidence_interval(s);
  EXPECT_DOUBLE_EQ(ci.mean, 0.8);
  EXPECT_EQ(ci.half_width, 0.0);
}

TEST(Aggregate, ClassesOrderedByMeanAuc) {
  std::vector<MetricScores> scores{
      {"a1", ModelTag::LS, 0.6, 0.1, 0.2}, {"a2", ModelTag::LS, 0.7, 0.2, 0.3},
      {"b1", ModelTag::LS, 0.9, 0.5, 0.5}, {"b2", ModelTag::LS, 0.8, 0.4, 0.4},
      {"a1", ModelTag::RS, 0.5, 0.0, 0.0}, {"a2", ModelTag::RS, 0.5, 0.0, 0.0},
      {"b1", ModelTag::RS, 0.5, 0.0, 0.0}, {"b2", ModelTag::RS, 0.5, 0.0, 0.0},
      {"c1", ModelTag::LS, 0.4, 0.0, 0.0},
  };
  const std::map<std::string, std::string> cls{{"a1", "Ant"}, {"a2", "Ant"}, {"b1", "Bird"}, {"b2", "Bird"},
                                               {"c1", "Cup"}};
  Warnings w;
  const auto out = aggregate_by_class(scores, cls, &w);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].class_name, "Bird");
  EXPECT_EQ(out[1].class_name, "Ant");
  EXPECT_EQ(out[2].class_name, "Cup");
  EXPECT_NEAR(out[0].models.at(ModelTag::LS).auc.mean, 0.85, 1e-12);
  EXPECT_EQ(out[0].models.at(ModelTag::LS).count, 2u);
  EXPECT_EQ(w.size(), 1u);
  const std::map<std::string, std::string> missing{{"a1", "Ant"}};
  EXPECT_THROW(aggregate_by_class(scores, missing), DataError);
}

// ---- human performance ----------------------------------------------------------

namespace {

std::vector<HumanShape> planted_human_shapes(std::size_t participants) {
  std::vector<HumanShape> shapes;
  std::mt19937_64 rng(96);
  for (int s = 0; s < 3; ++s) {
    const auto planted = synthetic::bumped_sphere(3, {Vec3(0, 0, 1), Vec3(0, 1, 0)});
    HumanShape h;
    h.vertices = planted.mesh.vertices;
    h.truth.shape_id = "s" + std::to_string(s);
    h.truth.participants = synthetic::plant_selections(planted.mesh, planted.features, participants, 0.1, rng);
    std::vector<std::size_t> all(participants);
    std::iota(all.begin(), all.end(), std::size_t{0});
    h.truth.field = compute_hs(h.truth.participants, all, h.vertices, 0.03).values;
    shapes.push_back(std::move(h));
  }
  return shapes;
}

}  // namespace

TEST(HumanCurve, TooFewParticipantsThrows) {
  const auto shapes = planted_human_shapes(4);
  HumanCurveOptions o;
  o.np_max = 3;
  EXPECT_THROW(human_performance_curve(shapes, o), Error);
}

TEST(HumanCurve, SameGroupsPredictThemselves) {
  const auto shapes = planted_human_shapes(6);
  HumanCurveOptions o;
  o.np_max = 3;
  o.trials = 3;
  o.same_groups = true;
  const auto curve = human_performance_curve(shapes, o);
  ASSERT_EQ(curve.size(), 3u);
  for (const auto& p : curve) {
    EXPECT_GT(p.auc, 0.9);
    EXPECT_EQ(p.samples, 9u);
  }
}

TEST(HumanCurve, DeterministicAndImprovesWithGroupSize) {
  const auto shapes = planted_human_shapes(10);
  HumanCurveOptions o;
  o.np_max = 5;
  o.trials = 4;
  o.seed = 17;
  const auto a = human_performance_curve(shapes, o);
  const auto b = human_performance_curve(shapes, o);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].auc, b[i].auc);
    EXPECT_EQ(a[i].nss, b[i].nss);
    EXPECT_EQ(a[i].lcc, b[i].lcc);
    EXPECT_GT(a[i].auc, 0.5);
  }
  EXPECT_GT(a.back().lcc, a.front().lcc);
}
