#include <gtest/gtest.h>

#include <cmath>

#include "wvar/wvar.hpp"

using namespace wvar;

TEST(Pipeline, OlsMatchesClosedForm) {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y = {1.1, 2.9, 5.2, 6.8, 9.1};
  // Normal equations solved by hand: slope = Sxy / Sxx with Sxx = 10.
  const double sxy = (-2) * (1.1 - 5.02) + (-1) * (2.9 - 5.02) + 0 + 1 * (6.8 - 5.02) + 2 * (9.1 - 5.02);
  const LineFit f = ols(x, y);
  EXPECT_NEAR(f.slope, sxy / 10.0, 1e-14);
  EXPECT_NEAR(f.intercept, 5.02 - 2.0 * sxy / 10.0, 1e-13);
  double rss = 0.0;
  for (int i = 0; i < 5; ++i) rss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  EXPECT_NEAR(f.slope_stderr, std::sqrt(rss / 3.0 / 10.0), 1e-14);
  const LineFit exact = ols({1, 2, 3}, {3, 5, 7});
  EXPECT_NEAR(exact.slope, 2.0, 1e-15);
  EXPECT_NEAR(exact.slope_stderr, 0.0, 1e-15);
}

TEST(Pipeline, PlanarResolution) {
  for (std::int64_t n = 12; n < 5000; n += 37) {
    const int m = planar_resolution(n);
    EXPECT_EQ(m % 2, 0);
    EXPECT_LE(static_cast<std::int64_t>(m) * (m - 1), n);
    EXPECT_GT(static_cast<std::int64_t>(m + 2) * (m + 1), n);
  }
  EXPECT_THROW(planar_resolution(11), BelowResolution);
}

TEST(Pipeline, RandomCombinationHasRequestedCost) {
  const WeightFn wf = WeightFn::ball_power(2);
  CombinationSpec spec;
  spec.atoms = 50;
  spec.budget = 2.5;
  spec.seed = 4;
  const AtomCombination f = random_combination(spec, Domain::ball(2), wf);
  double cost = 0.0;
  for (const auto& t : f.terms()) cost += std::abs(t.coef) * (1.0 - t.atom.offset);
  EXPECT_NEAR(cost, 2.5, 1e-12);
  EXPECT_EQ(f.size(), 50u);
  const AtomCombination g = random_combination_l1(spec, Domain::ball(2), 3.0);
  EXPECT_NEAR(g.l1_mass(), 3.0, 1e-12);
  const AtomCombination again = random_combination(spec, Domain::ball(2), wf);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.terms()[i].coef, again.terms()[i].coef);
}

TEST(Pipeline, SquareOffsetsStayInRange) {
  CombinationSpec spec;
  spec.atoms = 100;
  spec.seed = 2;
  const AtomCombination f = random_combination(spec, Domain::square(), WeightFn::square_chord_sqrt());
  for (const auto& t : f.terms())
    EXPECT_LE(std::abs(t.atom.offset), t.atom.direction.cwiseAbs().sum() + 1e-12);
}

TEST(Pipeline, ApproximatorKinds) {
  const AtomApproximator a(Domain::ball(2), 56);
  EXPECT_EQ(a.m(), 8);
  EXPECT_EQ(a(Atom(unit_vector(2, 0), 1.0)).kind, "inactive");
  EXPECT_EQ(a(Atom(unit_vector(2, 0), -1.0)).kind, "affine-global");
  const AtomApproximator b(Domain::ball(3), 1000);
  EXPECT_EQ(b.dimension(), dictionary_size(3, dictionary_level(3, 1000)));
  EXPECT_NE(b.dictionary(), nullptr);
}

TEST(Pipeline, OutputErrorMatchesDirectEvaluation) {
  const Domain disk = Domain::ball(2);
  const WeightFn wf = WeightFn::ball_power(2);
  CombinationSpec spec;
  spec.atoms = 30;
  spec.seed = 8;
  const AtomCombination f = random_combination(spec, disk, wf);
  MaureyConfig cfg;
  cfg.seed = 3;
  const PipelineResult r = approximate_function(f, 240, wf, disk, cfg, QuadratureSpec::monte_carlo(100000, 5));
  const double direct = l2_error(f, r.output, disk, QuadratureSpec::monte_carlo(400000, 77));
  EXPECT_NEAR(r.error, direct, 0.1 * direct + 4.0 * r.error_stderr);
  EXPECT_EQ(r.m, 16);
}

TEST(Pipeline, ErrorDecreasesWithBudget) {
  for (int d : {2, 3}) {
    const Domain dom = Domain::ball(d);
    const WeightFn wf = WeightFn::ball_power(d);
    CombinationSpec spec;
    spec.atoms = 40;
    spec.seed = 12;
    const AtomCombination f = random_combination(spec, dom, wf);
    MaureyConfig cfg;
    cfg.seed = 1;
    const std::vector<std::int64_t> ns = d == 2 ? std::vector<std::int64_t>{56, 992} : std::vector<std::int64_t>{120, 3000};
    const double e0 = approximate_function(f, ns[0], wf, dom, cfg, QuadratureSpec::monte_carlo(50000, 2)).error;
    const double e1 = approximate_function(f, ns[1], wf, dom, cfg, QuadratureSpec::monte_carlo(50000, 2)).error;
    EXPECT_LT(e1, e0) << "d=" << d;
  }
}

TEST(Pipeline, BelowResolutionCellsAreSkipped) {
  RateOptions opt;
  opt.maurey.trials = 2;
  opt.quadrature = QuadratureSpec::monte_carlo(20000, 1);
  const RateReport r =
      rate_experiment(Generator::single_atom(0.5, 1), {6, 56, 240, 992}, Domain::ball(2), WeightFn::ball_power(2), opt);
  EXPECT_EQ(r.entries[0].note.rfind("skipped", 0), 0u);
  EXPECT_FALSE(r.entries[0].used);
  EXPECT_TRUE(r.fitted);
  EXPECT_LT(r.fitted_slope, 0.0);
}

TEST(Pipeline, TargetSlopes) {
  EXPECT_DOUBLE_EQ(target_slope(GeneratorKind::SingleAtom, 2), -0.75);
  EXPECT_DOUBLE_EQ(target_slope(GeneratorKind::RandomCombination, 2), -1.25);
  EXPECT_DOUBLE_EQ(target_slope(GeneratorKind::RandomCombination, 3), -1.0);
}

TEST(Pipeline, FitRateDropsPreAsymptoticPoint) {
  RateReport rep;
  for (auto [n, e] : std::vector<std::pair<int, double>>{{10, 1.0}, {20, 1.0}, {40, 0.5}, {80, 0.25}}) {
    RateEntry x;
    x.n = n;
    x.error = e;
    x.error_stderr = 0.01;
    rep.entries.push_back(x);
  }
  fit_rate(rep);
  EXPECT_FALSE(rep.entries[0].used);
  EXPECT_NEAR(rep.fitted_slope, std::log(0.25) / std::log(4.0), 1e-12);
}

TEST(Pipeline, WeightedComparisonHasEqualMass) {
  RateOptions opt;
  opt.maurey.trials = 2;
  opt.quadrature = QuadratureSpec::monte_carlo(20000, 1);
  const ComparisonReport c =
      weighted_vs_unweighted(Domain::ball(2), WeightFn::ball_power(2), {56, 240}, 40, 1.0, 3, opt);
  EXPECT_LT(c.vw_boundary, c.vw_bulk);
  EXPECT_LE(c.vw_boundary, 0.1 + 1e-12);  // (1 - t) <= 0.1 on [0.9, 0.999]
  ASSERT_EQ(c.rows.size(), 2u);
  EXPECT_TRUE(c.boundary_smaller_everywhere());
}
