#include <gtest/gtest.h>

#include <cmath>

#include "wvar/wvar.hpp"

using namespace wvar;

namespace {

ShallowNet random_net(int d, int n, std::uint64_t seed) {
  Rng rng(seed);
  ShallowNet net;
  net.dim = d;
  for (int j = 0; j < n; ++j)
    net.neurons.push_back({random_direction(d, rng) * uniform(rng, 0.2, 3.0), uniform(rng, -1.5, 1.5),
                           uniform(rng, -2.0, 2.0)});
  return net;
}

double relu(double z) { return z > 0 ? z : 0.0; }

}  // namespace

TEST(Training, RescalingLeavesFunctionAndWeightedNormUnchanged) {
  for (int d : {2, 3}) {
    const WeightFn wf = WeightFn::ball_power(d);
    const ShallowNet net = random_net(d, 15, 1 + d);
    Rng rng(9);
    Mat pts(d, 100);
    for (int i = 0; i < 100; ++i) pts.col(i) = sample_ball(d, rng);
    const Vec f0 = net.evaluate(pts);
    const double r0 = regularizer_value(net, Regularizer::WeightedVw, wf);
    const double p0 = regularizer_value(net, Regularizer::PathNorm, wf);
    for (double c : {0.1, 2.0, 50.0}) {
      const ShallowNet s = net.rescaled(c);
      EXPECT_LE((s.evaluate(pts) - f0).cwiseAbs().maxCoeff(), 1e-12 * f0.cwiseAbs().maxCoeff());
      EXPECT_NEAR(regularizer_value(s, Regularizer::WeightedVw, wf), r0, 1e-12 * r0);
      EXPECT_NEAR(regularizer_value(s, Regularizer::PathNorm, wf), p0, 1e-12 * p0);
    }
  }
}

TEST(Training, WeightedNormAtUnitDirections) {
  for (int d : {2, 3, 4}) {
    const WeightFn wf = WeightFn::ball_power(d);
    ShallowNet net = random_net(d, 12, 20 + d);
    double oracle = 0.0;
    for (auto& nu : net.neurons) {
      nu.xi.normalize();
      nu.t = std::clamp(nu.t, -1.0, 1.0);
      oracle += std::abs(nu.a) * std::pow(1.0 - nu.t, 0.5 + d / 4.0);
    }
    EXPECT_NEAR(regularizer_value(net, Regularizer::WeightedVw, wf), oracle, 1e-12 * oracle);
    EXPECT_NEAR(vw_cost(net.to_combination(), wf), oracle, 1e-12 * oracle);
  }
}

TEST(Training, OtherRegularizers) {
  const ShallowNet net = random_net(2, 6, 3);
  double path = 0.0, decay = 0.0;
  for (const auto& nu : net.neurons) {
    path += std::abs(nu.a) * nu.xi.norm();
    decay += 0.5 * (nu.a * nu.a + nu.xi.squaredNorm());
  }
  const WeightFn wf = WeightFn::ball_power(2);
  EXPECT_NEAR(regularizer_value(net, Regularizer::PathNorm, wf), path, 1e-13);
  EXPECT_NEAR(regularizer_value(net, Regularizer::WeightDecay, wf), decay, 1e-13);
  EXPECT_EQ(parse_regularizer("path-norm"), Regularizer::PathNorm);
  EXPECT_THROW(parse_regularizer("l7"), InvalidArgument);
  EXPECT_THROW(neuron_vw_norm(Vec::Zero(2), 0.3, wf), InvalidArgument);
}

TEST(Training, TwoRepresentationsOfTheCoordinate) {
  // (x1)_+ - (-x1)_+ and ((x1 + 1)_+ - (-x1 + 1)_+) / 2 both equal x1 on the ball.
  const Vec e1 = unit_vector(2, 0);
  ShallowNet f, g;
  f.neurons = {{e1, 0.0, 1.0}, {-e1, 0.0, -1.0}};
  g.neurons = {{e1, -1.0, 0.5}, {-e1, -1.0, -0.5}};
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vec x = sample_ball(2, rng);
    EXPECT_NEAR(f(x), x(0), 1e-15);
    EXPECT_NEAR(g(x), x(0), 1e-15);
  }
  const WeightFn wf = WeightFn::ball_power(3);
  f.dim = g.dim = 2;
  EXPECT_NEAR(regularizer_value(f, Regularizer::WeightedVw, wf), 2.0, 1e-15);
  EXPECT_NEAR(regularizer_value(g, Regularizer::WeightedVw, wf), std::pow(2.0, 1.25), 1e-14);
}

TEST(Training, ZeroTargetGivesZeroObjective) {
  const FitProblem p = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Constant, 0.0, 2);
  FitOptions o;
  o.restarts = 2;
  const FitReport r = fit(p, WeightFn::ball_power(2), o);
  EXPECT_LE(r.objective, 1e-8);
  EXPECT_EQ(r.active, 0);
}

TEST(Training, OptimalityConditionsForOutputWeights) {
  // At a fitted net, 2 |phi_j . r| <= lambda nu_j, with equality where a_j != 0.
  const WeightFn wf = WeightFn::ball_power(2);
  const FitProblem p = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 1);
  FitOptions o;
  o.restarts = 2;
  const FitReport rep = fit(p, wf, o);
  Vec r = p.targets;
  for (int i = 0; i < p.points(); ++i) r(i) -= rep.net(p.sites.col(i));
  for (const auto& nu : rep.net.neurons) {
    double corr = 0.0;
    for (int i = 0; i < p.points(); ++i) corr += relu(nu.xi.dot(p.sites.col(i)) - nu.t) * r(i);
    const double nu_j = nu.xi.norm() * std::max(0.0, 1.0 - nu.t / nu.xi.norm());
    const double lhs = 2.0 * std::abs(corr), rhs = p.lambda * nu_j;
    EXPECT_LE(lhs, rhs * (1.0 + 1e-6) + 1e-12);
    if (nu.a != 0.0) EXPECT_NEAR(lhs, rhs, 1e-6 * rhs + 1e-12);
  }
}

TEST(Training, TraceIsNonIncreasing) {
  const FitProblem p = make_problem(2, 8, 10, 1e-2, Regularizer::WeightedVw, TargetKind::Random, 1.0, 3);
  FitOptions o;
  o.restarts = 1;
  o.budget = 300;
  const FitReport rep = fit(p, WeightFn::ball_power(2), o);
  ASSERT_FALSE(rep.trace.empty());
  for (std::size_t i = 1; i < rep.trace.size(); ++i) EXPECT_LE(rep.trace[i], rep.trace[i - 1] * (1.0 + 1e-12));
  EXPECT_LE(rep.objective, p.targets.squaredNorm());
}

TEST(Training, LargerBudgetAgrees) {
  const FitProblem p = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 4);
  const WeightFn wf = WeightFn::ball_power(2);
  FitOptions o;
  o.restarts = 4;
  o.seed = 2;
  const double a = fit(p, wf, o).objective;
  o.budget *= 10;
  const double b = fit(p, wf, o).objective;
  EXPECT_LE(std::abs(a - b), 1e-3 * b);
}

TEST(Training, WeightDecayRidgeSolve) {
  const FitProblem p = make_problem(2, 10, 8, 1e-2, Regularizer::WeightDecay, TargetKind::Sine, 1.0, 5);
  FitOptions o;
  o.restarts = 1;
  o.budget = 200;
  const FitReport rep = fit(p, WeightFn::ball_power(2), o);
  // Stationarity in a: 2 Phi^T r = lambda a.
  Vec r = p.targets;
  for (int i = 0; i < p.points(); ++i) r(i) -= rep.net(p.sites.col(i));
  for (const auto& nu : rep.net.neurons) {
    double corr = 0.0;
    for (int i = 0; i < p.points(); ++i) corr += relu(nu.xi.dot(p.sites.col(i)) - nu.t) * r(i);
    EXPECT_NEAR(2.0 * corr, p.lambda * nu.a, 1e-8);
  }
}

TEST(Training, PathCostGrowsAsLambdaShrinks) {
  const FitProblem p = make_problem(2, 10, 20, 1e-1, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 6);
  FitOptions o;
  o.restarts = 2;
  const auto path = min_norm_path(p, {1e-1, 1e-2, 1e-3}, WeightFn::ball_power(2), o);
  ASSERT_EQ(path.size(), 3u);
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_GE(path[i].vw_cost, path[i - 1].vw_cost * 0.95);
    EXPECT_LE(path[i].residual, path[i - 1].residual * 1.05);
  }
  EXPECT_THROW(min_norm_path(p, {1e-3, 1e-2}, WeightFn::ball_power(2), o), InvalidArgument);
}

TEST(Training, MergeNeurons) {
  ShallowNet net;
  net.dim = 2;
  net.neurons = {{vec2(1, 0), 0.2, 1.0}, {vec2(2, 0), 0.4, 0.5}, {vec2(0, 1), 0.0, 0.0}};
  const ShallowNet m = merge_neurons(net);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m.neurons[0].a, 2.0, 1e-15);  // 1 + 0.5 * 2
  EXPECT_EQ(active_neurons(net), 2);
}

TEST(Training, RejectsNonPositiveLambda) {
  FitProblem p = make_problem(2, 5, 3, 1e-3, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 7);
  p.lambda = 0.0;
  EXPECT_THROW(fit(p, WeightFn::ball_power(2)), InvalidArgument);
}
