// Approximates one atom and a random combination on the unit disk, then
// fits a small regularized network.
#include <cstdio>

#include "wvar/wvar.hpp"

int main() {
  using namespace wvar;
  const Domain disk = Domain::ball(2);
  const WeightFn wf = WeightFn::ball_power(2);

  const Atom atom(vec2(0.6, 0.8), 0.5);
  std::printf("atom: |phi| = %.6f, w = %.6f\n", atom_l2_norm(atom, disk), wf(atom));
  for (int m : {8, 16, 32}) {
    const PlanarApproximant g = approximate_atom_planar(atom, m);
    const IntegralEstimate e = planar_error(atom, g, disk, 100000, 7);
    std::printf("  m = %2d  kind = %-6s  max|c| = %.4f  error = %.3e\n", m, g.kind_name().c_str(), g.max_coef(),
                e.value);
  }

  CombinationSpec spec;
  spec.atoms = 50;
  spec.seed = 3;
  const AtomCombination f = random_combination(spec, disk, wf);
  MaureyConfig cfg;
  cfg.seed = 5;
  std::printf("combination: vw_cost = %.6f\n", vw_cost(f, wf));
  for (std::int64_t n : {56, 240, 992}) {
    const PipelineResult r = approximate_function(f, n, wf, disk, cfg, QuadratureSpec::monte_carlo(100000, 9));
    std::printf("  n = %4lld  m = %2d  terms = %4zu  error = %.3e\n", static_cast<long long>(n), r.m, r.terms,
                r.error);
  }

  const FitProblem p = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 1);
  FitOptions opt;
  opt.restarts = 2;
  const FitReport rep = fit(p, wf, opt);
  std::printf("training: objective = %.6e  active neurons = %d  iterations = %d\n", rep.objective, rep.active,
              rep.iterations);
  return 0;
}
