#include "hpfact/commutator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace hpfact {

void check_lip_exponent(double alpha, const ExponentSystem& exps, int dim) {
  const double expected = dim * (1.0 / exps.p - 1.0);
  if (std::abs(alpha - expected) > 1e-12)
    throw precondition_error("Lipschitz order " + std::to_string(alpha) + " does not match n(1/p - 1) = " +
                             std::to_string(expected));
}

LipFunction make_lip_function(GridFunction fn, const ExponentSystem& exps, std::int64_t sample_budget) {
  const int n = fn.spec().dim();
  exps.validate(n);
  const double alpha = n * (1.0 / exps.p - 1.0);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw precondition_error("Lipschitz order must lie in (0, 1]");
  const double est = lip_seminorm(fn, alpha, sample_budget);
  return LipFunction{std::move(fn), alpha, est};
}

GridFunction apply_commutator(const KernelSpec& kernel, int l, const GridFunction& b, const GridFunction& f1,
                              const GridFunction& f2, const IndexBox& eval_box, QuadraturePath path) {
  if (l != 1 && l != 2) throw precondition_error("slot l must be 1 or 2");
  if (!(b.spec() == f1.spec() && b.spec() == f2.spec()))
    throw precondition_error("apply_commutator: arguments live on different grids");
  GridFunction moved = l == 2 ? apply_T(kernel, f1, multiply(b, f2), eval_box, nullptr, path)
                              : apply_T(kernel, multiply(b, f1), f2, eval_box, nullptr, path);
  GridFunction plain = apply_T(kernel, f1, f2, eval_box, nullptr, path);
  return window(subtract(moved, multiply(b, plain)), eval_box);
}

GridFunction apply_commutator(const KernelSpec& kernel, int l, const LipFunction& b, const GridFunction& f1,
                              const GridFunction& f2, const IndexBox& eval_box, QuadraturePath path) {
  return apply_commutator(kernel, l, b.fn, f1, f2, eval_box, path);
}

DualityReport duality_pairing_check(const KernelSpec& kernel, int l, const GridFunction& b, const GridFunction& g,
                                    const GridFunction& h1, const GridFunction& h2, QuadraturePath path) {
  DualityReport r;
  r.lhs = inner_product(b, pi_l(kernel, l, g, h1, h2, path));
  r.rhs = inner_product(g, apply_commutator(kernel, l, b, h1, h2, g.box(), path));
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.rel_err = scale == 0.0 ? 0.0 : std::abs(r.lhs - r.rhs) / scale;
  return r;
}

PairingTriple seeded_pairing_triple(const GridSpec& spec, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x9e3779b9u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double L = spec.half_width();
  const double r = L / 10.0;
  auto bump = [&](double c) {
    const Point center{c + 0.075 * L * u(rng), spec.dim() == 2 ? 0.075 * L * u(rng) : 0.0};
    GridFunction f = indicator(spec, Ball{center, r});
    for (double& v : f.samples())
      if (v != 0.0) v = u(rng);
    return f;
  };
  GridFunction g = bump(-0.6 * L);
  GridFunction h1 = bump(0.6 * L);
  GridFunction h2 = bump(0.0);
  return PairingTriple{std::move(g), std::move(h1), std::move(h2)};
}

namespace {

struct TrialPair {
  GridFunction f1;
  GridFunction f2;
};

// Indicator or odd signed bump on each of two disjoint balls at a random
// scale and separation; redraws until both balls fit the grid.
TrialPair draw_trial(const GridSpec& spec, std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  const int n = spec.dim();
  const double L = spec.half_width();
  const double h = spec.spacing();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double rmin = 2.0 * h;
  const double rmax = std::max(rmin, L / 6.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double r = rmin * std::pow(rmax / rmin, u01(rng));
    const double sep = (2.5 + 3.5 * u01(rng)) * r;
    const double angle = 2.0 * std::numbers::pi * u01(rng);
    const Point dir = n == 1 ? Point{u01(rng) < 0.5 ? -1.0 : 1.0, 0.0} : Point{std::cos(angle), std::sin(angle)};
    const Point c1{-L + r + (2.0 * L - 2.0 * r) * u01(rng), n == 2 ? -L + r + (2.0 * L - 2.0 * r) * u01(rng) : 0.0};
    const Point c2{c1[0] + sep * dir[0], c1[1] + sep * dir[1]};
    const Ball b1{c1, r}, b2{c2, r};
    bool inside = true;
    for (const Ball& b : {b1, b2})
      for (int d = 0; d < n; ++d) inside = inside && std::abs(b.center[d]) + b.radius < L - h;
    if (!inside) continue;
    auto shape = [&](const Ball& b) {
      GridFunction chi = indicator(spec, b);
      if (u01(rng) < 0.5) return chi;
      return GridFunction::from_function(spec, chi.box(), [&](const Point& x) {
        if (distance(x, b.center, n) >= b.radius) return 0.0;
        return x[0] < b.center[0] ? -1.0 : 1.0;
      });
    };
    GridFunction f1 = shape(b1);
    GridFunction f2 = shape(b2);
    return TrialPair{std::move(f1), std::move(f2)};
  }
  throw precondition_error("estimate_commutator_norm: grid too small for the trial family");
}

}  // namespace

CommutatorEstimate estimate_commutator_norm(const KernelSpec& kernel, int l, const LipFunction& b,
                                            const ExponentSystem& exps, int trial_count, std::uint64_t seed) {
  if (trial_count < 1) throw precondition_error("trial_count must be >= 1");
  const GridSpec& spec = b.fn.spec();
  exps.validate(spec.dim());
  check_lip_exponent(b.alpha, exps, spec.dim());
  CommutatorEstimate est;
  for (int t = 0; t < trial_count; ++t) {
    const TrialPair pair = draw_trial(spec, seed, t);
    const GridFunction c = apply_commutator(kernel, l, b.fn, pair.f1, pair.f2, spec.full_box());
    const double ratio = lp_norm(c, exps.q_dual()) / (lp_norm(pair.f1, exps.r1) * lp_norm(pair.f2, exps.r2));
    if (ratio > est.value) {
      est.value = ratio;
      est.best_trial = t;
    }
    est.running_max.push_back(est.value);
  }
  return est;
}

LipLowerBound lip_lower_bound_via_factorization(const LipFunction& b, const FactorizationResult& res,
                                                const KernelSpec& kernel, const AtomicDecomposition& f,
                                                QuadraturePath path) {
  const GridSpec& spec = b.fn.spec();
  LipLowerBound out;
  CompensatedSum termwise, chain;
  for (const auto& round : res.rounds)
    for (const auto& t : round) {
      const GridFunction c = apply_commutator(kernel, t.slot, b.fn, t.h1, t.h2, t.g.box(), path);
      termwise.add(t.lambda * inner_product(t.g, c));
      chain.add(std::abs(t.lambda) * lp_norm(t.g, res.exponents.q) * lp_norm(c, res.exponents.q_dual()));
    }
  out.termwise = termwise.value();
  out.chain_bound = chain.value();
  out.pairing = res.rounds.empty() ? 0.0 : inner_product(b.fn, reconstruct(kernel, res, spec, path));
  out.direct = inner_product(b.fn, reconstruct(f, spec));
  out.truncation_bound =
      res.error_l1_bounds.empty() ? 0.0 : sup_norm(b.fn) * res.error_l1_bounds.back();
  out.holder_ok = std::abs(out.pairing) <= out.chain_bound + 1e-9;
  return out;
}

}  // namespace hpfact
