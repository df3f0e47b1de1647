#include "hpfact/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "hpfact/parallel.hpp"

namespace hpfact {

void ExponentSystem::validate(int dim) const {
  check_hardy_exponent(p, dim);
  if (!(q > 1.0 && r1 > 1.0 && r2 > 1.0))
    throw precondition_error("exponents q, r1, r2 must exceed 1");
  const double gap = 1.0 / q + 1.0 / r1 + 1.0 / r2 - 1.0 / p;
  if (std::abs(gap) > 1e-12)
    throw precondition_error("exponents violate 1/q + 1/r1 + 1/r2 = 1/p (off by " + std::to_string(gap) + ")");
}

ExponentSystem ExponentSystem::symmetric(double p) { return ExponentSystem{p, 3.0 * p, 3.0 * p, 3.0 * p}; }

namespace {

void check_slot(int l) {
  if (l != 1 && l != 2) throw precondition_error("slot l must be 1 or 2");
}

}  // namespace

GridFunction pi_l(const KernelSpec& kernel, int l, const GridFunction& g, const GridFunction& h1,
                  const GridFunction& h2, QuadraturePath path) {
  check_slot(l);
  if (!(g.spec() == h1.spec() && g.spec() == h2.spec()))
    throw precondition_error("pi_l: arguments live on different grids");
  const GridFunction& hl = l == 2 ? h2 : h1;
  GridFunction adjoint = l == 2 ? apply_partial_adjoint(kernel, 2, h1, g, hl.box(), nullptr, path)
                                : apply_partial_adjoint(kernel, 1, g, h2, hl.box(), nullptr, path);
  GridFunction direct = apply_T(kernel, h1, h2, g.box(), nullptr, path);
  return subtract(multiply(hl, adjoint), multiply(g, direct));
}

GridFunction pi_l(const KernelSpec& kernel, const FactorTriple& t, QuadraturePath path) {
  return pi_l(kernel, t.slot, t.g, t.h1, t.h2, path);
}

std::int64_t select_N(double eps, double p, int n, double eps_s) {
  if (!(eps > 0.0)) throw precondition_error("select_N: eps must be positive");
  const double e = eps_s * p - n * (1.0 - p);
  if (!(e > 1e-12))
    throw precondition_error("select_N: eps_s p - n(1-p) must be positive, got " + std::to_string(e));
  // k 2^{-k e} rises until k = 1/(e ln 2) and falls afterwards, so the bound
  // holds for every larger power of two once it holds past the peak.
  const double target = std::pow(eps, p);
  const double peak = 1.0 / (e * std::numbers::ln2);
  int last_fail = 0;
  for (int k = 1; k < 63; ++k) {
    const bool holds = k / std::pow(std::ldexp(1.0, k), e) < target;
    if (!holds) last_fail = k;
    if (holds && k >= peak) return std::int64_t{1} << (last_fail + 1);
  }
  throw precondition_error("select_N: no power of two below 2^63 satisfies the bound");
}

ApproximationResult approximate_atom(const KernelSpec& kernel, const Atom& atom,
                                     const ExponentSystem& exps, int l, double N,
                                     QuadraturePath path) {
  check_slot(l);
  const GridSpec& spec = atom.fn.spec();
  const int n = spec.dim();
  if (kernel.dim != n) throw precondition_error("kernel and atom dimensions differ");
  if (!(N >= 4.0)) throw precondition_error("approximate_atom needs N >= 4");
  exps.validate(n);

  const double r = atom.ball.radius;
  const Point x0 = atom.ball.center;
  const double step = N * r / std::sqrt(static_cast<double>(n));
  const Point yl{x0[0] + step, n == 2 ? x0[1] + step : 0.0};
  const Point ylt{yl[0] + step, n == 2 ? yl[1] + step : 0.0};
  const Ball far{yl, r};
  const Ball farther{ylt, r};
  check_ball(spec, atom.ball);
  check_ball(spec, far);
  check_ball(spec, farther);

  GridFunction g = indicator(spec, far);
  GridFunction other = indicator(spec, farther);
  const double denom = l == 2 ? apply_partial_adjoint_at(kernel, 2, other, g, x0, nullptr, path)
                              : apply_partial_adjoint_at(kernel, 1, g, other, x0, nullptr, path);
  const double measure = atom.ball.measure(n);
  const double floor =
      1e-3 * kernel.homogeneity_constant * std::pow(N * r, -2.0 * n) * measure * measure;
  if (!(std::abs(denom) >= floor))
    throw precondition_error("approximate_atom: |T_l^*(...)(x0)| = " + std::to_string(std::abs(denom)) +
                             " below the homogeneity floor " + std::to_string(floor));
  GridFunction hl = scale(1.0 / denom, atom.fn);

  FactorTriple t{1.0,
                 std::move(g),
                 l == 2 ? other : hl,
                 l == 2 ? hl : other,
                 l,
                 atom.ball};
  t.norm_g = lp_norm(t.g, exps.q);
  t.norm_h1 = lp_norm(t.h1, exps.r1);
  t.norm_h2 = lp_norm(t.h2, exps.r2);

  GridFunction error = subtract(atom.fn, pi_l(kernel, t, path));
  ApproximationResult out{std::move(t), std::move(error), far, denom};
  out.sup_error_near = sup_norm(restrict_to(out.error, atom.ball));
  out.sup_error_far = sup_norm(restrict_to(out.error, far));
  out.sup_error = sup_norm(out.error);
  return out;
}

std::vector<double> FactorizationResult::contraction_ratios() const {
  std::vector<double> out;
  double prev = initial_quasinorm_p;
  for (double e : error_norms) {
    out.push_back(prev > 0.0 ? e / prev : 0.0);
    prev = e;
  }
  return out;
}

namespace {

struct AtomOutcome {
  std::optional<FactorTriple> triple;
  double error_p = 0.0;
  double error_l1 = 0.0;
  AtomicDecomposition next;
};

}  // namespace

FactorizationResult uchiyama_factorize(const KernelSpec& kernel, int l, const AtomicDecomposition& f,
                                       const ExponentSystem& exps, double N, int max_rounds,
                                       double stop_tol, QuadraturePath path) {
  check_slot(l);
  if (max_rounds < 0) throw precondition_error("max_rounds must be >= 0");
  FactorizationResult res;
  res.exponents = exps;
  res.slot = l;
  res.N_used = N;
  res.eps_used = kernel.epsilon;
  res.initial_quasinorm_p = atomic_quasinorm_p(f);
  if (f.terms.empty()) return res;
  const int n = f.terms.front().atom.fn.spec().dim();
  exps.validate(n);
  if (std::abs(f.p - exps.p) > 1e-12) throw precondition_error("decomposition p differs from exponents p");
  const double budget_scale = std::pow(N, 2.0 * n);

  AtomicDecomposition current = f;
  for (int round = 1; round <= max_rounds; ++round) {
    const bool last = round == max_rounds;
    std::vector<const AtomicTerm*> live;
    for (const auto& t : current.terms)
      if (t.lambda != 0.0) live.push_back(&t);
    std::vector<AtomOutcome> outcomes(live.size());

    parallel_for(live.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        const AtomicTerm& term = *live[j];
        ApproximationResult ar = approximate_atom(kernel, term.atom, exps, l, N, path);
        AtomOutcome& out = outcomes[j];
        ar.triple.lambda = term.lambda;
        TwoBumpFunction tb =
            make_two_bump(scale(term.lambda, ar.error).trimmed(), term.atom.ball, ar.far_ball);
        if (last) {
          const TwoBumpCoefficients co = two_bump_coefficients(tb, exps.p);
          out.error_p = co.quasinorm_p;
          CompensatedSum l1;
          for (std::size_t k = 0; k < co.gammas.size(); ++k)
            l1.add(std::abs(co.gammas[k]) * std::pow(co.balls[k].measure(n), 1.0 - 1.0 / exps.p));
          out.error_l1 = l1.value();
        } else {
          TwoBumpDecomposition d = two_bump_decompose(tb, exps.p);
          out.error_p = d.quasinorm_p;
          CompensatedSum l1;
          for (const auto& t : d.decomposition.terms)
            if (t.lambda != 0.0) l1.add(std::abs(t.lambda) * lp_norm(t.atom.fn, 1.0));
          out.error_l1 = l1.value();
          out.next = std::move(d.decomposition);
        }
        out.triple = std::move(ar.triple);
      }
    });

    AtomicDecomposition next{exps.p, {}};
    std::vector<FactorTriple> triples;
    CompensatedSum err, l1;
    double budget = 0.0;
    for (auto& out : outcomes) {
      budget = std::max(budget, out.triple->norm_product() / budget_scale);
      triples.push_back(std::move(*out.triple));
      err.add(out.error_p);
      l1.add(out.error_l1);
      for (auto& t : out.next.terms) next.terms.push_back(std::move(t));
    }
    res.rounds.push_back(std::move(triples));
    res.error_norms.push_back(err.value());
    res.error_l1_bounds.push_back(l1.value());
    res.round_budget_max.push_back(budget);
    res.triple_norm_budget_max = std::max(res.triple_norm_budget_max, budget);

    const auto& e = res.error_norms;
    const std::size_t m = e.size();
    const double before = m >= 2 ? e[m - 2] : res.initial_quasinorm_p;
    const double before2 = m >= 3 ? e[m - 3] : (m == 2 ? res.initial_quasinorm_p : INFINITY);
    if (e[m - 1] > before && before > before2) res.non_contraction = true;
    if (e[m - 1] < stop_tol) break;
    current = std::move(next);
  }
  return res;
}

double factorization_norm(const FactorizationResult& res) {
  const double p = res.exponents.p;
  CompensatedSum s;
  for (const auto& round : res.rounds)
    for (const auto& t : round) s.add(std::pow(std::abs(t.lambda) * t.norm_product(), p));
  return std::pow(s.value(), 1.0 / p);
}

GridFunction reconstruct(const KernelSpec& kernel, const FactorizationResult& res, const GridSpec& spec,
                         QuadraturePath path) {
  IndexBox box;
  for (const auto& round : res.rounds)
    for (const auto& t : round) box = box_union(box, box_union(t.g.box(), t.slot == 2 ? t.h2.box() : t.h1.box()));
  GridFunction out(spec, box);
  for (const auto& round : res.rounds)
    for (const auto& t : round) {
      const GridFunction piece = pi_l(kernel, t, path);
      piece.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
        if (v != 0.0) out.ref(i0, i1) += t.lambda * v;
      });
    }
  return out;
}

double required_half_width(const Ball& start, double N, int rounds, int dim, double spacing) {
  if (rounds < 0 || !(spacing > 0.0)) throw precondition_error("required_half_width: bad arguments");
  const int j0 = two_bump_depth(N);
  const double grow = std::ldexp(1.0, j0 + 1);
  double lo = start.center[0], hi = start.center[0];
  if (dim == 2) {
    lo = std::min(lo, start.center[1]);
    hi = std::max(hi, start.center[1]);
  }
  double R = start.radius;
  double need = std::max(std::abs(lo), std::abs(hi)) + R;
  for (int k = 0; k < rounds; ++k) {
    const double v = N * R / std::sqrt(static_cast<double>(dim));
    // Atom, its two displaced copies, then the error's two-bump balls and mid-ball.
    need = std::max({need, std::abs(lo) + grow * R, hi + 2.0 * v + R, hi + v + 0.5 * grow * R,
                     hi + 0.5 * v + grow * R});
    hi += v;
    R *= grow;
  }
  return (std::ceil(need / spacing) + 2.0) * spacing;
}

}  // namespace hpfact
