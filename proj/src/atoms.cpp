#include "hpfact/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace hpfact {

void check_hardy_exponent(double p, int dim) {
  const double lo = static_cast<double>(dim) / (dim + 1.0);
  if (!(p > lo && p < 1.0))
    throw precondition_error("p must lie in (n/(n+1), 1), got " + std::to_string(p));
}

AtomReport validate_atom(const GridFunction& fn, const Ball& ball, double p, double tol) {
  const GridSpec& spec = fn.spec();
  check_hardy_exponent(p, spec.dim());
  AtomReport r;
  fn.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v != 0.0 && !in_ball(spec, ball, i0, i1)) r.outside_mass = std::max(r.outside_mass, std::abs(v));
  });
  r.support_ok = r.outside_mass == 0.0;
  const double measure = ball.measure(spec.dim());
  const double sup = sup_norm(fn);
  r.size_ratio = sup / std::pow(measure, -1.0 / p);
  r.size_ok = r.size_ratio <= 1.0 + tol;
  r.mean_ratio = sup == 0.0 ? 0.0 : std::abs(integrate(fn)) / (sup * measure);
  r.mean_ok = r.mean_ratio <= tol;
  r.valid = r.support_ok && r.size_ok && r.mean_ok;
  return r;
}

Atom centered_atom(const GridSpec& spec, const Ball& ball, double p) {
  check_hardy_exponent(p, spec.dim());
  const Ball inner{ball.center, 0.5 * ball.radius};
  const double s = static_cast<double>(ball_point_count(spec, inner)) /
                   static_cast<double>(ball_point_count(spec, ball));
  GridFunction f = axpy(-s, indicator(spec, ball), indicator(spec, inner));
  f = scale(std::pow(ball.measure(spec.dim()), -1.0 / p) / sup_norm(f), f);
  return Atom{std::move(f), ball, p};
}

Atom odd_atom(const GridSpec& spec, const Ball& ball, double p) {
  check_hardy_exponent(p, spec.dim());
  const double top = std::pow(ball.measure(spec.dim()), -1.0 / p);
  GridFunction f = GridFunction::from_function(spec, ball_box(spec, ball), [&](const Point& x) {
    return x[0] < ball.center[0] ? top : (x[0] > ball.center[0] ? -top : 0.0);
  });
  return Atom{restrict_to(f, ball), ball, p};
}

double atomic_quasinorm_p(const AtomicDecomposition& d) {
  CompensatedSum s;
  for (const auto& t : d.terms) s.add(std::pow(std::abs(t.lambda), d.p));
  return s.value();
}

double atomic_quasinorm(const AtomicDecomposition& d) {
  return std::pow(atomic_quasinorm_p(d), 1.0 / d.p);
}

AtomicDecomposition concatenate(const AtomicDecomposition& a, const AtomicDecomposition& b) {
  if (a.p != b.p) throw precondition_error("concatenating decompositions with different p");
  AtomicDecomposition out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

GridFunction reconstruct(const AtomicDecomposition& d, const GridSpec& spec) {
  IndexBox box;
  for (const auto& t : d.terms) box = box_union(box, t.atom.fn.box());
  GridFunction out(spec, box);
  for (const auto& t : d.terms) {
    if (t.lambda == 0.0) continue;
    t.atom.fn.for_each(
        [&](std::int64_t i0, std::int64_t i1, double v) { out.ref(i0, i1) += t.lambda * v; });
  }
  return out;
}

double TwoBumpFunction::separation() const {
  return distance(b1.center, b2.center, fn.spec().dim()) / b1.radius;
}

namespace {

double ball_sup(const GridFunction& f, const Ball& b) {
  double m = 0.0;
  f.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v != 0.0 && in_ball(f.spec(), b, i0, i1)) m = std::max(m, std::abs(v));
  });
  return m;
}

}  // namespace

TwoBumpFunction make_two_bump(GridFunction fn, const Ball& b1, const Ball& b2) {
  TwoBumpFunction t{std::move(fn), b1, b2, 0.0, 0.0};
  t.c1 = ball_sup(t.fn, b1);
  t.c2 = ball_sup(t.fn, b2);
  validate_two_bump(t);
  return t;
}

void validate_two_bump(const TwoBumpFunction& f) {
  const GridSpec& spec = f.fn.spec();
  const int n = spec.dim();
  check_ball(spec, f.b1);
  check_ball(spec, f.b2);
  if (std::abs(f.b1.radius - f.b2.radius) > 1e-12 * f.b1.radius)
    throw precondition_error("two-bump balls must have equal radii");
  if (distance(f.b1.center, f.b2.center, n) < 2.0 * f.b1.radius)
    throw precondition_error("two-bump balls must be disjoint");
  if (f.c1 < 0.0 || f.c2 < 0.0) throw precondition_error("two-bump constants must be >= 0");
  bool dominated = true;
  f.fn.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v == 0.0) return;
    const double bound = (in_ball(spec, f.b1, i0, i1) ? f.c1 : 0.0) +
                         (in_ball(spec, f.b2, i0, i1) ? f.c2 : 0.0);
    if (std::abs(v) > (1.0 + 1e-9) * bound) dominated = false;
  });
  if (!dominated) throw precondition_error("two-bump function exceeds C1 chi_B1 + C2 chi_B2");
  const double scale = f.c1 * f.b1.measure(n) + f.c2 * f.b2.measure(n);
  const double mean = integrate(f.fn);
  if (std::abs(mean) > 1e-9 * scale)
    throw precondition_error("two-bump function must have zero integral (integral " + std::to_string(mean) +
                             ", scale " + std::to_string(scale) + ")");
}

int two_bump_depth(double N) {
  if (!(N > 1.0)) throw precondition_error("two-bump separation N must exceed 1");
  // Tolerance keeps exact powers of two (computed with roundoff) at log2 N + 1.
  return static_cast<int>(std::floor(std::log2(N) + 1e-9)) + 1;
}

namespace {

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

// Everything the telescoping construction needs besides the atoms themselves.
struct TwoBumpPlan {
  explicit TwoBumpPlan(const GridSpec& spec) : parts{GridFunction(spec), GridFunction(spec)} {}

  int n = 1;
  double r = 1.0;
  int j0 = 0;
  std::array<Point, 2> y{};
  std::array<GridFunction, 2> parts;            // f_1 = f chi_B1, f_2 = f - f_1
  std::array<double, 2> sums{};                 // grid sums of f_i
  std::array<std::vector<std::int64_t>, 2> counts;  // #B(y_i, 2^k r), k = 0..J0
  Ball mid;
  std::int64_t mid_count = 0;
  double alpha_mid_first = 0.0;
  double alpha_mid_second = 0.0;

  Ball ball(int i, int k) const { return Ball{y[i], std::ldexp(r, k)}; }
  double alpha(int i, int k) const {
    return sums[i] / static_cast<double>(counts[i][static_cast<std::size_t>(k)]);
  }
};

TwoBumpPlan make_plan(const TwoBumpFunction& f, double p) {
  validate_two_bump(f);
  const GridSpec& spec = f.fn.spec();
  check_hardy_exponent(p, spec.dim());
  TwoBumpPlan plan{spec};
  plan.n = spec.dim();
  plan.r = f.b1.radius;
  plan.j0 = two_bump_depth(f.separation());
  plan.y = {f.b1.center, f.b2.center};
  plan.mid = Ball{{0.5 * (f.b1.center[0] + f.b2.center[0]), 0.5 * (f.b1.center[1] + f.b2.center[1])},
                  std::ldexp(plan.r, plan.j0 + 1)};
  try {
    check_ball(spec, plan.mid);
  } catch (const grid_error&) {
    throw grid_error("grid too small for the two-bump mid-ball of radius " +
                     std::to_string(plan.mid.radius));
  }
  plan.parts[0] = restrict_to(f.fn, f.b1);
  plan.parts[1] = window(subtract(f.fn, plan.parts[0]), ball_box(spec, f.b2));
  for (int i = 0; i < 2; ++i) {
    CompensatedSum s;
    double mass = 0.0;
    for (double v : plan.parts[i].samples()) {
      s.add(v);
      mass += std::abs(v);
    }
    // A sum at roundoff level is a zero mean; keeping it would emit atoms made of noise.
    plan.sums[i] = std::abs(s.value()) <= 64.0 * kEpsilon * mass ? 0.0 : s.value();
    for (int k = 0; k <= plan.j0; ++k) plan.counts[i].push_back(ball_point_count(spec, plan.ball(i, k)));
  }
  plan.mid_count = ball_point_count(spec, plan.mid);
  plan.alpha_mid_first = plan.sums[0] / static_cast<double>(plan.mid_count);
  plan.alpha_mid_second = -plan.sums[1] / static_cast<double>(plan.mid_count);
  return plan;
}

// (-1)^i alpha^{J0} for i = 1, 2 (stored zero-based). Each side takes alpha^{J0}
// from its own sum, so each last atom has zero mean even when f's integral is
// only zero to roundoff; the two values agree up to that roundoff.
double mid_level(const TwoBumpPlan& plan, int i) {
  return i == 0 ? -plan.alpha_mid_first : plan.alpha_mid_second;
}

GridFunction telescoping_piece(const TwoBumpPlan& plan, const GridSpec& spec, int i, int k) {
  if (k == 1) return axpy(-plan.alpha(i, 1), indicator(spec, plan.ball(i, 1)), plan.parts[i]);
  if (k <= plan.j0)
    return axpy(plan.alpha(i, k - 1), indicator(spec, plan.ball(i, k - 1)),
                scale(-plan.alpha(i, k), indicator(spec, plan.ball(i, k))));
  return axpy(plan.alpha(i, plan.j0), indicator(spec, plan.ball(i, plan.j0)),
              scale(mid_level(plan, i), indicator(spec, plan.mid)));
}

// sup |f_i^k| from the piecewise-constant levels (k >= 2).
double level_sup(const TwoBumpPlan& plan, int i, int k) {
  if (k <= plan.j0) {
    const double inner = plan.alpha(i, k - 1) - plan.alpha(i, k);
    const bool annulus = plan.counts[i][k] > plan.counts[i][k - 1];
    return std::max(std::abs(inner), annulus ? std::abs(plan.alpha(i, k)) : 0.0);
  }
  const double outer = mid_level(plan, i);
  const double inner = plan.alpha(i, plan.j0) + outer;
  return std::max(std::abs(inner), std::abs(outer));
}

}  // namespace

TwoBumpDecomposition two_bump_decompose(const TwoBumpFunction& f, double p) {
  const TwoBumpPlan plan = make_plan(f, p);
  const GridSpec& spec = f.fn.spec();
  const int n = plan.n;
  TwoBumpDecomposition out;
  out.decomposition.p = p;
  out.j0 = plan.j0;
  out.mid_ball = plan.mid;
  out.alpha_mid_first = plan.alpha_mid_first;
  out.alpha_mid_second = plan.alpha_mid_second;
  const std::array<double, 2> consts{f.c1, f.c2};
  for (int i = 0; i < 2; ++i) {
    const double base = std::pow(Ball{plan.y[i], plan.r}.measure(n), 1.0 / p);
    for (int k = 1; k <= plan.j0 + 1; ++k) {
      const Ball ball = k <= plan.j0 ? plan.ball(i, k) : plan.mid;
      GridFunction piece = telescoping_piece(plan, spec, i, k);
      const double sup = sup_norm(piece);
      AtomicTerm term{0.0, Atom{GridFunction(spec), ball, p}};
      if (sup != 0.0) {
        const double measure_root = std::pow(ball.measure(n), 1.0 / p);
        term.lambda = sup * measure_root;
        term.atom.fn = scale(1.0 / term.lambda, piece);
      }
      if (consts[i] > 0.0) {
        const double envelope = consts[i] * std::exp2(k * n * (1.0 / p - 1.0)) * base;
        out.coefficient_ratio = std::max(out.coefficient_ratio, std::abs(term.lambda) / envelope);
      }
      out.decomposition.terms.push_back(std::move(term));
    }
  }
  out.quasinorm_p = atomic_quasinorm_p(out.decomposition);
  const double N = f.separation();
  const double mass = std::pow(f.c1, p) * f.b1.measure(n) + std::pow(f.c2, p) * f.b2.measure(n);
  out.stated_envelope = std::pow(N, n * (1.0 - p)) * std::log2(N) * mass;
  out.summed_envelope = (plan.j0 + 1) * std::exp2((plan.j0 + 1) * n * (1.0 - p)) * mass;
  return out;
}

TwoBumpCoefficients two_bump_coefficients(const TwoBumpFunction& f, double p) {
  const TwoBumpPlan plan = make_plan(f, p);
  const GridSpec& spec = f.fn.spec();
  TwoBumpCoefficients out;
  out.j0 = plan.j0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 1; k <= plan.j0 + 1; ++k) {
      const Ball ball = k <= plan.j0 ? plan.ball(i, k) : plan.mid;
      const double sup =
          k == 1 ? sup_norm(telescoping_piece(plan, spec, i, 1)) : level_sup(plan, i, k);
      out.gammas.push_back(sup * std::pow(ball.measure(plan.n), 1.0 / p));
      out.balls.push_back(ball);
    }
  }
  CompensatedSum s;
  for (double g : out.gammas) s.add(std::pow(std::abs(g), p));
  out.quasinorm_p = s.value();
  return out;
}

double lip_seminorm(const GridFunction& b, double alpha, std::int64_t sample_budget) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw precondition_error("lip_seminorm needs 0 < alpha <= 1");
  const GridSpec& spec = b.spec();
  const int n = spec.dim();
  const std::int64_t per_axis = spec.points_per_axis();
  const std::int64_t total = n == 1 ? per_axis : per_axis * per_axis;
  auto index_point = [&](std::int64_t k) {
    return n == 1 ? std::array<std::int64_t, 2>{k, 0}
                  : std::array<std::int64_t, 2>{k / per_axis, k % per_axis};
  };
  auto quotient = [&](std::array<std::int64_t, 2> x, std::array<std::int64_t, 2> y) {
    const double d = distance(spec.point(x[0], x[1]), spec.point(y[0], y[1]), n);
    return std::abs(b.at(y[0], y[1]) - b.at(x[0], x[1])) / std::pow(d, alpha);
  };
  double best = 0.0;
  const double pairs = 0.5 * static_cast<double>(total) * static_cast<double>(total - 1);
  if (pairs <= static_cast<double>(sample_budget)) {
    std::vector<double> values(static_cast<std::size_t>(total));
    for (std::int64_t k = 0; k < total; ++k) {
      auto x = index_point(k);
      values[static_cast<std::size_t>(k)] = b.at(x[0], x[1]);
    }
    for (std::int64_t a = 0; a < total; ++a) {
      const auto xa = index_point(a);
      const Point pa = spec.point(xa[0], xa[1]);
      for (std::int64_t c = a + 1; c < total; ++c) {
        const auto xc = index_point(c);
        const double diff = std::abs(values[static_cast<std::size_t>(c)] - values[static_cast<std::size_t>(a)]);
        if (diff == 0.0) continue;
        best = std::max(best, diff / std::pow(distance(pa, spec.point(xc[0], xc[1]), n), alpha));
      }
    }
    return best;
  }
  std::mt19937_64 rng(0x6c6970736565640fULL);
  std::uniform_int_distribution<std::int64_t> pick(0, per_axis - 1);
  std::uniform_real_distribution<double> logscale(0.0, std::log2(static_cast<double>(per_axis)));
  std::bernoulli_distribution sign(0.5);
  for (std::int64_t s = 0; s < sample_budget; ++s) {
    std::array<std::int64_t, 2> x{pick(rng), n == 2 ? pick(rng) : 0};
    std::array<std::int64_t, 2> y = x;
    for (int d = 0; d < n; ++d) {
      const auto step = static_cast<std::int64_t>(std::floor(std::exp2(logscale(rng))));
      y[d] += sign(rng) ? step : -step;
    }
    if (y == x) continue;
    bool inside = true;
    for (int d = 0; d < n; ++d) inside = inside && y[d] >= 0 && y[d] < per_axis;
    if (!inside) continue;
    best = std::max(best, quotient(x, y));
  }
  return best;
}

GridFunction poisson_maximal_diagnostic(const GridFunction& f, const std::vector<double>& t_levels) {
  return poisson_maximal_diagnostic(f, t_levels, f.spec().full_box());
}

GridFunction poisson_maximal_diagnostic(const GridFunction& f, const std::vector<double>& t_levels,
                                        const IndexBox& eval_box) {
  if (t_levels.empty()) throw precondition_error("poisson maximal function needs t levels");
  for (double t : t_levels)
    if (!(t > 0.0)) throw precondition_error("poisson t levels must be positive");
  const GridSpec& spec = f.spec();
  const int n = spec.dim();
  const double cn = n == 1 ? 1.0 / std::numbers::pi : 1.0 / (2.0 * std::numbers::pi);
  const double power = 0.5 * (n + 1);
  std::vector<Point> pts;
  std::vector<double> vals;
  f.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v == 0.0) return;
    pts.push_back(spec.point(i0, i1));
    vals.push_back(v);
  });
  GridFunction out(spec, box_intersection(eval_box, spec.full_box()));
  const IndexBox& box = out.box();
  for (std::int64_t i0 = box.lo[0]; i0 <= box.hi[0]; ++i0)
    for (std::int64_t i1 = box.lo[1]; i1 <= box.hi[1]; ++i1) {
      const Point x = spec.point(i0, i1);
      double best = 0.0;
      for (double t : t_levels) {
        double acc = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          const double d = distance(x, pts[k], n);
          acc += vals[k] * cn * t / std::pow(t * t + d * d, power);
        }
        best = std::max(best, std::abs(acc * spec.cell_volume()));
      }
      out.ref(i0, i1) = best;
    }
  return out;
}

}  // namespace hpfact
