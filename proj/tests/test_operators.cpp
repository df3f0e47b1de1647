#include <doctest.h>

#include <cmath>
#include <random>

#include "hpfact/operators.hpp"
#include "hpfact/parallel.hpp"

using namespace hpfact;

namespace {

GridFunction random_bump(const GridSpec& g, std::mt19937_64& rng, std::int64_t width) {
  const std::int64_t m = g.points_per_axis();
  std::uniform_int_distribution<std::int64_t> start(0, m - width);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IndexBox box;
  box.lo = {start(rng), 0};
  box.hi = {box.lo[0] + width - 1, 0};
  if (g.dim() == 2) {
    box.lo[1] = start(rng);
    box.hi[1] = box.lo[1] + width - 1;
  }
  return GridFunction::from_function(g, box, [&](const Point&) { return u(rng); });
}

// T_2^*(f1, f2)(x) = h^{2n} sum K(y2, y1, x) f1(y1) f2(y2), written out directly
// with the singular cells |y2 - y1| < h, |y2 - x| < h dropped.
GridFunction naive_adjoint2(const KernelSpec& k, const GridFunction& f1, const GridFunction& f2,
                            const IndexBox& out_box) {
  const GridSpec& g = f1.spec();
  const int n = g.dim();
  const double h = g.spacing();
  GridFunction out(g, out_box);
  for (std::int64_t a = out_box.lo[0]; a <= out_box.hi[0]; ++a)
    for (std::int64_t b = out_box.lo[1]; b <= out_box.hi[1]; ++b) {
      const Point x = g.point(a, b);
      double acc = 0.0;
      f1.for_each([&](std::int64_t i0, std::int64_t i1, double v1) {
        const Point y1 = g.point(i0, i1);
        f2.for_each([&](std::int64_t j0, std::int64_t j1, double v2) {
          const Point y2 = g.point(j0, j1);
          if (distance(y2, y1, n) < h || distance(y2, x, n) < h) return;
          acc += k(y2, y1, x) * v1 * v2;
        });
      });
      out.ref(a, b) = acc * g.cell_volume() * g.cell_volume();
    }
  return out;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  return sup_norm(subtract(a, b));
}

}  // namespace

TEST_CASE("zero inputs give zero") {
  GridSpec g(1, 4.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  auto f = indicator(g, Ball{{-2, 0}, 0.5});
  CHECK(apply_T(k, GridFunction(g), f, g.full_box()).is_zero());
  CHECK(apply_partial_adjoint(k, 2, f, GridFunction(g), g.full_box()).is_zero());
  CHECK(apply_partial_adjoint(k, 1, GridFunction(g), f, g.full_box()).is_zero());
}

TEST_CASE("bilinearity") {
  GridSpec g(1, 4.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  std::mt19937_64 rng(3);
  auto f1 = random_bump(g, rng, 12), f2 = random_bump(g, rng, 9), f3 = random_bump(g, rng, 7);
  const IndexBox box = g.full_box();
  auto base = apply_T(k, f1, f2, box);
  CHECK(max_abs_diff(apply_T(k, scale(2.0, f1), f2, box), scale(2.0, base)) <= 1e-12 * sup_norm(base));
  auto lhs = apply_T(k, f1, add(f2, f3), box);
  auto rhs = add(base, apply_T(k, f1, f3, box));
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * sup_norm(lhs));
  for (int l : {1, 2}) {
    auto a = apply_partial_adjoint(k, l, f1, f2, box);
    auto b = apply_partial_adjoint(k, l, f1, scale(-3.0, f2), box);
    CHECK(max_abs_diff(b, scale(-3.0, a)) <= 1e-12 * sup_norm(b));
  }
}

TEST_CASE("support locality") {
  GridSpec g(1, 4.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  std::mt19937_64 rng(5);
  IndexBox box{{10, 0}, {20, 0}};
  auto out = apply_T(k, random_bump(g, rng, 10), random_bump(g, rng, 10), box);
  CHECK(box.contains(out.box()));
}

TEST_CASE("discrete adjoint identity on 50 random triples") {
  for (int dim : {1, 2}) {
    GridSpec g(dim, dim == 1 ? 4.0 : 1.5, 0.1);
    auto k = builtin_riesz_kernel(dim);
    std::mt19937_64 rng(100 + dim);
    const int trials = dim == 1 ? 50 : 10;
    const std::int64_t w = dim == 1 ? 10 : 5;
    for (int t = 0; t < trials; ++t) {
      auto f1 = random_bump(g, rng, w), f2 = random_bump(g, rng, w), phi = random_bump(g, rng, w);
      const IndexBox all = g.full_box();
      const double a2 = inner_product(apply_partial_adjoint(k, 2, f1, f2, all), phi);
      const double b2 = inner_product(f2, apply_T(k, f1, phi, all));
      CHECK(std::abs(a2 - b2) <= 1e-10 * std::max(std::abs(a2), 1e-300));
      const double a1 = inner_product(apply_partial_adjoint(k, 1, f1, f2, all), phi);
      const double b1 = inner_product(f1, apply_T(k, phi, f2, all));
      CHECK(std::abs(a1 - b1) <= 1e-10 * std::max(std::abs(a1), 1e-300));
    }
  }
}

TEST_CASE("adjoint matches a non-transposed quadrature") {
  GridSpec g(1, 4.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  std::mt19937_64 rng(17);
  auto f1 = random_bump(g, rng, 15), f2 = random_bump(g, rng, 15);
  const IndexBox box{{0, 0}, {80, 0}};
  auto ours = apply_partial_adjoint(k, 2, f1, f2, box, nullptr, QuadraturePath::direct);
  auto oracle = naive_adjoint2(k, f1, f2, box);
  CHECK(max_abs_diff(ours, oracle) <= 1e-10 * sup_norm(oracle));
}

TEST_CASE("separated path agrees with direct path") {
  auto check_geometry = [](int dim, double r, double N, double h) {
    const double L = (2.0 * N + 2.0) * r + 1.0;
    GridSpec g(dim, std::ceil(L / h) * h, h);
    auto k = builtin_riesz_kernel(dim);
    auto cfg = SeparatedConfig::for_partial_adjoint({0, 0}, r, N, 2, dim);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    auto bump = [&](const Point& c) {
      auto chi = indicator(g, Ball{c, r});
      for (double& v : chi.samples())
        if (v != 0.0) v = u(rng);
      return chi;
    };
    auto a = bump(cfg.centers[0]);  // slot 0 (near y_l)
    auto b = bump(cfg.centers[1]);  // slot 1 (near y_l~)
    const IndexBox out = ball_box(g, Ball{cfg.centers[2], r});
    ApplyStats sd, ss;
    auto direct = apply_partial_adjoint(k, 2, b, a, out, &sd, QuadraturePath::direct);
    auto sep = apply_partial_adjoint(k, 2, b, a, out, &ss, QuadraturePath::separated);
    CHECK(ss.separated);
    CHECK_FALSE(sd.separated);
    CHECK(max_abs_diff(direct, sep) <= 1e-12 * sup_norm(direct));
    auto c = bump(cfg.centers[2]);
    auto tdirect = apply_T(k, b, c, ball_box(g, Ball{cfg.centers[0], r}), nullptr, QuadraturePath::direct);
    auto tsep = apply_T(k, b, c, ball_box(g, Ball{cfg.centers[0], r}), nullptr, QuadraturePath::separated);
    CHECK(max_abs_diff(tdirect, tsep) <= 1e-12 * sup_norm(tdirect));
  };
  check_geometry(1, 1.0, 8.0, 0.05);
  check_geometry(1, 1.0, 4.0, 0.02);
  check_geometry(2, 1.0, 8.0, 0.25);
}

TEST_CASE("separated path refuses overlapping supports") {
  GridSpec g(1, 4.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  auto f = indicator(g, Ball{{0, 0}, 1.0});
  CHECK_THROWS_AS(apply_T(k, f, f, g.full_box(), nullptr, QuadraturePath::separated), precondition_error);
}

TEST_CASE("point evaluation matches grid evaluation") {
  GridSpec g(1, 20.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  auto f1 = indicator(g, Ball{{8, 0}, 1.0});
  auto f2 = indicator(g, Ball{{16, 0}, 1.0});
  const std::int64_t i = 200;  // x = 0
  auto on_grid = apply_partial_adjoint(k, 2, f1, f2, IndexBox{{i, 0}, {i, 0}});
  CHECK(apply_partial_adjoint_at(k, 2, f1, f2, g.point(i, 0)) == doctest::Approx(on_grid.at(i)).epsilon(1e-14));
  auto t = apply_T(k, f1, f2, IndexBox{{i, 0}, {i, 0}});
  CHECK(apply_T_at(k, f1, f2, g.point(i, 0)) == doctest::Approx(t.at(i)).epsilon(1e-14));
}

TEST_CASE("thread count does not change results") {
  GridSpec g(1, 6.0, 0.05);
  auto k = builtin_riesz_kernel(1);
  std::mt19937_64 rng(21);
  auto f1 = random_bump(g, rng, 30), f2 = random_bump(g, rng, 30);
  set_thread_count(1);
  auto a = apply_T(k, f1, f2, g.full_box());
  set_thread_count(4);
  auto b = apply_T(k, f1, f2, g.full_box());
  set_thread_count(1);
  REQUIRE(a.box() == b.box());
  for (std::size_t j = 0; j < a.samples().size(); ++j) CHECK(a.samples()[j] == b.samples()[j]);
}

TEST_CASE("singular cells are counted") {
  GridSpec g(1, 2.0, 0.1);
  auto k = builtin_riesz_kernel(1);
  auto f = indicator(g, Ball{{0, 0}, 0.5});
  ApplyStats st;
  apply_T(k, f, f, g.full_box(), &st, QuadraturePath::direct);
  CHECK(st.skipped_cells > 0);
}
