#include "hpfact/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hpfact/calibration.hpp"

namespace hpfact {

double pair_distance_sum(const Point& y0, const Point& y1, const Point& y2, int dim) {
  return 2.0 * (distance(y0, y1, dim) + distance(y0, y2, dim) + distance(y1, y2, dim));
}

KernelSpec builtin_riesz_kernel(int n, int component) {
  if (n != 1 && n != 2) throw precondition_error("riesz kernel: n must be 1 or 2");
  if (component < 1 || component > n) throw precondition_error("riesz kernel: component out of range");
  KernelSpec k;
  k.name = "riesz";
  k.dim = n;
  const auto& cal = n == 1 ? calibration::riesz_1d : calibration::riesz_2d;
  k.epsilon = cal.epsilon;
  k.size_constant = cal.size_constant;
  k.homogeneity_constant = cal.homogeneity_constant;
  const int j = component - 1;
  const double power = (2.0 * n + 1.0) / 2.0;
  if (n == 1) {
    k.eval = [](const Point& y0, const Point& y1, const Point& y2) {
      const double a = y0[0] - y1[0];
      const double b = y0[0] - y2[0];
      const double s = a * a + b * b;
      return a / (s * std::sqrt(s));
    };
  } else {
    k.eval = [j, power](const Point& y0, const Point& y1, const Point& y2) {
      const double a0 = y0[0] - y1[0], a1 = y0[1] - y1[1];
      const double b0 = y0[0] - y2[0], b1 = y0[1] - y2[1];
      const double s = a0 * a0 + a1 * a1 + b0 * b0 + b1 * b1;
      return (j == 0 ? a0 : a1) / std::pow(s, power);
    };
  }
  return k;
}

KernelSpec scaled_kernel(const KernelSpec& kernel, double c) {
  KernelSpec k = kernel;
  k.name = kernel.name + "*" + std::to_string(c);
  k.size_constant *= std::abs(c);
  k.homogeneity_constant *= std::abs(c);
  k.eval = [inner = kernel.eval, c](const Point& y0, const Point& y1, const Point& y2) {
    return c * inner(y0, y1, y2);
  };
  return k;
}

KernelRegistry::KernelRegistry() {
  factories_["riesz"] = [](int dim, int component) { return builtin_riesz_kernel(dim, component); };
}

KernelRegistry& KernelRegistry::instance() {
  static KernelRegistry registry;
  return registry;
}

void KernelRegistry::add(const std::string& name, KernelFactory factory) {
  factories_[name] = std::move(factory);
}

bool KernelRegistry::contains(const std::string& name) const { return factories_.count(name) > 0; }

KernelSpec KernelRegistry::make(const std::string& name, int dim, int component) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw precondition_error("unknown kernel '" + name + "'");
  return it->second(dim, component);
}

std::vector<std::string> KernelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

namespace {

struct TripleSampler {
  explicit TripleSampler(int dim, std::uint64_t seed) : dim(dim), rng(seed) {}

  Point uniform_point() {
    Point p{unit(rng), dim == 2 ? unit(rng) : 0.0};
    return p;
  }

  Point direction() {
    if (dim == 1) return {coin(rng) ? 1.0 : -1.0, 0.0};
    const double t = angle(rng);
    return {std::cos(t), std::sin(t)};
  }

  // Mixes independent triples with near-coincident pairs so that the scan
  // reaches every corner of the off-diagonal set.
  std::array<Point, 3> triple() {
    std::array<Point, 3> y{uniform_point(), uniform_point(), uniform_point()};
    const int mode = static_cast<int>(rng() % 4);
    if (mode > 0) {
      const int a = mode - 1;
      const int b = (a + 1) % 3;
      const double s = std::pow(10.0, -4.0 * u01(rng));
      const Point d = direction();
      y[b] = {y[a][0] + s * d[0], y[a][1] + s * d[1]};
    }
    return y;
  }

  int dim;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{-1.0, 1.0};
  std::uniform_real_distribution<double> u01{0.0, 1.0};
  std::uniform_real_distribution<double> angle{0.0, 2.0 * std::numbers::pi};
  std::bernoulli_distribution coin{0.5};
};

}  // namespace

CheckReport check_size_condition(const KernelSpec& kernel, std::int64_t sample_count,
                                 std::uint64_t seed) {
  TripleSampler sampler(kernel.dim, seed);
  const int n = kernel.dim;
  double worst = 0.0;
  std::int64_t used = 0;
  for (std::int64_t s = 0; s < sample_count; ++s) {
    const auto y = sampler.triple();
    const double S = pair_distance_sum(y[0], y[1], y[2], n);
    if (!(S > 1e-12)) continue;
    const double v = std::abs(kernel(y[0], y[1], y[2])) * std::pow(S, 2.0 * n);
    worst = std::max(worst, v);
    ++used;
  }
  CheckReport r;
  r.name = "size";
  r.measured = worst;
  r.declared = kernel.size_constant;
  r.pass = std::isfinite(worst) && worst <= 2.0 * kernel.size_constant;
  r.samples = used;
  r.seed = seed;
  return r;
}

SmoothnessReport check_smoothness_condition(const KernelSpec& kernel, std::int64_t sample_count,
                                            std::uint64_t seed, double epsilon) {
  const double eps = epsilon < 0.0 ? kernel.epsilon : epsilon;
  const int n = kernel.dim;
  TripleSampler sampler(n, seed);
  constexpr std::array<double, 3> kScales{1e-1, 1e-2, 1e-3};

  SmoothnessReport r;
  r.name = "smoothness";
  r.epsilon = eps;
  double worst = 0.0;
  std::int64_t used = 0;

  auto ratio = [&](const std::array<Point, 3>& y, int j, double s, const Point& dir, double S,
                   double K0) {
    double m = 0.0;
    for (int k = 0; k < 3; ++k) m = std::max(m, distance(y[j], y[k], n));
    const double step = s * 0.5 * m;
    if (!(step > 0.0)) return -1.0;
    std::array<Point, 3> yp = y;
    yp[j] = {y[j][0] + step * dir[0], y[j][1] + step * dir[1]};
    const double dk = std::abs(kernel(yp[0], yp[1], yp[2]) - K0);
    return dk * std::pow(S, 2.0 * n + eps) / std::pow(step, eps);
  };

  for (std::int64_t s = 0; s < sample_count; ++s) {
    const auto y = sampler.triple();
    const double S = pair_distance_sum(y[0], y[1], y[2], n);
    if (!(S > 1e-12)) continue;
    const double K0 = kernel(y[0], y[1], y[2]);
    for (int j = 0; j < 3; ++j) {
      const Point dir = sampler.direction();
      const double frac = std::pow(10.0, -3.0 * sampler.u01(sampler.rng));
      const double v = ratio(y, j, frac, dir, S, K0);
      if (v >= 0.0) {
        worst = std::max(worst, v);
        ++used;
      }
      for (std::size_t k = 0; k < kScales.size(); ++k) {
        const double w = ratio(y, j, kScales[k], dir, S, K0);
        if (w >= 0.0) r.scale_max[k] = std::max(r.scale_max[k], w);
      }
    }
  }
  r.measured = std::max({worst, r.scale_max[0], r.scale_max[1], r.scale_max[2]});
  r.declared = kernel.size_constant;
  r.pass = std::isfinite(r.measured) && r.measured <= 2.0 * kernel.size_constant;
  r.samples = used;
  r.seed = seed;
  r.monotone_growth = r.scale_max[1] > r.scale_max[0] && r.scale_max[2] > r.scale_max[1];
  return r;
}

void SeparatedConfig::validate() const {
  if (!(radius > 0.0) || !(separation > 0.0))
    throw precondition_error("separated config needs positive radius and N");
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (distance(centers[a], centers[b], dim) < 2.0 * radius)
        throw precondition_error("separated config: balls overlap");
  const double nr = separation * radius;
  for (int l = 1; l <= 2; ++l) {
    const double d = distance(centers[0], centers[l], dim);
    if (d < 0.5 * nr * (1.0 - 1e-12) || d > 2.0 * nr * (1.0 + 1e-12))
      throw precondition_error("separated config: |x0 - xl| not comparable to N r");
  }
}

SeparatedConfig SeparatedConfig::for_partial_adjoint(const Point& x0, double r, double N, int l,
                                                     int dim) {
  if (l != 1 && l != 2) throw precondition_error("slot l must be 1 or 2");
  const double step = N * r / std::sqrt(static_cast<double>(dim));
  const Point v{step, dim == 2 ? step : 0.0};
  const Point yl{x0[0] + v[0], x0[1] + v[1]};
  const Point ylt{yl[0] + v[0], yl[1] + v[1]};
  SeparatedConfig cfg;
  cfg.dim = dim;
  cfg.radius = r;
  cfg.separation = N;
  // l = 2: K(z2, z1, x0) with z2 near y_l, z1 near y_l~.  l = 1: K(z1, x0, z2).
  cfg.centers = l == 2 ? std::array<Point, 3>{yl, ylt, x0} : std::array<Point, 3>{yl, x0, ylt};
  return cfg;
}

HomogeneityReport check_homogeneity(const KernelSpec& kernel, const SeparatedConfig& cfg,
                                    int per_axis) {
  cfg.validate();
  const int n = cfg.dim;
  // Lattice of points strictly inside a ball, center included.
  std::vector<Point> offsets;
  const int m = std::max(1, per_axis);
  for (int a = 0; a < m; ++a) {
    const double ta = m == 1 ? 0.0 : -1.0 + 2.0 * a / (m - 1);
    for (int b = 0; b < (n == 2 ? m : 1); ++b) {
      const double tb = (n == 1 || m == 1) ? 0.0 : -1.0 + 2.0 * b / (m - 1);
      Point o{0.999 * cfg.radius * ta, 0.999 * cfg.radius * tb};
      if (o[0] * o[0] + o[1] * o[1] < cfg.radius * cfg.radius) offsets.push_back(o);
    }
  }
  auto shifted = [](const Point& c, const Point& o) { return Point{c[0] + o[0], c[1] + o[1]}; };
  double lowest = std::numeric_limits<double>::infinity();
  std::int64_t count = 0;
  for (const auto& o0 : offsets)
    for (const auto& o1 : offsets)
      for (const auto& o2 : offsets) {
        const double v = std::abs(kernel(shifted(cfg.centers[0], o0), shifted(cfg.centers[1], o1),
                                          shifted(cfg.centers[2], o2)));
        lowest = std::min(lowest, v);
        ++count;
      }
  HomogeneityReport r;
  r.name = "homogeneity";
  r.lower_ratio = lowest * std::pow(cfg.separation * cfg.radius, 2.0 * n);
  r.measured = r.lower_ratio;
  r.declared = kernel.homogeneity_constant;
  r.pass = r.lower_ratio >= 0.5 * kernel.homogeneity_constant;
  r.samples = count;
  return r;
}

}  // namespace hpfact
