#include "hpfact/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hpfact {

double distance(const Point& a, const Point& b, int dim) {
  const double d0 = a[0] - b[0];
  const double d1 = dim == 2 ? a[1] - b[1] : 0.0;
  return std::sqrt(d0 * d0 + d1 * d1);
}

bool IndexBox::contains(const IndexBox& other) const {
  if (other.empty()) return true;
  if (empty()) return false;
  return other.lo[0] >= lo[0] && other.hi[0] <= hi[0] && other.lo[1] >= lo[1] &&
         other.hi[1] <= hi[1];
}

bool IndexBox::operator==(const IndexBox& other) const {
  if (empty() && other.empty()) return true;
  return lo == other.lo && hi == other.hi;
}

IndexBox box_union(const IndexBox& a, const IndexBox& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  IndexBox u;
  for (int d = 0; d < 2; ++d) {
    u.lo[d] = std::min(a.lo[d], b.lo[d]);
    u.hi[d] = std::max(a.hi[d], b.hi[d]);
  }
  return u;
}

IndexBox box_intersection(const IndexBox& a, const IndexBox& b) {
  IndexBox r;
  if (a.empty() || b.empty()) return r;
  for (int d = 0; d < 2; ++d) {
    r.lo[d] = std::max(a.lo[d], b.lo[d]);
    r.hi[d] = std::min(a.hi[d], b.hi[d]);
  }
  if (r.empty()) return IndexBox{};
  return r;
}

GridSpec::GridSpec(int dim, double half_width, double spacing)
    : dim_(dim), half_width_(half_width), spacing_(spacing), cells_(0) {
  if (dim != 1 && dim != 2) throw precondition_error("grid dimension must be 1 or 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw precondition_error("grid spacing must be positive");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw precondition_error("grid half-width must be positive");
  const double ratio = 2.0 * half_width / spacing;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
    throw precondition_error("2L/h must be a positive integer");
  cells_ = static_cast<std::int64_t>(rounded);
}

IndexBox GridSpec::full_box() const {
  IndexBox b;
  b.lo = {0, 0};
  b.hi = {cells_, dim_ == 2 ? cells_ : 0};
  return b;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return dim_ == other.dim_ && half_width_ == other.half_width_ && spacing_ == other.spacing_;
}

double Ball::measure(int dim) const {
  return dim == 1 ? 2.0 * radius : std::numbers::pi * radius * radius;
}

void check_ball(const GridSpec& spec, const Ball& ball) {
  if (!(ball.radius > 0.0)) throw precondition_error("ball radius must be positive");
  if (ball.radius < 2.0 * spec.spacing() * (1.0 - 1e-12))
    throw precondition_error("ball radius below two grid cells (r < 2h)");
  const double L = spec.half_width();
  for (int d = 0; d < spec.dim(); ++d) {
    if (ball.center[d] - ball.radius < -L * (1.0 + 1e-12) ||
        ball.center[d] + ball.radius > L * (1.0 + 1e-12))
      throw grid_error("ball B(c, " + std::to_string(ball.radius) + ") leaves the grid box");
  }
}

bool in_ball(const GridSpec& spec, const Ball& ball, std::int64_t i0, std::int64_t i1) {
  const double d0 = spec.coord(i0) - ball.center[0];
  const double d1 = spec.dim() == 2 ? spec.coord(i1) - ball.center[1] : 0.0;
  return d0 * d0 + d1 * d1 < ball.radius * ball.radius;
}

namespace {

// Candidate index range covering [c - w, c + w] with one index of slack.
std::array<std::int64_t, 2> candidate_range(const GridSpec& spec, double c, double w) {
  const double L = spec.half_width();
  const double h = spec.spacing();
  auto lo = static_cast<std::int64_t>(std::floor((c - w + L) / h)) - 1;
  auto hi = static_cast<std::int64_t>(std::ceil((c + w + L) / h)) + 1;
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, spec.cells());
  return {lo, hi};
}

}  // namespace

std::array<std::int64_t, 2> ball_range(const GridSpec& spec, const Ball& ball, std::int64_t i0) {
  const double r = ball.radius;
  if (spec.dim() == 1) {
    auto [lo, hi] = candidate_range(spec, ball.center[0], r);
    while (lo <= hi && !in_ball(spec, ball, lo, 0)) ++lo;
    while (hi >= lo && !in_ball(spec, ball, hi, 0)) --hi;
    return {lo, hi};
  }
  const double d0 = spec.coord(i0) - ball.center[0];
  const double rem = r * r - d0 * d0;
  if (rem <= 0.0) return {1, 0};
  auto [lo, hi] = candidate_range(spec, ball.center[1], std::sqrt(rem));
  while (lo <= hi && !in_ball(spec, ball, i0, lo)) ++lo;
  while (hi >= lo && !in_ball(spec, ball, i0, hi)) --hi;
  return {lo, hi};
}

IndexBox ball_box(const GridSpec& spec, const Ball& ball) {
  IndexBox box;
  if (spec.dim() == 1) {
    auto [lo, hi] = ball_range(spec, ball);
    if (lo > hi) return IndexBox{};
    box.lo = {lo, 0};
    box.hi = {hi, 0};
    return box;
  }
  auto [rlo, rhi] = candidate_range(spec, ball.center[0], ball.radius);
  bool any = false;
  for (std::int64_t i0 = rlo; i0 <= rhi; ++i0) {
    auto [lo, hi] = ball_range(spec, ball, i0);
    if (lo > hi) continue;
    if (!any) {
      box.lo = {i0, lo};
      box.hi = {i0, hi};
      any = true;
    } else {
      box.lo[0] = std::min(box.lo[0], i0);
      box.hi[0] = std::max(box.hi[0], i0);
      box.lo[1] = std::min(box.lo[1], lo);
      box.hi[1] = std::max(box.hi[1], hi);
    }
  }
  return any ? box : IndexBox{};
}

std::int64_t ball_point_count(const GridSpec& spec, const Ball& ball) {
  if (spec.dim() == 1) {
    auto [lo, hi] = ball_range(spec, ball);
    return std::max<std::int64_t>(0, hi - lo + 1);
  }
  auto [rlo, rhi] = candidate_range(spec, ball.center[0], ball.radius);
  std::int64_t count = 0;
  for (std::int64_t i0 = rlo; i0 <= rhi; ++i0) {
    auto [lo, hi] = ball_range(spec, ball, i0);
    if (lo <= hi) count += hi - lo + 1;
  }
  return count;
}

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec) {}

GridFunction::GridFunction(const GridSpec& spec, const IndexBox& box)
    : spec_(spec), box_(box.empty() ? IndexBox{} : box) {
  if (!spec.full_box().contains(box_)) throw grid_error("support box outside the grid");
  samples_.assign(static_cast<std::size_t>(box_.size()), 0.0);
}

GridFunction::GridFunction(const GridSpec& spec, const IndexBox& box, std::vector<double> samples)
    : spec_(spec), box_(box.empty() ? IndexBox{} : box), samples_(std::move(samples)) {
  if (!spec.full_box().contains(box_)) throw grid_error("support box outside the grid");
  if (samples_.size() != static_cast<std::size_t>(box_.size()))
    throw precondition_error("sample count does not match support box");
  for (double v : samples_)
    if (!std::isfinite(v)) throw precondition_error("grid samples must be finite");
}

GridFunction GridFunction::from_function(const GridSpec& spec, const IndexBox& box,
                                         const std::function<double(const Point&)>& fn) {
  GridFunction f(spec, box);
  std::size_t k = 0;
  for (std::int64_t i0 = f.box_.lo[0]; i0 <= f.box_.hi[0]; ++i0)
    for (std::int64_t i1 = f.box_.lo[1]; i1 <= f.box_.hi[1]; ++i1)
      f.samples_[k++] = fn(spec.point(i0, i1));
  return f;
}

bool GridFunction::is_zero() const {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
}

GridFunction GridFunction::trimmed() const {
  IndexBox tight;
  bool any = false;
  for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v == 0.0) return;
    if (!any) {
      tight.lo = {i0, i1};
      tight.hi = {i0, i1};
      any = true;
      return;
    }
    tight.lo[0] = std::min(tight.lo[0], i0);
    tight.hi[0] = std::max(tight.hi[0], i0);
    tight.lo[1] = std::min(tight.lo[1], i1);
    tight.hi[1] = std::max(tight.hi[1], i1);
  });
  return window(*this, any ? tight : IndexBox{});
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    correction_ += (sum_ - t) + x;
  else
    correction_ += (x - t) + sum_;
  sum_ = t;
}

double integrate(const GridFunction& f) {
  CompensatedSum s;
  for (double v : f.samples()) s.add(v);
  return s.value() * f.spec().cell_volume();
}

GridFunction indicator(const GridSpec& spec, const Ball& ball) {
  check_ball(spec, ball);
  GridFunction f(spec, ball_box(spec, ball));
  const IndexBox& box = f.box();
  for (std::int64_t i0 = box.lo[0]; i0 <= box.hi[0]; ++i0) {
    auto [lo, hi] = ball_range(spec, ball, i0);
    for (std::int64_t i1 = lo; i1 <= hi; ++i1) {
      if (spec.dim() == 1)
        f.ref(i1, 0) = 1.0;
      else
        f.ref(i0, i1) = 1.0;
    }
    if (spec.dim() == 1) break;
  }
  return f;
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p > 0.0)) throw precondition_error("lp_norm requires p > 0");
  const double m = sup_norm(f);
  if (std::isinf(p) || m == 0.0) return m;
  CompensatedSum s;
  for (double v : f.samples()) {
    if (v != 0.0) s.add(std::pow(std::abs(v) / m, p));
  }
  return m * std::pow(s.value() * f.spec().cell_volume(), 1.0 / p);
}

double average_on_ball(const GridFunction& f, const Ball& ball) {
  const GridSpec& spec = f.spec();
  check_ball(spec, ball);
  CompensatedSum s;
  std::int64_t count = 0;
  const IndexBox bb = ball_box(spec, ball);
  for (std::int64_t i0 = bb.lo[0]; i0 <= bb.hi[0]; ++i0) {
    auto [lo, hi] = ball_range(spec, ball, i0);
    for (std::int64_t i1 = lo; i1 <= hi; ++i1) {
      s.add(spec.dim() == 1 ? f.at(i1, 0) : f.at(i0, i1));
      ++count;
    }
    if (spec.dim() == 1) break;
  }
  if (count == 0) throw precondition_error("average over an empty discrete ball");
  return s.value() / static_cast<double>(count);
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (!(f.spec() == g.spec())) throw precondition_error("mismatched grid specs");
  const IndexBox common = box_intersection(f.box(), g.box());
  CompensatedSum s;
  for (std::int64_t i0 = common.lo[0]; i0 <= common.hi[0]; ++i0)
    for (std::int64_t i1 = common.lo[1]; i1 <= common.hi[1]; ++i1)
      s.add(f.at(i0, i1) * g.at(i0, i1));
  return s.value() * f.spec().cell_volume();
}

GridFunction axpy(double a, const GridFunction& x, const GridFunction& y) {
  if (!(x.spec() == y.spec())) throw precondition_error("mismatched grid specs");
  GridFunction out = extend_to(y, box_union(x.box(), y.box()));
  x.for_each([&](std::int64_t i0, std::int64_t i1, double v) { out.ref(i0, i1) += a * v; });
  return out;
}

GridFunction add(const GridFunction& f, const GridFunction& g) { return axpy(1.0, f, g); }

GridFunction subtract(const GridFunction& f, const GridFunction& g) { return axpy(-1.0, g, f); }

GridFunction scale(double c, const GridFunction& f) {
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for (double& v : s) v *= c;
  return GridFunction(f.spec(), f.box(), std::move(s));
}

GridFunction multiply(const GridFunction& f, const GridFunction& g) {
  if (!(f.spec() == g.spec())) throw precondition_error("mismatched grid specs");
  GridFunction out(f.spec(), box_intersection(f.box(), g.box()));
  const IndexBox& b = out.box();
  for (std::int64_t i0 = b.lo[0]; i0 <= b.hi[0]; ++i0)
    for (std::int64_t i1 = b.lo[1]; i1 <= b.hi[1]; ++i1)
      out.ref(i0, i1) = f.at(i0, i1) * g.at(i0, i1);
  return out;
}

GridFunction restrict_to(const GridFunction& f, const Ball& ball) {
  const GridSpec& spec = f.spec();
  GridFunction out(spec, box_intersection(f.box(), ball_box(spec, ball)));
  const IndexBox& b = out.box();
  for (std::int64_t i0 = b.lo[0]; i0 <= b.hi[0]; ++i0)
    for (std::int64_t i1 = b.lo[1]; i1 <= b.hi[1]; ++i1)
      if (in_ball(spec, ball, i0, i1)) out.ref(i0, i1) = f.at(i0, i1);
  return out;
}

GridFunction extend_to(const GridFunction& f, const IndexBox& box) {
  if (!box.contains(f.box())) throw precondition_error("extend_to needs a containing box");
  return window(f, box);
}

GridFunction window(const GridFunction& f, const IndexBox& box) {
  GridFunction out(f.spec(), box);
  const IndexBox common = box_intersection(f.box(), out.box());
  for (std::int64_t i0 = common.lo[0]; i0 <= common.hi[0]; ++i0)
    for (std::int64_t i1 = common.lo[1]; i1 <= common.hi[1]; ++i1)
      out.ref(i0, i1) = f.at(i0, i1);
  return out;
}

}  // namespace hpfact
