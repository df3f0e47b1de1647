#pragma once

// Compactly supported functions sampled on a uniform grid over [-L, L]^n,
// n in {1, 2}, and the midpoint-rule primitives built on them.
//
// Grid node i on each axis sits at -L + i*h, i = 0 .. 2L/h. A GridFunction
// stores samples only over its support box; everything outside is an exact
// zero. For dim 1 the second axis is the single index 0.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hpfact {

class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class grid_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b, int dim);

struct IndexBox {
  std::array<std::int64_t, 2> lo{0, 0};
  std::array<std::int64_t, 2> hi{-1, 0};  // inclusive; lo > hi on axis 0 means empty

  bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1]; }
  std::int64_t extent(int axis) const { return empty() ? 0 : hi[axis] - lo[axis] + 1; }
  std::int64_t size() const { return extent(0) * extent(1); }
  bool contains(std::int64_t i0, std::int64_t i1) const {
    return i0 >= lo[0] && i0 <= hi[0] && i1 >= lo[1] && i1 <= hi[1];
  }
  bool contains(const IndexBox& other) const;
  bool operator==(const IndexBox& other) const;
};

IndexBox box_union(const IndexBox& a, const IndexBox& b);
IndexBox box_intersection(const IndexBox& a, const IndexBox& b);

class GridSpec {
 public:
  GridSpec(int dim, double half_width, double spacing);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }
  std::int64_t cells() const { return cells_; }  // 2L/h
  std::int64_t points_per_axis() const { return cells_ + 1; }
  double cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

  double coord(std::int64_t i) const { return -half_width_ + static_cast<double>(i) * spacing_; }
  Point point(std::int64_t i0, std::int64_t i1) const {
    return {coord(i0), dim_ == 2 ? coord(i1) : 0.0};
  }
  IndexBox full_box() const;

  bool operator==(const GridSpec& other) const;

 private:
  int dim_;
  double half_width_;
  double spacing_;
  std::int64_t cells_;
};

struct Ball {
  Point center{0.0, 0.0};
  double radius = 1.0;

  // Continuum Lebesgue measure |B|.
  double measure(int dim) const;
};

// Throws grid_error if the ball leaves the box, precondition_error if r < 2h.
void check_ball(const GridSpec& spec, const Ball& ball);
// Strict membership |x - c| < r; the single predicate every discrete ball uses.
bool in_ball(const GridSpec& spec, const Ball& ball, std::int64_t i0, std::int64_t i1);
// Index range on axis 0 (dim 1) or of row i0 along axis 1 (dim 2); empty if lo > hi.
std::array<std::int64_t, 2> ball_range(const GridSpec& spec, const Ball& ball, std::int64_t i0 = 0);
IndexBox ball_box(const GridSpec& spec, const Ball& ball);
std::int64_t ball_point_count(const GridSpec& spec, const Ball& ball);

class GridFunction {
 public:
  explicit GridFunction(const GridSpec& spec);
  GridFunction(const GridSpec& spec, const IndexBox& box);
  GridFunction(const GridSpec& spec, const IndexBox& box, std::vector<double> samples);

  static GridFunction from_function(const GridSpec& spec, const IndexBox& box,
                                    const std::function<double(const Point&)>& fn);

  const GridSpec& spec() const { return spec_; }
  const IndexBox& box() const { return box_; }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  std::size_t offset(std::int64_t i0, std::int64_t i1) const {
    return static_cast<std::size_t>((i0 - box_.lo[0]) * box_.extent(1) + (i1 - box_.lo[1]));
  }
  double at(std::int64_t i0, std::int64_t i1 = 0) const {
    return box_.contains(i0, i1) ? samples_[offset(i0, i1)] : 0.0;
  }
  double& ref(std::int64_t i0, std::int64_t i1 = 0) { return samples_[offset(i0, i1)]; }

  // Visits every stored sample in storage order: fn(i0, i1, value).
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::size_t k = 0;
    for (std::int64_t i0 = box_.lo[0]; i0 <= box_.hi[0]; ++i0)
      for (std::int64_t i1 = box_.lo[1]; i1 <= box_.hi[1]; ++i1) fn(i0, i1, samples_[k++]);
  }

  bool is_zero() const;
  // Smallest box holding every nonzero sample.
  GridFunction trimmed() const;

 private:
  GridSpec spec_;
  IndexBox box_;
  std::vector<double> samples_;
};

// Neumaier-compensated running sum; deterministic for a fixed input order.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double integrate(const GridFunction& f);
GridFunction indicator(const GridSpec& spec, const Ball& ball);
double lp_norm(const GridFunction& f, double p);
double sup_norm(const GridFunction& f);
double average_on_ball(const GridFunction& f, const Ball& ball);
double inner_product(const GridFunction& f, const GridFunction& g);

// a*x + y; support box is the union.
GridFunction axpy(double a, const GridFunction& x, const GridFunction& y);
GridFunction add(const GridFunction& f, const GridFunction& g);
GridFunction subtract(const GridFunction& f, const GridFunction& g);
GridFunction scale(double c, const GridFunction& f);
// Pointwise product; support box is the intersection.
GridFunction multiply(const GridFunction& f, const GridFunction& g);
// f * chi_B.
GridFunction restrict_to(const GridFunction& f, const Ball& ball);
// Same samples over a larger (or equal) box.
GridFunction extend_to(const GridFunction& f, const IndexBox& box);
// Samples of f on the given box (zero where f has none).
GridFunction window(const GridFunction& f, const IndexBox& box);

}  // namespace hpfact
