#pragma once

// Bilinear Calderon-Zygmund kernels K(y0, y1, y2) and numerical checks of
// their size, smoothness and 2n-homogeneity constants.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hpfact/grid.hpp"

namespace hpfact {

using KernelEval = std::function<double(const Point& y0, const Point& y1, const Point& y2)>;

struct KernelSpec {
  std::string name;
  int dim = 1;
  double epsilon = 0.75;              // smoothness exponent
  double size_constant = 1.0;         // A
  double homogeneity_constant = 1.0;  // C_hom
  KernelEval eval;

  double operator()(const Point& y0, const Point& y1, const Point& y2) const {
    return eval(y0, y1, y2);
  }
};

// K(y0,y1,y2) = (y0 - y1)_j / (|y0-y1|^2 + |y0-y2|^2)^{(2n+1)/2}, component j in 1..n.
KernelSpec builtin_riesz_kernel(int n, int component = 1);
// c * K with A scaled by |c| and C_hom by |c|.
KernelSpec scaled_kernel(const KernelSpec& kernel, double c);

// Sum over all ordered pairs k, l of |y_k - y_l|.
double pair_distance_sum(const Point& y0, const Point& y1, const Point& y2, int dim);

using KernelFactory = std::function<KernelSpec(int dim, int component)>;

class KernelRegistry {
 public:
  static KernelRegistry& instance();
  void add(const std::string& name, KernelFactory factory);
  bool contains(const std::string& name) const;
  KernelSpec make(const std::string& name, int dim, int component = 1) const;
  std::vector<std::string> names() const;

 private:
  KernelRegistry();
  std::map<std::string, KernelFactory> factories_;
};

struct CheckReport {
  std::string name;
  double measured = 0.0;
  double declared = 0.0;
  bool pass = false;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

struct SmoothnessReport : CheckReport {
  double epsilon = 0.0;
  // Max ratio at perturbation sizes 1e-1, 1e-2, 1e-3 of the admissible radius.
  std::array<double, 3> scale_max{0.0, 0.0, 0.0};
  bool monotone_growth = false;
};

// max |K| (sum_{k,l} |y_k - y_l|)^{2n}; passes iff <= 2A.
CheckReport check_size_condition(const KernelSpec& kernel, std::int64_t sample_count,
                                 std::uint64_t seed);
// max |K(y) - K(y')| (sum |y_k - y_l|)^{2n+eps} / |y_j - y_j'|^eps over slots j and
// perturbations with |y_j - y_j'| <= max_k |y_j - y_k| / 2; passes iff <= 2A.
// epsilon < 0 uses the kernel's declared exponent.
SmoothnessReport check_smoothness_condition(const KernelSpec& kernel, std::int64_t sample_count,
                                            std::uint64_t seed, double epsilon = -1.0);

struct SeparatedConfig {
  int dim = 1;
  std::array<Point, 3> centers{};
  double radius = 1.0;
  double separation = 1.0;  // N

  // Throws precondition_error unless the balls are disjoint and |x0 - xl| in [Nr/2, 2Nr].
  void validate() const;

  // The argument geometry of T_l^*(...)(x0) in the atom construction: the
  // kernel's first argument lives on B(x0 + v, r), with v = (Nr/sqrt n)(1,..,1).
  static SeparatedConfig for_partial_adjoint(const Point& x0, double r, double N, int l, int dim);
};

struct HomogeneityReport : CheckReport {
  double lower_ratio = 0.0;  // min |K| (N r)^{2n}
};

// Samples a fixed lattice of points in each ball (per_axis points per axis).
HomogeneityReport check_homogeneity(const KernelSpec& kernel, const SeparatedConfig& cfg,
                                    int per_axis = 9);

}  // namespace hpfact
