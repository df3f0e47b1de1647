#include "hpfact/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hpfact/parallel.hpp"

namespace hpfact {

namespace {

struct Samples {
  std::vector<Point> pts;
  std::vector<double> vals;
};

Samples nonzero_samples(const GridFunction& f) {
  Samples s;
  const GridSpec& spec = f.spec();
  f.for_each([&](std::int64_t i0, std::int64_t i1, double v) {
    if (v == 0.0) return;
    s.pts.push_back(spec.point(i0, i1));
    s.vals.push_back(v);
  });
  return s;
}

std::vector<Point> box_points(const GridSpec& spec, const IndexBox& box) {
  std::vector<Point> pts;
  const IndexBox b = box_intersection(box, spec.full_box());
  pts.reserve(static_cast<std::size_t>(b.size()));
  for (std::int64_t i0 = b.lo[0]; i0 <= b.hi[0]; ++i0)
    for (std::int64_t i1 = b.lo[1]; i1 <= b.hi[1]; ++i1) pts.push_back(spec.point(i0, i1));
  return pts;
}

// One-dimensional interpolation basis on an interval: either the distinct
// sample coordinates themselves (exact) or Chebyshev points of the first kind
// with barycentric weights.
struct AxisBasis {
  std::vector<double> nodes;
  std::vector<double> weights;
  bool exact = true;

  std::size_t size() const { return nodes.size(); }

  void eval(double x, double* out) const {
    const std::size_t p = nodes.size();
    if (exact) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
      if (it == nodes.end() || *it != x) throw std::logic_error("coordinate is not an exact node");
      std::fill(out, out + p, 0.0);
      out[it - nodes.begin()] = 1.0;
      return;
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double d = x - nodes[k];
      if (d == 0.0) {
        std::fill(out, out + p, 0.0);
        out[k] = 1.0;
        return;
      }
      out[k] = weights[k] / d;
      denom += out[k];
    }
    for (std::size_t k = 0; k < p; ++k) out[k] /= denom;
  }
};

struct SlotBasis {
  int dim = 1;
  std::array<AxisBasis, 2> axes;

  std::size_t size() const { return dim == 1 ? axes[0].size() : axes[0].size() * axes[1].size(); }

  Point node(std::size_t k) const {
    if (dim == 1) return {axes[0].nodes[k], 0.0};
    const std::size_t p1 = axes[1].size();
    return {axes[0].nodes[k / p1], axes[1].nodes[k % p1]};
  }

  // out has size(); scratch has axes[0].size() + axes[1].size().
  void eval(const Point& x, double* out, double* scratch) const {
    if (dim == 1) {
      axes[0].eval(x[0], out);
      return;
    }
    const std::size_t p0 = axes[0].size(), p1 = axes[1].size();
    axes[0].eval(x[0], scratch);
    axes[1].eval(x[1], scratch + p0);
    for (std::size_t a = 0; a < p0; ++a)
      for (std::size_t b = 0; b < p1; ++b) out[a * p1 + b] = scratch[a] * scratch[p0 + b];
  }
};

constexpr double kLogTargetAccuracy = 36.9;  // -ln(1e-16)
constexpr std::size_t kMaxChebyshevNodes = 64;

struct SeparatedPlan {
  bool feasible = false;
  std::array<SlotBasis, 3> bases;
  double cost = 0.0;
  int max_nodes = 0;
};

SeparatedPlan plan_separated(int dim, const std::array<const std::vector<Point>*, 3>& pts,
                             double h) {
  SeparatedPlan plan;
  std::array<std::array<double, 2>, 3> lo{}, hi{};
  for (int s = 0; s < 3; ++s) {
    if (pts[s]->empty()) return plan;
    for (int d = 0; d < 2; ++d) {
      lo[s][d] = hi[s][d] = (*pts[s])[0][d];
      for (const auto& p : *pts[s]) {
        lo[s][d] = std::min(lo[s][d], p[d]);
        hi[s][d] = std::max(hi[s][d], p[d]);
      }
    }
  }
  auto box_gap = [&](int s, int t) {
    double g2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double g = std::max({0.0, lo[s][d] - hi[t][d], lo[t][d] - hi[s][d]});
      g2 += g * g;
    }
    return std::sqrt(g2);
  };
  std::array<double, 3> gap{};
  for (int s = 0; s < 3; ++s) {
    gap[s] = std::min(box_gap(s, (s + 1) % 3), box_gap(s, (s + 2) % 3));
    if (gap[s] < h * (1.0 - 1e-12)) return plan;
  }
  double sep_cost = 1.0;
  double sample_cost = 0.0;
  for (int s = 0; s < 3; ++s) {
    SlotBasis& basis = plan.bases[s];
    basis.dim = dim;
    for (int d = 0; d < dim; ++d) {
      AxisBasis& axis = basis.axes[d];
      std::vector<double> coords;
      coords.reserve(pts[s]->size());
      for (const auto& p : *pts[s]) coords.push_back(p[d]);
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
      const double w = 0.5 * (hi[s][d] - lo[s][d]);
      std::size_t need = 1;
      if (w > 0.0) {
        // Singularities are assumed no closer than half the box gap.
        const double u = 1.0 + 0.5 * gap[s] / w;
        const double rho = u + std::sqrt(u * u - 1.0);
        need = static_cast<std::size_t>(std::ceil(kLogTargetAccuracy / std::log(rho)));
        need = std::max<std::size_t>(need, 2);
      }
      if (coords.size() <= need) {
        axis.exact = true;
        axis.nodes = std::move(coords);
      } else {
        if (need > kMaxChebyshevNodes) return plan;
        axis.exact = false;
        axis.nodes.resize(need);
        axis.weights.resize(need);
        const double mid = 0.5 * (hi[s][d] + lo[s][d]);
        for (std::size_t k = 0; k < need; ++k) {
          const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * need);
          axis.nodes[k] = mid + w * std::cos(theta);
          axis.weights[k] = ((k % 2) ? -1.0 : 1.0) * std::sin(theta);
        }
      }
      plan.max_nodes = std::max(plan.max_nodes, static_cast<int>(axis.nodes.size()));
    }
    if (dim == 1) basis.axes[1].nodes = {0.0};
    sep_cost *= static_cast<double>(basis.size());
    sample_cost += static_cast<double>(pts[s]->size()) * static_cast<double>(basis.size());
  }
  plan.cost = 4.0 * sep_cost + sample_cost;
  plan.feasible = true;
  return plan;
}

// Generic contraction with output slot `out`; inputs[out] is ignored.
std::vector<double> contract(const KernelSpec& kernel, int out, const std::array<Samples, 3>& inputs,
                             const std::vector<Point>& out_pts, double h, double cell_volume,
                             ApplyStats* stats, QuadraturePath path) {
  std::vector<double> result(out_pts.size(), 0.0);
  const int sa = out == 0 ? 1 : 0;
  const int sb = out == 2 ? 1 : 2;
  const Samples& A = inputs[sa];
  const Samples& B = inputs[sb];
  ApplyStats local;
  if (A.pts.empty() || B.pts.empty() || out_pts.empty()) {
    if (stats) *stats = local;
    return result;
  }
  const double weight = cell_volume * cell_volume;

  SeparatedPlan plan;
  if (path != QuadraturePath::direct) {
    std::array<const std::vector<Point>*, 3> pts{};
    pts[out] = &out_pts;
    pts[sa] = &A.pts;
    pts[sb] = &B.pts;
    plan = plan_separated(kernel.dim, pts, h);
    if (path == QuadraturePath::separated && !plan.feasible)
      throw precondition_error("separated quadrature requested for non-separated supports");
  }
  const double direct_cost = static_cast<double>(out_pts.size()) *
                             static_cast<double>(A.pts.size()) * static_cast<double>(B.pts.size());
  const bool use_separated =
      plan.feasible && (path == QuadraturePath::separated || plan.cost < 0.5 * direct_cost);

  if (use_separated) {
    local.separated = true;
    local.max_nodes = plan.max_nodes;
    auto moments = [&](const Samples& S, const SlotBasis& basis) {
      std::vector<double> m(basis.size(), 0.0), buf(basis.size()),
          scratch(basis.axes[0].size() + basis.axes[1].size());
      for (std::size_t i = 0; i < S.pts.size(); ++i) {
        basis.eval(S.pts[i], buf.data(), scratch.data());
        for (std::size_t k = 0; k < m.size(); ++k) m[k] += S.vals[i] * buf[k];
      }
      return m;
    };
    const std::vector<double> ma = moments(A, plan.bases[sa]);
    const std::vector<double> mb = moments(B, plan.bases[sb]);
    const SlotBasis& ob = plan.bases[out];
    std::vector<double> g(ob.size(), 0.0);
    parallel_for(ob.size(), [&](std::size_t begin, std::size_t end) {
      std::array<Point, 3> args;
      for (std::size_t ko = begin; ko < end; ++ko) {
        args[out] = ob.node(ko);
        double acc = 0.0;
        for (std::size_t ka = 0; ka < ma.size(); ++ka) {
          if (ma[ka] == 0.0) continue;
          args[sa] = plan.bases[sa].node(ka);
          double inner = 0.0;
          for (std::size_t kb = 0; kb < mb.size(); ++kb) {
            args[sb] = plan.bases[sb].node(kb);
            inner += kernel(args[0], args[1], args[2]) * mb[kb];
          }
          acc += ma[ka] * inner;
        }
        g[ko] = acc * weight;
      }
    });
    parallel_for(out_pts.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> buf(ob.size()), scratch(ob.axes[0].size() + ob.axes[1].size());
      for (std::size_t i = begin; i < end; ++i) {
        ob.eval(out_pts[i], buf.data(), scratch.data());
        double acc = 0.0;
        for (std::size_t k = 0; k < buf.size(); ++k) acc += buf[k] * g[k];
        result[i] = acc;
      }
    });
    if (stats) *stats = local;
    return result;
  }

  const double h2 = h * h;
  const int n = kernel.dim;
  auto close = [n, h2](const Point& a, const Point& b) {
    const double d0 = a[0] - b[0];
    const double d1 = n == 2 ? a[1] - b[1] : 0.0;
    return d0 * d0 + d1 * d1 < h2;
  };
  std::vector<std::int64_t> skipped(out_pts.size(), 0);
  parallel_for(out_pts.size(), [&](std::size_t begin, std::size_t end) {
    std::array<Point, 3> args;
    for (std::size_t i = begin; i < end; ++i) {
      args[out] = out_pts[i];
      double acc = 0.0;
      std::int64_t skip = 0;
      for (std::size_t a = 0; a < A.pts.size(); ++a) {
        args[sa] = A.pts[a];
        double inner = 0.0;
        for (std::size_t b = 0; b < B.pts.size(); ++b) {
          args[sb] = B.pts[b];
          if (close(args[0], args[1]) || close(args[0], args[2])) {
            ++skip;
            continue;
          }
          inner += kernel(args[0], args[1], args[2]) * B.vals[b];
        }
        acc += A.vals[a] * inner;
      }
      result[i] = acc * weight;
      skipped[i] = skip;
    }
  });
  for (auto s : skipped) local.skipped_cells += s;
  if (stats) *stats = local;
  return result;
}

void check_pair(const GridFunction& f1, const GridFunction& f2) {
  if (!(f1.spec() == f2.spec())) throw precondition_error("mismatched grid specs");
}

std::array<Samples, 3> slot_inputs(int out, int l, const GridFunction& f1, const GridFunction& f2) {
  std::array<Samples, 3> in;
  if (out == 0) {
    in[1] = nonzero_samples(f1);
    in[2] = nonzero_samples(f2);
  } else if (l == 1) {
    in[0] = nonzero_samples(f1);
    in[2] = nonzero_samples(f2);
  } else {
    in[0] = nonzero_samples(f2);
    in[1] = nonzero_samples(f1);
  }
  return in;
}

GridFunction apply_on_box(const KernelSpec& kernel, int out, int l, const GridFunction& f1,
                          const GridFunction& f2, const IndexBox& eval_box, ApplyStats* stats,
                          QuadraturePath path) {
  check_pair(f1, f2);
  const GridSpec& spec = f1.spec();
  if (kernel.dim != spec.dim()) throw precondition_error("kernel and grid dimensions differ");
  const IndexBox box = box_intersection(eval_box, spec.full_box());
  const auto pts = box_points(spec, box);
  auto values = contract(kernel, out, slot_inputs(out, l, f1, f2), pts, spec.spacing(),
                         spec.cell_volume(), stats, path);
  return GridFunction(spec, box, std::move(values));
}

double apply_at(const KernelSpec& kernel, int out, int l, const GridFunction& f1,
                const GridFunction& f2, const Point& x, ApplyStats* stats, QuadraturePath path) {
  check_pair(f1, f2);
  const GridSpec& spec = f1.spec();
  if (kernel.dim != spec.dim()) throw precondition_error("kernel and grid dimensions differ");
  const std::vector<Point> pts{x};
  return contract(kernel, out, slot_inputs(out, l, f1, f2), pts, spec.spacing(),
                  spec.cell_volume(), stats, path)[0];
}

void check_slot(int l) {
  if (l != 1 && l != 2) throw precondition_error("partial adjoint slot must be 1 or 2");
}

}  // namespace

GridFunction apply_T(const KernelSpec& kernel, const GridFunction& f1, const GridFunction& f2,
                     const IndexBox& eval_box, ApplyStats* stats, QuadraturePath path) {
  return apply_on_box(kernel, 0, 0, f1, f2, eval_box, stats, path);
}

GridFunction apply_partial_adjoint(const KernelSpec& kernel, int l, const GridFunction& f1,
                                   const GridFunction& f2, const IndexBox& eval_box,
                                   ApplyStats* stats, QuadraturePath path) {
  check_slot(l);
  return apply_on_box(kernel, l, l, f1, f2, eval_box, stats, path);
}

double apply_T_at(const KernelSpec& kernel, const GridFunction& f1, const GridFunction& f2,
                  const Point& x, ApplyStats* stats, QuadraturePath path) {
  return apply_at(kernel, 0, 0, f1, f2, x, stats, path);
}

double apply_partial_adjoint_at(const KernelSpec& kernel, int l, const GridFunction& f1,
                                const GridFunction& f2, const Point& x, ApplyStats* stats,
                                QuadraturePath path) {
  check_slot(l);
  return apply_at(kernel, l, l, f1, f2, x, stats, path);
}

}  // namespace hpfact
