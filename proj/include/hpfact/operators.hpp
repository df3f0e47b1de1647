#pragma once

// The bilinear operator T and its partial adjoints T_1^*, T_2^* as midpoint
// quadratures of one discrete trilinear form
//
//   F(u0, u1, u2) = h^{3n} sum K(x0, x1, x2) u0(x0) u1(x1) u2(x2),
//
// with cells where |x0 - x1| < h or |x0 - x2| < h skipped. T fixes slot 0 as
// the output, T_l^* fixes slot l; each is therefore the exact discrete
// transpose of the others.
//
// Two evaluation paths share that definition:
//   direct     the plain triple sum, O(|out| |supp f1| |supp f2|);
//   separated  when the three supports sit in pairwise disjoint boxes, K is
//              replaced by its tensor Chebyshev interpolant on those boxes
//              (node count picked for ~1e-16 relative accuracy), which
//              makes the cost linear in the number of samples. Boxes with
//              few distinct coordinates use the coordinates themselves as
//              nodes, so the interpolant is exact there.
// The separated path is still a single trilinear form, so transposition
// stays exact to roundoff.

#include <cstdint>

#include "hpfact/grid.hpp"
#include "hpfact/kernel.hpp"

namespace hpfact {

enum class QuadraturePath { automatic, direct, separated };

struct ApplyStats {
  std::int64_t skipped_cells = 0;
  bool separated = false;
  int max_nodes = 0;  // interpolation nodes per axis, separated path only
};

GridFunction apply_T(const KernelSpec& kernel, const GridFunction& f1, const GridFunction& f2,
                     const IndexBox& eval_box, ApplyStats* stats = nullptr,
                     QuadraturePath path = QuadraturePath::automatic);

// l = 1: int K(y1, x, y2) f1(y1) f2(y2);  l = 2: int K(y2, y1, x) f1(y1) f2(y2).
GridFunction apply_partial_adjoint(const KernelSpec& kernel, int l, const GridFunction& f1,
                                   const GridFunction& f2, const IndexBox& eval_box,
                                   ApplyStats* stats = nullptr,
                                   QuadraturePath path = QuadraturePath::automatic);

// Same quadratures evaluated at an arbitrary point (not necessarily a node).
double apply_T_at(const KernelSpec& kernel, const GridFunction& f1, const GridFunction& f2,
                  const Point& x, ApplyStats* stats = nullptr,
                  QuadraturePath path = QuadraturePath::automatic);
double apply_partial_adjoint_at(const KernelSpec& kernel, int l, const GridFunction& f1,
                                const GridFunction& f2, const Point& x,
                                ApplyStats* stats = nullptr,
                                QuadraturePath path = QuadraturePath::automatic);

}  // namespace hpfact
