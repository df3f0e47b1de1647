#pragma once

// The multiplication operator Pi_l, the approximation of a single atom by
// one Pi_l term, and the Uchiyama iteration that turns an atomic
// decomposition into a weak factorization
//
//   f = sum_k sum_j lambda_j^k Pi_l(g_j^k, h_{j,1}^k, h_{j,2}^k) + E_M.

#include <cstdint>
#include <vector>

#include "hpfact/atoms.hpp"
#include "hpfact/kernel.hpp"
#include "hpfact/operators.hpp"

namespace hpfact {

struct ExponentSystem {
  double p = 0.75;
  double q = 2.25;
  double r1 = 2.25;
  double r2 = 2.25;

  // 1/q + 1/r1 + 1/r2 = 1/p to 1e-12, p in (n/(n+1), 1), q, r1, r2 > 1.
  void validate(int dim) const;
  double q_dual() const { return q / (q - 1.0); }
  // q = r1 = r2 = 3p.
  static ExponentSystem symmetric(double p);
};

struct FactorTriple {
  double lambda = 1.0;
  GridFunction g;
  GridFunction h1;
  GridFunction h2;
  int slot = 2;
  Ball atom_ball;
  double norm_g = 0.0;   // L^q
  double norm_h1 = 0.0;  // L^{r1}
  double norm_h2 = 0.0;  // L^{r2}

  double norm_product() const { return norm_g * norm_h1 * norm_h2; }
};

// h_l T_l^*(...) on supp h_l minus g T(h1, h2) on supp g, where T_l^*(...)
// is T_2^*(h1, g) for l = 2 and T_1^*(g, h2) for l = 1.
GridFunction pi_l(const KernelSpec& kernel, int l, const GridFunction& g, const GridFunction& h1,
                  const GridFunction& h2, QuadraturePath path = QuadraturePath::automatic);
GridFunction pi_l(const KernelSpec& kernel, const FactorTriple& t,
                  QuadraturePath path = QuadraturePath::automatic);

// Smallest power of two N such that log2 M / M^{eps_s p - n(1-p)} < eps^p for
// every power of two M >= N.
std::int64_t select_N(double eps, double p, int n, double eps_s);

struct ApproximationResult {
  FactorTriple triple;
  GridFunction error;  // a - Pi_l(g, h1, h2)
  Ball far_ball;       // B(y_l, r), support of g
  double denominator = 0.0;  // T_l^*(...)(x0)
  double sup_error = 0.0;
  double sup_error_near = 0.0;  // on the atom ball (W1)
  double sup_error_far = 0.0;   // on B(y_l, r) (W2)
};

// Builds g = chi_{B(y_l, r)}, h_{l~} = chi_{B(y_l~, r)} and h_l = a / T_l^*(...)(x0)
// with y_l = x0 + v, y_l~ = y_l + v, v = (N r / sqrt n)(1, .., 1).
// Throws precondition_error when N < 4 or the denominator falls below
// 1e-3 C_hom (N r)^{-2n} |B|^2, grid_error when a displaced ball leaves the grid.
ApproximationResult approximate_atom(const KernelSpec& kernel, const Atom& atom,
                                     const ExponentSystem& exps, int l, double N,
                                     QuadraturePath path = QuadraturePath::automatic);

struct FactorizationResult {
  std::vector<std::vector<FactorTriple>> rounds;
  // error_norms[k] = sum |lambda|^p of the atomic decomposition of E_{k+1}.
  std::vector<double> error_norms;
  // sum |lambda| ||a||_1 of the same decomposition, an upper bound for ||E_{k+1}||_1.
  std::vector<double> error_l1_bounds;
  ExponentSystem exponents;
  int slot = 2;
  double N_used = 0.0;
  double eps_used = 0.0;  // smoothness exponent of the kernel
  double initial_quasinorm_p = 0.0;
  double triple_norm_budget_max = 0.0;  // max over triples of ||g|| ||h1|| ||h2|| / N^{2n}
  std::vector<double> round_budget_max;  // same, per round
  bool non_contraction = false;

  // error_norms[k] / error_norms[k-1], with the input quasi-norm^p before round 1.
  std::vector<double> contraction_ratios() const;
};

// Runs at most max_rounds rounds and stops early once an error norm drops
// below stop_tol. The last round's error is only measured (coefficients),
// never materialized as atoms.
FactorizationResult uchiyama_factorize(const KernelSpec& kernel, int l, const AtomicDecomposition& f,
                                       const ExponentSystem& exps, double N, int max_rounds,
                                       double stop_tol,
                                       QuadraturePath path = QuadraturePath::automatic);

// (sum_k sum_j |lambda|^p (||g|| ||h1|| ||h2||)^p)^{1/p}.
double factorization_norm(const FactorizationResult& res);

// sum_k sum_j lambda Pi_l(g, h1, h2) on the union of the triple supports.
GridFunction reconstruct(const KernelSpec& kernel, const FactorizationResult& res, const GridSpec& spec,
                         QuadraturePath path = QuadraturePath::automatic);

// Half-width of a grid that holds every ball touched by `rounds` rounds of
// the iteration started from atoms inside `start` (bounding ball).
double required_half_width(const Ball& start, double N, int rounds, int dim, double spacing);

}  // namespace hpfact
