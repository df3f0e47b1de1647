#pragma once

// H^p atoms (0-th moment only, n/(n+1) < p < 1), atomic decompositions and
// the telescoping two-bump decomposition, plus the Lipschitz seminorm
// estimator and a Poisson maximal function diagnostic.

#include <cstdint>
#include <vector>

#include "hpfact/grid.hpp"

namespace hpfact {

// Throws precondition_error unless n/(n+1) < p < 1.
void check_hardy_exponent(double p, int dim);

struct Atom {
  GridFunction fn;
  Ball ball;
  double p = 0.75;
};

struct AtomReport {
  bool support_ok = false;
  double outside_mass = 0.0;  // max |a| at grid points outside the ball
  bool size_ok = false;
  double size_ratio = 0.0;  // ||a||_inf / |B|^{-1/p}
  bool mean_ok = false;
  double mean_ratio = 0.0;  // |int a| / (||a||_inf |B|)
  bool valid = false;
};

AtomReport validate_atom(const GridFunction& fn, const Ball& ball, double p, double tol);

// Even atom on B: level 1 - s on B(c, r/2) and -s on the rest, s the discrete
// count ratio #B(c, r/2) / #B(c, r), rescaled so that ||a||_inf = |B|^{-1/p}.
Atom centered_atom(const GridSpec& spec, const Ball& ball, double p);
// sign(c_0 - x_0) |B|^{-1/p} on B; mean-zero by symmetry of the discrete ball.
Atom odd_atom(const GridSpec& spec, const Ball& ball, double p);

struct AtomicTerm {
  double lambda = 0.0;
  Atom atom;
};

struct AtomicDecomposition {
  double p = 0.75;
  std::vector<AtomicTerm> terms;
};

// sum |lambda_j|^p and its 1/p-th power.
double atomic_quasinorm_p(const AtomicDecomposition& d);
double atomic_quasinorm(const AtomicDecomposition& d);
AtomicDecomposition concatenate(const AtomicDecomposition& a, const AtomicDecomposition& b);
// sum lambda_j a_j on the union of the atom supports.
GridFunction reconstruct(const AtomicDecomposition& d, const GridSpec& spec);

// f dominated by C1 chi_{B1} + C2 chi_{B2} with disjoint equal-radius balls
// and zero integral.
struct TwoBumpFunction {
  GridFunction fn;
  Ball b1;
  Ball b2;
  double c1 = 0.0;
  double c2 = 0.0;

  double separation() const;  // N = |y1 - y2| / r
};

// Wraps fn with C_i = max |fn| on B_i and checks every invariant.
TwoBumpFunction make_two_bump(GridFunction fn, const Ball& b1, const Ball& b2);
void validate_two_bump(const TwoBumpFunction& f);

// Smallest integer strictly larger than log2(N).
int two_bump_depth(double N);

struct TwoBumpDecomposition {
  AtomicDecomposition decomposition;  // i = 1 for k = 1..J0+1, then i = 2
  int j0 = 0;
  Ball mid_ball;
  double alpha_mid_first = 0.0;   // via <f1>
  double alpha_mid_second = 0.0;  // via -<f2>
  // max over terms of |gamma_i^k| / (C_i 2^{kn(1/p-1)} |B(y_i,r)|^{1/p}), sides with C_i > 0.
  double coefficient_ratio = 0.0;
  double quasinorm_p = 0.0;
  // N^{n(1-p)} log2 N (C1^p |B1| + C2^p |B2|).
  double stated_envelope = 0.0;
  // (J0+1) 2^{(J0+1) n (1-p)} (C1^p |B1| + C2^p |B2|).
  double summed_envelope = 0.0;
};

TwoBumpDecomposition two_bump_decompose(const TwoBumpFunction& f, double p);

// Coefficients gamma_i^k of two_bump_decompose without materializing the
// atoms; the large mid-ball terms then cost nothing to store.
struct TwoBumpCoefficients {
  std::vector<double> gammas;  // same order as two_bump_decompose
  std::vector<Ball> balls;
  int j0 = 0;
  double quasinorm_p = 0.0;
};

TwoBumpCoefficients two_bump_coefficients(const TwoBumpFunction& f, double p);

// Largest |b(x+y) - b(x)| / |y|^alpha over grid pairs of the full grid box:
// exhaustive when the pair count fits the budget, otherwise a fixed-seed
// sample of pairs at log-uniform offsets.
double lip_seminorm(const GridFunction& b, double alpha, std::int64_t sample_budget);

// max over t of |P_t * f| with the Poisson kernel, evaluated on eval_box
// (default: the whole grid box).
GridFunction poisson_maximal_diagnostic(const GridFunction& f, const std::vector<double>& t_levels);
GridFunction poisson_maximal_diagnostic(const GridFunction& f, const std::vector<double>& t_levels,
                                        const IndexBox& eval_box);

}  // namespace hpfact
