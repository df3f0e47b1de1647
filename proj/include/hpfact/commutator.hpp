#pragma once

// Commutators [b, T]_l with a Lipschitz symbol b, the pairing identity
// <b, Pi_l(g, h1, h2)> = <g, [b, T]_l(h1, h2)>, and the two sides of the
// comparison ||b||_{Lip_alpha} ~ ||[b, T]_l||.

#include <cstdint>
#include <vector>

#include "hpfact/factorization.hpp"

namespace hpfact {

struct LipFunction {
  GridFunction fn;
  double alpha = 1.0;
  double seminorm_est = 0.0;
};

// alpha = n(1/p - 1) for the given exponents; seminorm_est via lip_seminorm.
LipFunction make_lip_function(GridFunction fn, const ExponentSystem& exps, std::int64_t sample_budget);
// Throws precondition_error unless alpha matches n(1/p - 1) to 1e-12.
void check_lip_exponent(double alpha, const ExponentSystem& exps, int dim);

// l = 2: T(f1, b f2) - b T(f1, f2);  l = 1: T(b f1, f2) - b T(f1, f2).
GridFunction apply_commutator(const KernelSpec& kernel, int l, const GridFunction& b, const GridFunction& f1,
                              const GridFunction& f2, const IndexBox& eval_box,
                              QuadraturePath path = QuadraturePath::automatic);
GridFunction apply_commutator(const KernelSpec& kernel, int l, const LipFunction& b, const GridFunction& f1,
                              const GridFunction& f2, const IndexBox& eval_box,
                              QuadraturePath path = QuadraturePath::automatic);

struct DualityReport {
  double lhs = 0.0;  // <b, Pi_l(g, h1, h2)>
  double rhs = 0.0;  // <g, [b, T]_l(h1, h2)>
  double rel_err = 0.0;
};

DualityReport duality_pairing_check(const KernelSpec& kernel, int l, const GridFunction& b, const GridFunction& g,
                                    const GridFunction& h1, const GridFunction& h2,
                                    QuadraturePath path = QuadraturePath::automatic);

struct PairingTriple {
  GridFunction g;
  GridFunction h1;
  GridFunction h2;
};

// Random signed samples on three disjoint balls of radius L/10 near
// x_0 = -0.6 L, +0.6 L and 0. Depends only on (seed, index).
PairingTriple seeded_pairing_triple(const GridSpec& spec, std::uint64_t seed, int index);

struct CommutatorEstimate {
  double value = 0.0;                // max ratio over all trials
  std::vector<double> running_max;   // after each trial
  std::int64_t best_trial = -1;
};

// max over seeded bump pairs of ||[b,T]_l(f1,f2)||_{L^{q'}} / (||f1||_{r1} ||f2||_{r2}),
// the output measured on the whole grid box. Trial t depends only on (seed, t).
CommutatorEstimate estimate_commutator_norm(const KernelSpec& kernel, int l, const LipFunction& b,
                                            const ExponentSystem& exps, int trial_count, std::uint64_t seed);

struct LipLowerBound {
  double pairing = 0.0;        // <b, sum lambda Pi_l(...)>
  double termwise = 0.0;       // sum lambda <g, [b,T]_l(h1, h2)>
  double chain_bound = 0.0;    // sum |lambda| ||g||_q ||[b,T]_l(h1, h2)||_{q'}
  double direct = 0.0;         // <b, f>
  double truncation_bound = 0.0;  // ||b||_inf on the error supports times the final L^1 error bound
  bool holder_ok = false;      // |pairing| <= chain_bound + 1e-9
};

// Hölder chain of the duality argument applied to a finished factorization of f.
LipLowerBound lip_lower_bound_via_factorization(const LipFunction& b, const FactorizationResult& res,
                                                const KernelSpec& kernel, const AtomicDecomposition& f,
                                                QuadraturePath path = QuadraturePath::automatic);

}  // namespace hpfact
