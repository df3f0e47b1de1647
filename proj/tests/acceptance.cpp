// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
//
// Criteria 1-8 run three times (threads 1, 1, 4); criterion 9 compares
// digests of every number each criterion computed across the three runs.
// Lines and runtimes are reported from the first run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hpfact/calibration.hpp"
#include "hpfact/commands.hpp"
#include "hpfact/commutator.hpp"
#include "hpfact/parallel.hpp"
#include "hpfact/serialize.hpp"

using namespace hpfact;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string digest;
  double seconds = 0.0;
};

// Appends every recorded number at full precision.
class Digest {
 public:
  Digest& operator<<(double x) {
    text_ += format_double(x);
    text_ += ';';
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const KernelSpec& riesz(int n) {
  static const KernelSpec k1 = builtin_riesz_kernel(1);
  static const KernelSpec k2 = builtin_riesz_kernel(2);
  return n == 1 ? k1 : k2;
}

Outcome atom_validity() {
  Outcome o;
  Digest d;
  int atoms = 0;
  int bad = 0;
  double worst_size = 0.0, worst_mean = 0.0;
  for (int c = 0; c < 50; ++c) {
    const auto cs = testing::corpus_case(c);
    const auto dec = two_bump_decompose(testing::make_two_bump_case(cs.N, cs.r, cs.shape, cs.seed), cs.p);
    for (const auto& t : dec.decomposition.terms) {
      d << t.lambda;
      if (t.lambda == 0.0) continue;
      const AtomReport rep = validate_atom(t.atom.fn, t.atom.ball, cs.p, 1e-8);
      ++atoms;
      if (!rep.valid || rep.mean_ratio > 1e-10) ++bad;
      worst_size = std::max(worst_size, rep.size_ratio);
      worst_mean = std::max(worst_mean, rep.mean_ratio);
      d << rep.size_ratio << rep.mean_ratio;
    }
  }
  o.pass = bad == 0;
  o.detail = std::to_string(atoms) + " atoms from 50 cases, " + std::to_string(bad) + " invalid; max size ratio " +
             fmt("%.6g", worst_size) + ", max relative mean " + fmt("%.3g", worst_mean) + " (tol 1e-10)";
  o.digest = d.str();
  return o;
}

Outcome two_bump_envelope() {
  Outcome o;
  Digest d;
  o.pass = true;
  double spread_max = 0.0, ratio_max = 0.0;
  using testing::BumpShape;
  // One-sided inputs are single atoms already; the envelope is an upper bound for them, not a rate.
  for (double p : {0.6, 0.75, 0.9})
    for (BumpShape shape :
         {BumpShape::indicators, BumpShape::random_signed, BumpShape::random_biased, BumpShape::unequal_mass}) {
      double lo = INFINITY, hi = 0.0;
      for (double N : {8.0, 16.0, 32.0, 64.0}) {
        const auto dec = two_bump_decompose(testing::make_two_bump_case(N, 1.0, shape, 77), p);
        const double ratio = dec.quasinorm_p / dec.stated_envelope;
        d << ratio;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      spread_max = std::max(spread_max, hi / lo);
      ratio_max = std::max(ratio_max, hi);
      o.pass = o.pass && hi / lo < 4.0 && hi <= calibration::two_bump_quasinorm;
    }
  o.detail = "max spread across N " + fmt("%.4g", spread_max) + " (< 4), max ratio " + fmt("%.4g", ratio_max) +
             " (C_cal " + fmt("%.3g", calibration::two_bump_quasinorm) + "), 3 p x 4 shapes";
  o.digest = d.str();
  return o;
}

Outcome approximation_decay() {
  Outcome o;
  Digest d;
  const double eps = riesz(1).epsilon;
  const double lo = 0.5 * std::exp2(-eps), hi = 2.0 * std::exp2(-eps);
  const double p = 0.75;
  const Ball b{{0, 0}, 1};
  o.pass = true;
  std::string ratios;
  for (int shape = 0; shape < 2; ++shape) {
    double sup[2];
    for (int k = 0; k < 2; ++k) {
      const double N = k == 0 ? 16.0 : 32.0;
      const GridSpec g(1, required_half_width(b, N, 1, 1, 0.125), 0.125);
      const Atom a = shape == 0 ? centered_atom(g, b, p) : odd_atom(g, b, p);
      sup[k] = approximate_atom(riesz(1), a, ExponentSystem::symmetric(p), 2, N).sup_error;
      d << sup[k];
    }
    const double ratio = sup[1] / sup[0];
    o.pass = o.pass && ratio >= lo && ratio <= hi;
    ratios += std::string(shape == 0 ? "even " : ", odd ") + fmt("%.4f", ratio);
  }
  o.detail = "sup|a - Pi_2| ratio N 16->32: " + ratios + " in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]";
  o.digest = d.str();
  return o;
}

struct SingleAtomRun {
  AtomicDecomposition f;
  FactorizationResult res;
};

SingleAtomRun single_atom_run() {
  const double p = 0.75;
  const Ball b{{0, 0}, 1};
  const GridSpec g(1, required_half_width(b, 32, 3, 1, 0.25), 0.25);
  AtomicDecomposition f{p, {AtomicTerm{1.0, centered_atom(g, b, p)}}};
  FactorizationResult res = uchiyama_factorize(riesz(1), 2, f, ExponentSystem::symmetric(p), 32, 3, 0.0);
  return SingleAtomRun{std::move(f), std::move(res)};
}

Outcome geometric_decay(const SingleAtomRun& run) {
  Outcome o;
  Digest d;
  const auto& e = run.res.error_norms;
  for (double x : e) d << x;
  d << run.res.triple_norm_budget_max;
  if (e.size() != 3) {
    o.detail = "iteration stopped after " + std::to_string(e.size()) + " rounds";
    o.digest = d.str();
    return o;
  }
  const double rho1 = e[0] / run.res.initial_quasinorm_p;
  const double rho2 = e[1] / e[0];
  const double rho3 = e[2] / e[1];
  const double variation = std::abs(rho3 - rho2) / rho2;
  const bool decreasing = e[1] < e[0] && e[2] < e[1];
  o.pass = decreasing && rho1 < 1.0 && rho2 < 1.0 && rho3 < 1.0 && variation <= 0.25 && !run.res.non_contraction;
  o.detail = "errors " + fmt("%.4g", e[0]) + " > " + fmt("%.4g", e[1]) + " > " + fmt("%.4g", e[2]) + "; rho " +
             fmt("%.3f", rho2) + ", " + fmt("%.3f", rho3) + " (first round " + fmt("%.3f", rho1) +
             "); variation " + fmt("%.1f", 100.0 * variation) + "% (<= 25%)";
  o.digest = d.str();
  return o;
}

Outcome norm_equivalence(const SingleAtomRun& run) {
  Outcome o;
  Digest d;
  const double fn = factorization_norm(run.res);
  const double an = atomic_quasinorm(run.f);
  const double ratio = fn / an;
  const double c = calibration::norm_equivalence;
  d << fn << an;
  const bool frozen_ok = c <= 100.0;
  const bool in_band = ratio >= 1.0 / c && ratio <= c;
  o.pass = frozen_ok && in_band;
  o.detail = "factorization_norm / atomic_quasinorm = " + fmt("%.4g", ratio) + ", frozen C_eq = " + fmt("%.4g", c) +
             (frozen_ok ? "" : " (must be <= 100)") + ", in [1/C_eq, C_eq]: " + (in_band ? "yes" : "no") +
             "; first triple ||g|| ||h1|| ||h2|| / N^2 = " + fmt("%.3f", run.res.round_budget_max.at(0));
  o.digest = d.str();
  return o;
}

Outcome exact_duality() {
  Outcome o;
  Digest d;
  const GridSpec g(1, 4.0, 1.0 / 64);
  const GridFunction b = GridFunction::from_function(
      g, g.full_box(), [](const Point& x) { return std::pow(std::abs(x[0]), 1.0 / 3.0); });
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const PairingTriple tr = seeded_pairing_triple(g, 6, t);
    for (int l : {1, 2}) {
      const DualityReport r = duality_pairing_check(riesz(1), l, b, tr.g, tr.h1, tr.h2);
      d << r.lhs << r.rhs;
      worst = std::max(worst, r.rel_err);
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = "max rel_err " + fmt("%.3g", worst) + " over 50 triples x slots {1, 2} (tol 1e-10)";
  o.digest = d.str();
  return o;
}

Outcome lip_comparison() {
  Outcome o;
  Digest d;
  const ExperimentConfig cfg = config_from_json(default_config_json());
  const GridSpec g(1, cfg.commutator.half_width, cfg.commutator.spacing);
  const double c = calibration::lip_equivalence;
  o.pass = true;
  std::string ratios;
  for (const auto& m : cfg.commutator.family) {
    const LipFunction b =
        make_lip_function(lip_family_function(g, m, cfg.alpha()), cfg.exponents, cfg.commutator.lip_sample_budget);
    const CommutatorEstimate est =
        estimate_commutator_norm(riesz(1), cfg.slot, b, cfg.exponents, cfg.commutator.trials, cfg.seed);
    const double ratio = est.value / b.seminorm_est;
    d << b.seminorm_est << est.value;
    o.pass = o.pass && ratio >= 1.0 / c && ratio <= c;
    ratios += (ratios.empty() ? "" : ", ") + m.name + " " + fmt("%.4f", ratio);
  }
  o.detail = "estimate / seminorm: " + ratios + " in [1/" + fmt("%.3g", c) + ", " + fmt("%.3g", c) + "]";
  o.digest = d.str();
  return o;
}

Outcome kernel_certification() {
  Outcome o;
  Digest d;
  o.pass = true;
  std::string notes;
  for (int n : {1, 2}) {
    const KernelSpec& k = riesz(n);
    const CheckReport size = check_size_condition(k, 10000, 8);
    const SmoothnessReport smooth = check_smoothness_condition(k, 10000, 8);
    d << size.measured << smooth.measured;
    bool ok = size.pass && smooth.pass;
    double min_k[2];
    for (int i = 0; i < 2; ++i) {
      const double N = i == 0 ? 16.0 : 32.0;
      const HomogeneityReport h = check_homogeneity(k, SeparatedConfig::for_partial_adjoint({0, 0}, 1.0, N, 2, n));
      d << h.lower_ratio;
      ok = ok && h.pass;
      min_k[i] = h.lower_ratio / std::pow(N, 2.0 * n);
    }
    const double ratio = min_k[1] / min_k[0];
    const double target = std::pow(2.0, -2.0 * n);
    ok = ok && ratio >= target / 1.5 && ratio <= 1.5 * target;
    o.pass = o.pass && ok;
    notes += std::string(n == 1 ? "" : "; ") + "n=" + std::to_string(n) + " size " + fmt("%.4g", size.measured) +
             " smooth " + fmt("%.4g", smooth.measured) + " (2A " + fmt("%.4g", 2 * k.size_constant) +
             "), doubling " + fmt("%.4f", ratio) + " vs " + fmt("%.4f", target);
  }
  o.detail = notes;
  o.digest = d.str();
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: none stated
};

const Criterion kCriteria[] = {
    {1, "atom validity", 10.0},        {2, "two-bump envelope", 10.0}, {3, "approximation decay", 60.0},
    {4, "geometric decay", 300.0},     {5, "norm equivalence", 0.0},   {6, "exact duality", 30.0},
    {7, "Lip comparison", 300.0},      {8, "kernel certification", 0.0},
};

template <class Fn>
Outcome timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = fn();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

std::vector<Outcome> run_suite(int threads) {
  set_thread_count(threads);
  std::vector<Outcome> out;
  out.push_back(timed(atom_validity));
  out.push_back(timed(two_bump_envelope));
  out.push_back(timed(approximation_decay));
  std::optional<SingleAtomRun> run;
  const auto t0 = std::chrono::steady_clock::now();
  run.emplace(single_atom_run());
  const double run_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.push_back(timed([&] { return geometric_decay(*run); }));
  out.back().seconds += run_seconds;
  out.push_back(timed([&] { return norm_equivalence(*run); }));
  out.push_back(timed(exact_duality));
  out.push_back(timed(lip_comparison));
  out.push_back(timed(kernel_certification));
  return out;
}

}  // namespace

int main() {
  const int thread_plan[] = {1, 1, 4};
  std::vector<std::vector<Outcome>> runs;
  for (int t : thread_plan) runs.push_back(run_suite(t));

  bool all = true;
  const auto& first = runs.front();
  for (std::size_t i = 0; i < first.size(); ++i) {
    const Criterion& c = kCriteria[i];
    const Outcome& o = first[i];
    const bool fast = c.limit_seconds == 0.0 || o.seconds < c.limit_seconds;
    const bool pass = o.pass && fast;
    all = all && pass;
    std::printf("criterion %d %s: %s | %s | %.3f s%s\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                o.seconds, fast ? "" : " (over the time limit)");
  }

  int mismatches = 0;
  std::string which;
  for (std::size_t i = 0; i < first.size(); ++i)
    for (std::size_t r = 1; r < runs.size(); ++r)
      if (runs[r][i].digest != first[i].digest) {
        ++mismatches;
        which += " " + std::to_string(kCriteria[i].id) + "@threads" + std::to_string(thread_plan[r]);
      }
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over all digests of the first run
  for (const auto& o : first)
    for (unsigned char ch : o.digest) h = (h ^ ch) * 1099511628211ull;
  const bool det = mismatches == 0;
  all = all && det;
  std::printf("criterion 9 %s: determinism | criteria 1-8 byte-identical across runs at threads 1, 1, 4: %s "
              "(digest %016llx)%s\n",
              det ? "PASS" : "FAIL", det ? "yes" : "no", static_cast<unsigned long long>(h), which.c_str());
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
