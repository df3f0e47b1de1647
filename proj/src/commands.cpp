#include "hpfact/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "hpfact/calibration.hpp"
#include "hpfact/commutator.hpp"
#include "hpfact/serialize.hpp"

namespace hpfact {

using nlohmann::json;

KernelSpec kernel_from_config(const ExperimentConfig& cfg) {
  KernelSpec k = KernelRegistry::instance().make(cfg.kernel_name, cfg.dim, cfg.kernel_component);
  if (cfg.kernel_epsilon) k.epsilon = *cfg.kernel_epsilon;
  return k;
}

GridFunction lip_family_function(const GridSpec& spec, const LipFamilyMember& m, double alpha) {
  const int n = spec.dim();
  const Point c{m.center, 0.0};
  return GridFunction::from_function(spec, spec.full_box(), [&](const Point& x) {
    if (m.type == "power") return m.amplitude * std::pow(distance(x, c, n), alpha);
    if (m.type == "tanh") return m.amplitude * std::tanh((x[0] - m.center) / m.width);
    return 0.0;
  });
}

namespace {

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

json check_json(const CheckReport& r) {
  return json{{"name", r.name},   {"measured", r.measured}, {"declared", r.declared},
              {"pass", r.pass},   {"samples", r.samples},   {"seed", r.seed}};
}

std::string csv_number(double x) { return format_double(x); }

}  // namespace

int cmd_verify_kernel(const ExperimentConfig& cfg, std::ostream& log) {
  const KernelSpec k = kernel_from_config(cfg);
  const int n = cfg.dim;
  json report{{"kernel", k.name}, {"dim", n}, {"epsilon", k.epsilon}, {"checks", json::array()}};
  bool all = true;

  const CheckReport size = check_size_condition(k, cfg.verify.samples, cfg.seed);
  report["checks"].push_back(check_json(size));
  all = all && size.pass;

  const SmoothnessReport smooth = check_smoothness_condition(k, cfg.verify.samples, cfg.seed);
  json sj = check_json(smooth);
  sj["epsilon"] = smooth.epsilon;
  sj["scale_max"] = smooth.scale_max;
  report["checks"].push_back(sj);
  all = all && smooth.pass;

  double prev_N = 0.0, prev_min = 0.0;
  for (double N : cfg.verify.N) {
    const HomogeneityReport h =
        check_homogeneity(k, SeparatedConfig::for_partial_adjoint({0.0, 0.0}, cfg.verify.radius, N, cfg.slot, n));
    json hj = check_json(h);
    hj["N"] = N;
    hj["lower_ratio"] = h.lower_ratio;
    all = all && h.pass;
    // min |K| without the (N r)^{2n} factor; doubling N should divide it by 2^{2n}.
    const double min_k = h.lower_ratio / std::pow(N * cfg.verify.radius, 2.0 * n);
    if (prev_N > 0.0 && N == 2.0 * prev_N) {
      const double ratio = min_k / prev_min;
      const double target = std::pow(2.0, -2.0 * n);
      const bool ok = ratio >= target / 1.5 && ratio <= 1.5 * target;
      hj["doubling_ratio"] = ratio;
      hj["doubling_pass"] = ok;
      all = all && ok;
    }
    report["checks"].push_back(hj);
    prev_N = N;
    prev_min = min_k;
  }
  report["pass"] = all;
  open_output(cfg, "kernel_report.json") << report.dump(2) << '\n';
  for (const auto& c : report["checks"])
    log << c["name"].get<std::string>() << ": measured " << csv_number(c["measured"].get<double>()) << " declared "
        << csv_number(c["declared"].get<double>()) << (c["pass"].get<bool>() ? " pass" : " FAIL") << '\n';
  return all ? kExitPass : kExitError;
}

int cmd_factorize(const ExperimentConfig& cfg, std::ostream& log) {
  const KernelSpec k = kernel_from_config(cfg);
  const auto& fc = cfg.factorize;
  const double L = fc.half_width.value_or(required_half_width(fc.atom, fc.N, fc.rounds, cfg.dim, fc.spacing));
  const GridSpec spec(cfg.dim, L, fc.spacing);
  const double p = cfg.exponents.p;
  const Atom atom = fc.atom_shape == "odd" ? odd_atom(spec, fc.atom, p) : centered_atom(spec, fc.atom, p);
  const AtomicDecomposition f{p, {AtomicTerm{1.0, atom}}};
  const FactorizationResult res = uchiyama_factorize(k, cfg.slot, f, cfg.exponents, fc.N, fc.rounds, fc.stop_tol);

  auto csv = open_output(cfg, "decay.csv");
  csv << "round,num_triples,error_quasinorm_p,contraction_ratio,triple_norm_budget_max\n";
  const auto ratios = res.contraction_ratios();
  for (std::size_t r = 0; r < res.rounds.size(); ++r)
    csv << r + 1 << ',' << res.rounds[r].size() << ',' << csv_number(res.error_norms[r]) << ','
        << csv_number(ratios[r]) << ',' << csv_number(res.round_budget_max[r]) << '\n';

  json doc = to_json(res);
  doc["grid"] = to_json(spec);
  doc["initial_quasinorm"] = atomic_quasinorm(f);
  doc["config"] = to_json(cfg);
  doc["config"].erase("out_dir");
  open_output(cfg, "factorization.json") << doc.dump(2) << '\n';

  log << "factorize: " << res.rounds.size() << " rounds, factorization_norm "
      << csv_number(factorization_norm(res)) << '\n';
  if (res.non_contraction) {
    log << "factorize: NON-CONTRACTION, error grew in two consecutive rounds\n";
    return kExitNonContraction;
  }
  return kExitPass;
}

int cmd_commutator(const ExperimentConfig& cfg, std::ostream& log) {
  const KernelSpec k = kernel_from_config(cfg);
  const auto& cc = cfg.commutator;
  const GridSpec spec(cfg.dim, cc.half_width, cc.spacing);
  auto csv = open_output(cfg, "commutator.csv");
  csv << "name,seminorm_est,commutator_estimate,ratio,duality_rel_err\n";
  bool all = true;
  for (const auto& m : cc.family) {
    LipFunction b = make_lip_function(lip_family_function(spec, m, cfg.alpha()), cfg.exponents, cc.lip_sample_budget);
    if (m.alpha) b.alpha = *m.alpha;
    const CommutatorEstimate est = estimate_commutator_norm(k, cfg.slot, b, cfg.exponents, cc.trials, cfg.seed);
    double rel = 0.0;
    for (int t = 0; t < cc.duality_triples; ++t) {
      const PairingTriple tr = seeded_pairing_triple(spec, cfg.seed, t);
      rel = std::max(rel, duality_pairing_check(k, cfg.slot, b.fn, tr.g, tr.h1, tr.h2).rel_err);
    }
    const double ratio = b.seminorm_est > 0.0 ? est.value / b.seminorm_est : 0.0;
    const bool zero = b.seminorm_est == 0.0 && est.value == 0.0;
    const bool in_band =
        zero || (ratio >= 1.0 / calibration::lip_equivalence && ratio <= calibration::lip_equivalence);
    all = all && in_band && rel <= 1e-10;
    csv << m.name << ',' << csv_number(b.seminorm_est) << ',' << csv_number(est.value) << ',' << csv_number(ratio)
        << ',' << csv_number(rel) << '\n';
    log << m.name << ": ratio " << csv_number(ratio) << " duality " << csv_number(rel)
        << (in_band ? "" : " OUT OF BAND") << '\n';
  }
  return all ? kExitPass : kExitError;
}

int cmd_decay_table(const ExperimentConfig& cfg, std::ostream& log) {
  const KernelSpec k = kernel_from_config(cfg);
  const auto& dc = cfg.decay;
  const Ball ball{{0.0, 0.0}, dc.radius};
  const double band = std::exp2(-k.epsilon);
  auto csv = open_output(cfg, "approximation_decay.csv");
  csv << "N,sup_error,sup_error_near,sup_error_far,halving_ratio\n";
  bool all = true;
  double prev_N = 0.0, prev_sup = 0.0;
  for (double N : dc.N) {
    const GridSpec spec(cfg.dim, required_half_width(ball, N, 1, cfg.dim, dc.spacing), dc.spacing);
    const ApproximationResult r =
        approximate_atom(k, centered_atom(spec, ball, cfg.exponents.p), cfg.exponents, cfg.slot, N);
    csv << csv_number(N) << ',' << csv_number(r.sup_error) << ',' << csv_number(r.sup_error_near) << ','
        << csv_number(r.sup_error_far) << ',';
    if (prev_N > 0.0 && N == 2.0 * prev_N) {
      const double ratio = r.sup_error / prev_sup;
      const bool ok = ratio >= 0.5 * band && ratio <= 2.0 * band;
      all = all && ok;
      csv << csv_number(ratio);
      log << "N " << csv_number(prev_N) << " -> " << csv_number(N) << ": halving ratio " << csv_number(ratio)
          << (ok ? "" : " OUT OF BAND") << '\n';
    }
    csv << '\n';
    prev_N = N;
    prev_sup = r.sup_error;
  }
  return all ? kExitPass : kExitError;
}

}  // namespace hpfact
