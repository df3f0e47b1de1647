#pragma once

// The four batch commands behind the hpfact tool. Each reads a validated
// config, writes its tables under cfg.out_dir, logs a short summary and
// returns the process exit code.
//
//   verify-kernel  kernel_report.json              0 all checks pass, 1 otherwise
//   factorize      decay.csv, factorization.json   0, or 2 on non-contraction
//   commutator     commutator.csv                  0 all rows in band, 1 otherwise
//   decay-table    approximation_decay.csv         0 every halving ratio in band, 1 otherwise

#include <iosfwd>
#include <string>

#include "hpfact/config.hpp"
#include "hpfact/kernel.hpp"

namespace hpfact {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNonContraction = 2;

// Registry kernel for cfg, with the epsilon override applied.
KernelSpec kernel_from_config(const ExperimentConfig& cfg);
// The b-family member sampled on `spec`.
GridFunction lip_family_function(const GridSpec& spec, const LipFamilyMember& m, double alpha);

int cmd_verify_kernel(const ExperimentConfig& cfg, std::ostream& log);
int cmd_factorize(const ExperimentConfig& cfg, std::ostream& log);
int cmd_commutator(const ExperimentConfig& cfg, std::ostream& log);
int cmd_decay_table(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace hpfact
