#pragma once

// Experiment configuration: a versioned JSON document. Every field has a
// default (see default_config_json) except schema_version and kernel.name,
// so a config file lists those two plus its overrides.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpfact/factorization.hpp"

namespace hpfact {

inline constexpr int kConfigSchemaVersion = 1;

// Bad user input. `usage` marks a missing required field rather than a
// violated constraint.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& msg, bool usage = false) : std::runtime_error(msg), usage(usage) {}
  bool usage;
};

struct LipFamilyMember {
  std::string name;
  std::string type;  // "power" |x - center|^alpha, "tanh" tanh((x - center)/width), "zero"
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
  std::optional<double> alpha;  // must equal n(1/p - 1) when given
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  int dim = 1;
  std::uint64_t seed = 7;
  std::string out_dir = "out";

  std::string kernel_name = "riesz";
  int kernel_component = 1;
  std::optional<double> kernel_epsilon;  // unset: the kernel's declared exponent

  ExponentSystem exponents = ExponentSystem::symmetric(0.75);
  int slot = 2;

  struct {
    std::int64_t samples = 10000;
    std::vector<double> N{16, 32};
    double radius = 1.0;
  } verify;

  struct {
    std::optional<double> half_width;  // unset: required_half_width
    double spacing = 0.25;
    double N = 32;
    int rounds = 3;
    double stop_tol = 0.0;
    Ball atom{{0.0, 0.0}, 1.0};
    std::string atom_shape = "centered";  // "centered" | "odd"
  } factorize;

  struct {
    double half_width = 4.0;
    double spacing = 1.0 / 64;
    int trials = 256;
    int duality_triples = 50;
    std::int64_t lip_sample_budget = std::int64_t{1} << 22;
    std::vector<LipFamilyMember> family;
  } commutator;

  struct {
    std::vector<double> N{8, 16, 32, 64};
    double radius = 1.0;
    double spacing = 0.25;
  } decay;

  double alpha() const { return dim * (1.0 / exponents.p - 1.0); }
  // Cross-field checks; throws config_error naming the violated constraint.
  void validate() const;
};

// The frozen defaults, as a JSON document with every field spelled out.
nlohmann::json default_config_json();
nlohmann::json to_json(const ExperimentConfig& cfg);
// Merges j over the defaults, then validates.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace hpfact
