#include "hpfact/config.hpp"

#include <cmath>
#include <fstream>

#include "hpfact/kernel.hpp"

namespace hpfact {

using nlohmann::json;

namespace {

std::vector<LipFamilyMember> default_family() {
  return {{"abs_power", "power", 0.0, 1.0, 1.0, std::nullopt},
          {"shifted_power", "power", 0.3, 1.0, 1.0, std::nullopt},
          {"smoothed_step", "tanh", 0.0, 0.25, 1.0, std::nullopt}};
}

json ball_json(const Ball& b) { return json{{"center", {b.center[0], b.center[1]}}, {"radius", b.radius}}; }

}  // namespace

json to_json(const ExperimentConfig& c) {
  json family = json::array();
  for (const auto& m : c.commutator.family)
    family.push_back(json{{"name", m.name}, {"type", m.type}, {"center", m.center}, {"width", m.width},
                          {"amplitude", m.amplitude},
                          {"alpha", m.alpha ? json(*m.alpha) : json(nullptr)}});
  return json{
      {"schema_version", c.schema_version},
      {"dim", c.dim},
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"kernel",
       {{"name", c.kernel_name},
        {"component", c.kernel_component},
        {"epsilon", c.kernel_epsilon ? json(*c.kernel_epsilon) : json(nullptr)}}},
      {"exponents", {{"p", c.exponents.p}, {"q", c.exponents.q}, {"r1", c.exponents.r1}, {"r2", c.exponents.r2}}},
      {"slot", c.slot},
      {"verify_kernel", {{"samples", c.verify.samples}, {"N", c.verify.N}, {"radius", c.verify.radius}}},
      {"factorize",
       {{"half_width", c.factorize.half_width ? json(*c.factorize.half_width) : json("auto")},
        {"spacing", c.factorize.spacing},
        {"N", c.factorize.N},
        {"rounds", c.factorize.rounds},
        {"stop_tol", c.factorize.stop_tol},
        {"atom", ball_json(c.factorize.atom)},
        {"atom_shape", c.factorize.atom_shape}}},
      {"commutator",
       {{"half_width", c.commutator.half_width},
        {"spacing", c.commutator.spacing},
        {"trials", c.commutator.trials},
        {"duality_triples", c.commutator.duality_triples},
        {"lip_sample_budget", c.commutator.lip_sample_budget},
        {"family", family}}},
      {"decay_table", {{"N", c.decay.N}, {"radius", c.decay.radius}, {"spacing", c.decay.spacing}}}};
}

json default_config_json() {
  ExperimentConfig c;
  c.commutator.family = default_family();
  return to_json(c);
}

namespace {

template <class T>
T get(const json& j, const char* path, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string(path) + "." + key + " has the wrong type");
  }
}

// RFC 7386 style merge, but arrays replace wholesale and unknown keys are errors.
void merge_into(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw config_error(path + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string where = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw config_error("unknown config field " + where);
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      merge_into(slot, it.value(), where);
    else
      slot = it.value();
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& user) {
  if (!user.is_object()) throw config_error("config must be a JSON object");
  if (!user.contains("schema_version")) throw config_error("config: schema_version is required", true);
  const bool named = user.contains("kernel") && user["kernel"].is_object() && user["kernel"].contains("name") &&
                     !user["kernel"]["name"].is_null();
  if (!named) throw config_error("config: kernel.name is required", true);

  json j = default_config_json();
  merge_into(j, user, "");
  ExperimentConfig c;
  c.schema_version = get<int>(j, "", "schema_version");
  if (c.schema_version != kConfigSchemaVersion)
    throw config_error("schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                       std::to_string(kConfigSchemaVersion) + ")");
  c.dim = get<int>(j, "", "dim");
  c.seed = get<std::uint64_t>(j, "", "seed");
  c.out_dir = get<std::string>(j, "", "out_dir");

  const json& k = j["kernel"];
  c.kernel_name = get<std::string>(k, "kernel", "name");
  c.kernel_component = get<int>(k, "kernel", "component");
  if (!k["epsilon"].is_null()) c.kernel_epsilon = get<double>(k, "kernel", "epsilon");

  const json& e = j["exponents"];
  c.exponents = ExponentSystem{get<double>(e, "exponents", "p"), get<double>(e, "exponents", "q"),
                               get<double>(e, "exponents", "r1"), get<double>(e, "exponents", "r2")};
  c.slot = get<int>(j, "", "slot");

  const json& v = j["verify_kernel"];
  c.verify.samples = get<std::int64_t>(v, "verify_kernel", "samples");
  c.verify.N = get<std::vector<double>>(v, "verify_kernel", "N");
  c.verify.radius = get<double>(v, "verify_kernel", "radius");

  const json& f = j["factorize"];
  if (f["half_width"].is_string()) {
    if (f["half_width"] != "auto") throw config_error("factorize.half_width must be a number or \"auto\"");
  } else {
    c.factorize.half_width = get<double>(f, "factorize", "half_width");
  }
  c.factorize.spacing = get<double>(f, "factorize", "spacing");
  c.factorize.N = get<double>(f, "factorize", "N");
  c.factorize.rounds = get<int>(f, "factorize", "rounds");
  c.factorize.stop_tol = get<double>(f, "factorize", "stop_tol");
  const auto center = get<std::vector<double>>(f["atom"], "factorize.atom", "center");
  if (center.empty() || center.size() > 2) throw config_error("factorize.atom.center must have 1 or 2 entries");
  c.factorize.atom = Ball{{center[0], center.size() > 1 ? center[1] : 0.0},
                          get<double>(f["atom"], "factorize.atom", "radius")};
  c.factorize.atom_shape = get<std::string>(f, "factorize", "atom_shape");

  const json& m = j["commutator"];
  c.commutator.half_width = get<double>(m, "commutator", "half_width");
  c.commutator.spacing = get<double>(m, "commutator", "spacing");
  c.commutator.trials = get<int>(m, "commutator", "trials");
  c.commutator.duality_triples = get<int>(m, "commutator", "duality_triples");
  c.commutator.lip_sample_budget = get<std::int64_t>(m, "commutator", "lip_sample_budget");
  if (!m["family"].is_array()) throw config_error("commutator.family must be an array");
  for (const auto& mj : m["family"]) {
    json full{{"name", ""}, {"type", ""}, {"center", 0.0}, {"width", 1.0}, {"amplitude", 1.0}, {"alpha", nullptr}};
    merge_into(full, mj, "commutator.family[]");
    c.commutator.family.push_back(LipFamilyMember{
        get<std::string>(full, "family", "name"), get<std::string>(full, "family", "type"),
        get<double>(full, "family", "center"), get<double>(full, "family", "width"),
        get<double>(full, "family", "amplitude"), std::nullopt});
    if (!full["alpha"].is_null()) c.commutator.family.back().alpha = get<double>(full, "family", "alpha");
  }

  const json& d = j["decay_table"];
  c.decay.N = get<std::vector<double>>(d, "decay_table", "N");
  c.decay.radius = get<double>(d, "decay_table", "radius");
  c.decay.spacing = get<double>(d, "decay_table", "spacing");

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw config_error(msg); };
  if (dim != 1 && dim != 2) fail("dim must be 1 or 2");
  if (kernel_name.empty()) throw config_error("config: kernel.name is required", true);
  if (!KernelRegistry::instance().contains(kernel_name)) fail("kernel.name '" + kernel_name + "' is not registered");
  if (kernel_component < 1 || kernel_component > dim) fail("kernel.component must lie in 1..dim");
  if (kernel_epsilon && !(*kernel_epsilon > 0.0 && *kernel_epsilon <= 1.0))
    fail("kernel.epsilon must lie in (0, 1], got " + std::to_string(*kernel_epsilon));
  try {
    exponents.validate(dim);
  } catch (const precondition_error& e) {
    fail(std::string("exponents: ") + e.what());
  }
  if (!(alpha() > 0.0 && alpha() <= 1.0)) fail("Lipschitz order alpha = n(1/p - 1) must lie in (0, 1]");
  if (slot != 1 && slot != 2) fail("slot must be 1 or 2");

  if (verify.samples < 1) fail("verify_kernel.samples must be >= 1");
  if (verify.N.empty()) fail("verify_kernel.N must not be empty");
  for (double n : verify.N)
    if (!(n >= 4.0)) fail("verify_kernel.N entries must be >= 4");
  if (!(verify.radius > 0.0)) fail("verify_kernel.radius must be positive");

  if (!(factorize.spacing > 0.0)) fail("factorize.spacing must be positive");
  if (!(factorize.N >= 4.0)) fail("factorize.N must be >= 4");
  if (factorize.rounds < 0) fail("factorize.rounds must be >= 0");
  if (!(factorize.stop_tol >= 0.0)) fail("factorize.stop_tol must be >= 0");
  if (!(factorize.atom.radius >= 2.0 * factorize.spacing))
    fail("factorize.atom.radius must be at least two grid spacings");
  if (factorize.atom_shape != "centered" && factorize.atom_shape != "odd")
    fail("factorize.atom_shape must be \"centered\" or \"odd\"");
  if (factorize.half_width) {
    const double need = required_half_width(factorize.atom, factorize.N, factorize.rounds, dim, factorize.spacing);
    if (*factorize.half_width < need)
      fail("factorize.half_width " + std::to_string(*factorize.half_width) +
           " does not contain the balls of the iteration (needs " + std::to_string(need) + ")");
  }

  if (!(commutator.spacing > 0.0 && commutator.half_width > 12.0 * commutator.spacing))
    fail("commutator grid must have half_width > 12 spacing");
  if (commutator.trials < 1) fail("commutator.trials must be >= 1");
  if (commutator.duality_triples < 0) fail("commutator.duality_triples must be >= 0");
  if (commutator.lip_sample_budget < 1) fail("commutator.lip_sample_budget must be >= 1");
  for (const auto& m : commutator.family) {
    if (m.name.empty()) fail("commutator.family entries need a name");
    if (m.type != "power" && m.type != "tanh" && m.type != "zero")
      fail("commutator.family '" + m.name + "': type must be power, tanh or zero");
    if (m.alpha && std::abs(*m.alpha - alpha()) > 1e-12)
      fail("commutator.family '" + m.name + "': alpha " + std::to_string(*m.alpha) +
           " violates alpha = n(1/p - 1) = " + std::to_string(alpha()));
    if (m.type == "tanh" && !(m.width > 0.0)) fail("commutator.family '" + m.name + "': width must be positive");
  }

  if (decay.N.empty()) fail("decay_table.N must not be empty");
  for (double n : decay.N)
    if (!(n >= 4.0)) fail("decay_table.N entries must be >= 4");
  if (!(decay.radius >= 2.0 * decay.spacing && decay.spacing > 0.0))
    fail("decay_table.radius must be at least two grid spacings");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace hpfact
