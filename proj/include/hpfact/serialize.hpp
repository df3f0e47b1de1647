#pragma once

// On-disk containers.
//
// GridFunction text format (one token per whitespace-separated field):
//
//   hpfact-gridfunction v1
//   dim <n>
//   half_width <L>
//   spacing <h>
//   box <lo0> <lo1> <hi0> <hi1>
//   samples <count>
//   <value> ...            (row-major over the box, axis 1 fastest, %.17g)
//
// Decompositions and factorization results are JSON documents; see
// to_json below for the field lists.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hpfact/atoms.hpp"
#include "hpfact/factorization.hpp"

namespace hpfact {

// Shortest round-trip-safe decimal for a double (%.17g).
std::string format_double(double x);

void write_grid_function(std::ostream& out, const GridFunction& f);
// Throws std::runtime_error on a malformed or truncated stream.
GridFunction read_grid_function(std::istream& in);

nlohmann::json to_json(const Ball& ball, int dim);
nlohmann::json to_json(const GridSpec& spec);
nlohmann::json to_json(const ExponentSystem& exps);

// {"p", "grid", "terms": [{"lambda", "ball", "box", "samples"}]}
nlohmann::json to_json(const AtomicDecomposition& d);
AtomicDecomposition decomposition_from_json(const nlohmann::json& j);

// Per-round tables: {"round", "error_quasinorm_p", "error_l1_bound", "triple_norm_budget_max",
// "triples": [{"lambda", "slot", "atom_ball", "g_box", "norm_g", "norm_h1", "norm_h2"}]}.
// Sample payloads of g, h1, h2 are omitted; g and the h_l~ factor are ball indicators.
nlohmann::json to_json(const FactorizationResult& res);

}  // namespace hpfact
