#include "hpfact/serialize.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hpfact {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_grid_function(std::ostream& out, const GridFunction& f) {
  const GridSpec& g = f.spec();
  const IndexBox& b = f.box();
  out << "hpfact-gridfunction v1\n"
      << "dim " << g.dim() << '\n'
      << "half_width " << format_double(g.half_width()) << '\n'
      << "spacing " << format_double(g.spacing()) << '\n'
      << "box " << b.lo[0] << ' ' << b.lo[1] << ' ' << b.hi[0] << ' ' << b.hi[1] << '\n'
      << "samples " << f.samples().size() << '\n';
  for (double v : f.samples()) out << format_double(v) << '\n';
}

namespace {

void expect(std::istream& in, const char* word) {
  std::string token;
  if (!(in >> token) || token != word)
    throw std::runtime_error(std::string("gridfunction stream: expected '") + word + "', got '" + token + "'");
}

template <class T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw std::runtime_error(std::string("gridfunction stream: bad ") + what);
  return v;
}

}  // namespace

GridFunction read_grid_function(std::istream& in) {
  expect(in, "hpfact-gridfunction");
  expect(in, "v1");
  expect(in, "dim");
  const int dim = read_value<int>(in, "dim");
  expect(in, "half_width");
  const double L = read_value<double>(in, "half_width");
  expect(in, "spacing");
  const double h = read_value<double>(in, "spacing");
  expect(in, "box");
  IndexBox box;
  box.lo[0] = read_value<std::int64_t>(in, "box");
  box.lo[1] = read_value<std::int64_t>(in, "box");
  box.hi[0] = read_value<std::int64_t>(in, "box");
  box.hi[1] = read_value<std::int64_t>(in, "box");
  expect(in, "samples");
  const auto count = read_value<std::size_t>(in, "sample count");
  GridSpec spec(dim, L, h);
  if (!box.empty() && !spec.full_box().contains(box)) throw std::runtime_error("gridfunction stream: box outside grid");
  if (count != static_cast<std::size_t>(box.empty() ? 0 : box.size()))
    throw std::runtime_error("gridfunction stream: sample count does not match box");
  std::vector<double> samples(count);
  for (double& v : samples) v = read_value<double>(in, "sample");
  if (box.empty()) return GridFunction(spec);
  return GridFunction(spec, box, std::move(samples));
}

json to_json(const Ball& ball, int dim) {
  json c = json::array();
  for (int d = 0; d < dim; ++d) c.push_back(ball.center[d]);
  return json{{"center", c}, {"radius", ball.radius}};
}

json to_json(const GridSpec& spec) {
  return json{{"dim", spec.dim()}, {"half_width", spec.half_width()}, {"spacing", spec.spacing()}};
}

json to_json(const ExponentSystem& exps) {
  return json{{"p", exps.p}, {"q", exps.q}, {"r1", exps.r1}, {"r2", exps.r2}};
}

namespace {

json box_json(const IndexBox& b) { return json{{"lo", {b.lo[0], b.lo[1]}}, {"hi", {b.hi[0], b.hi[1]}}}; }

Ball ball_from_json(const json& j) {
  Ball b;
  const auto& c = j.at("center");
  for (std::size_t d = 0; d < c.size() && d < 2; ++d) b.center[d] = c[d].get<double>();
  b.radius = j.at("radius").get<double>();
  return b;
}

}  // namespace

json to_json(const AtomicDecomposition& d) {
  json out{{"p", d.p}, {"terms", json::array()}};
  if (!d.terms.empty()) out["grid"] = to_json(d.terms.front().atom.fn.spec());
  for (const auto& t : d.terms) {
    const int n = t.atom.fn.spec().dim();
    json samples(std::vector<double>(t.atom.fn.samples().begin(), t.atom.fn.samples().end()));
    out["terms"].push_back(json{{"lambda", t.lambda},
                                {"ball", to_json(t.atom.ball, n)},
                                {"box", box_json(t.atom.fn.box())},
                                {"samples", std::move(samples)}});
  }
  return out;
}

AtomicDecomposition decomposition_from_json(const json& j) {
  AtomicDecomposition d{j.at("p").get<double>(), {}};
  if (j.at("terms").empty()) return d;
  const auto& gj = j.at("grid");
  GridSpec spec(gj.at("dim").get<int>(), gj.at("half_width").get<double>(), gj.at("spacing").get<double>());
  for (const auto& tj : j.at("terms")) {
    IndexBox box;
    box.lo = {tj.at("box").at("lo")[0].get<std::int64_t>(), tj.at("box").at("lo")[1].get<std::int64_t>()};
    box.hi = {tj.at("box").at("hi")[0].get<std::int64_t>(), tj.at("box").at("hi")[1].get<std::int64_t>()};
    auto samples = tj.at("samples").get<std::vector<double>>();
    GridFunction fn = box.empty() ? GridFunction(spec) : GridFunction(spec, box, std::move(samples));
    d.terms.push_back(AtomicTerm{tj.at("lambda").get<double>(), Atom{std::move(fn), ball_from_json(tj.at("ball")), d.p}});
  }
  return d;
}

json to_json(const FactorizationResult& res) {
  json out{{"exponents", to_json(res.exponents)},
           {"slot", res.slot},
           {"N", res.N_used},
           {"kernel_epsilon", res.eps_used},
           {"initial_quasinorm_p", res.initial_quasinorm_p},
           {"triple_norm_budget_max", res.triple_norm_budget_max},
           {"non_contraction", res.non_contraction},
           {"factorization_norm", factorization_norm(res)},
           {"rounds", json::array()}};
  for (std::size_t k = 0; k < res.rounds.size(); ++k) {
    json triples = json::array();
    for (const auto& t : res.rounds[k]) {
      const int n = t.g.spec().dim();
      json tj{{"lambda", t.lambda},
              {"slot", t.slot},
              {"atom_ball", to_json(t.atom_ball, n)},
              {"g_box", box_json(t.g.box())},
              {"norm_g", t.norm_g},
              {"norm_h1", t.norm_h1},
              {"norm_h2", t.norm_h2}};
      triples.push_back(std::move(tj));
    }
    out["rounds"].push_back(json{{"round", k + 1},
                                 {"error_quasinorm_p", res.error_norms[k]},
                                 {"error_l1_bound", res.error_l1_bounds[k]},
                                 {"triple_norm_budget_max", res.round_budget_max[k]},
                                 {"triples", std::move(triples)}});
  }
  return out;
}

}  // namespace hpfact
