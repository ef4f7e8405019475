#include "specinv/config.hpp"

#include "specinv/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace specinv {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

// A length is a number, "pi", or "<number>*pi".
double parse_length(const json& v, const char* key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "pi") return std::numbers::pi;
    const auto star = s.find("*pi");
    if (star != std::string::npos && star + 3 == s.size()) {
      try {
        return std::stod(s.substr(0, star)) * std::numbers::pi;
      } catch (const std::exception&) {
      }
    }
  }
  invalid(std::string("cannot parse length for '") + key + "'");
}

PotentialSpec parse_potential(const json& v) {
  PotentialSpec spec;
  if (v.is_string()) {
    if (v.get<std::string>() != "zero") invalid("unknown potential preset '" + v.get<std::string>() + "'");
    return spec;
  }
  if (!v.is_array()) invalid("potential must be \"zero\" or a list of {coef, basis} terms");
  for (const json& term : v) {
    if (!term.contains("coef") || !term.contains("basis")) invalid("potential term needs coef and basis");
    spec.terms.push_back({term.at("coef").get<double>(), term.at("basis").get<std::string>()});
  }
  return spec;
}

json potential_to_json(const PotentialSpec& spec) {
  if (spec.terms.empty()) return "zero";
  json arr = json::array();
  for (const auto& t : spec.terms) arr.push_back({{"coef", t.coefficient}, {"basis", t.basis}});
  return arr;
}

BoundaryData parse_boundary_data(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() != "random") invalid("boundary data must be \"random\" or a list of values");
    return v.get<std::string>();
  }
  return v.get<std::vector<double>>();
}

json boundary_data_to_json(const BoundaryData& d) {
  if (const auto* s = std::get_if<std::string>(&d)) return *s;
  return std::get<std::vector<double>>(d);
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

// Bundled presets, stored as the same JSON a user would write.
const char* preset_json(const std::string& name) {
  if (name == "interval_q0") return R"json({
    "name": "interval_q0",
    "domain": {"kind": "interval", "extent_a": "pi", "n_a": 201},
    "potential": "zero",
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 10.5, "step": 0.05},
    "extraction": {"eps_gap": 0.2},
    "ndmap": {"lambdas": [-1.0]}
  })json";
  if (name == "interval_recover") return R"json({
    "name": "interval_recover",
    "domain": {"kind": "interval", "extent_a": "pi", "n_a": 201},
    "potential": [{"coef": 1.0, "basis": "1"}, {"coef": 0.3, "basis": "sin(x)"}],
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 30.5, "step": 0.05},
    "extraction": {"eps_gap": 0.2},
    "ndmap": {"lambdas": [-1.0]},
    "reconstruction": {"enabled": true, "basis": ["1", "sin(x)"], "initial": [0.0, 0.0]}
  })json";
  if (name == "square_degenerate") return R"json({
    "name": "square_degenerate",
    "domain": {"kind": "rectangle", "extent_a": "pi", "extent_b": "pi", "n_a": 21, "n_b": 21},
    "potential": "zero",
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 10.5, "step": 0.05},
    "extraction": {"eps_gap": 0.2}
  })json";
  if (name == "rect_q0") return R"json({
    "name": "rect_q0",
    "domain": {"kind": "rectangle", "extent_a": "pi", "n_a": 25, "n_b": 25},
    "potential": "zero",
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 8.5, "step": 0.02},
    "extraction": {"eps_gap": 0.1},
    "ndmap": {"lambdas": [-1.0]}
  })json";
  if (name == "rect_recover") return R"json({
    "name": "rect_recover",
    "domain": {"kind": "rectangle", "extent_a": "pi", "n_a": 41, "n_b": 41},
    "potential": [{"coef": 0.5, "basis": "1"}, {"coef": 0.4, "basis": "sin(pi*x/a)"}],
    "forward": {"j_max": 40},
    "lambda_grid": {"min": -0.5, "max": 8.5, "step": 0.02},
    "extraction": {"eps_gap": 0.1},
    "ndmap": {"lambdas": [-1.0]},
    "reconstruction": {"enabled": true, "basis": ["1", "sin(pi*x/a)"], "initial": [0.0, 0.0],
                       "use_signed_traces": true}
  })json";
  if (name == "probe_same") return R"json({
    "name": "probe_same",
    "domain": {"kind": "interval", "extent_a": "pi", "n_a": 201},
    "potential": [{"coef": 0.2, "basis": "cos(x)"}],
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 10.5, "step": 0.05},
    "extraction": {"eps_gap": 0.2},
    "probe": {"enabled": true, "q2": [{"coef": 0.2, "basis": "cos(x)"}], "lambda": -1.0}
  })json";
  if (name == "probe_perturbed") return R"json({
    "name": "probe_perturbed",
    "domain": {"kind": "interval", "extent_a": "pi", "n_a": 201},
    "potential": "zero",
    "forward": {"j_max": 0},
    "lambda_grid": {"min": -0.5, "max": 10.5, "step": 0.05},
    "extraction": {"eps_gap": 0.2},
    "probe": {"enabled": true, "q2": [{"coef": 0.1, "basis": "sin(x)"}], "lambda": -1.0}
  })json";
  return nullptr;
}

}  // namespace

ScalarField basis_function(const std::string& name, const DomainSpec& d) {
  const double pi = std::numbers::pi;
  const double a = d.extent_a;
  const double b = d.extent_b > 0.0 ? d.extent_b : 1.0;
  if (name == "1") return [](double, double) { return 1.0; };
  if (name == "x") return [](double x, double) { return x; };
  if (name == "y") return [](double, double y) { return y; };
  if (name == "x^2") return [](double x, double) { return x * x; };
  if (name == "y^2") return [](double, double y) { return y * y; };
  if (name == "sin(x)") return [](double x, double) { return std::sin(x); };
  if (name == "cos(x)") return [](double x, double) { return std::cos(x); };
  if (name == "sin(y)") return [](double, double y) { return std::sin(y); };
  if (name == "cos(y)") return [](double, double y) { return std::cos(y); };
  if (name == "sin(pi*x/a)") return [=](double x, double) { return std::sin(pi * x / a); };
  if (name == "cos(pi*x/a)") return [=](double x, double) { return std::cos(pi * x / a); };
  if (name == "sin(pi*y/b)") return [=](double, double y) { return std::sin(pi * y / b); };
  if (name == "cos(pi*y/b)") return [=](double, double y) { return std::cos(pi * y / b); };
  invalid("unknown basis function '" + name + "'");
}

Potential make_potential(const Grid& grid, const PotentialSpec& spec) {
  std::vector<std::pair<double, ScalarField>> fields;
  for (const auto& t : spec.terms) fields.emplace_back(t.coefficient, basis_function(t.basis, grid.spec()));
  return sample_potential(grid, [&](double x, double y) {
    double v = 0.0;
    for (const auto& [c, fn] : fields) v += c * fn(x, y);
    return v;
  });
}

void PipelineConfig::validate() const {
  try {
    domain.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (!(lambda_step > 0.0) || !(lambda_max > lambda_min)) invalid("lambda grid needs min < max and step > 0");
  if (!(extraction.eps_gap > 0.0)) invalid("eps_gap must be positive");
  if (extraction.jump_tol < 0.0) invalid("jump_tol must be nonnegative (0 selects the default)");
  if (!(lambda_step < 0.5 * extraction.eps_gap)) invalid("lambda step must be below eps_gap/2");
  if (!(sign.tau_rel > 0.0) || sign.window < 2 || sign.m_max < 1 || !(sign.min_confidence > 0.0))
    invalid("sign recovery tolerances must be positive");
  if (reconstruction.enabled) {
    if (reconstruction.basis.empty()) invalid("reconstruction basis is empty");
    if (reconstruction.basis.size() > 8) invalid("reconstruction basis is limited to 8 functions");
    if (!reconstruction.initial.empty() && reconstruction.initial.size() != reconstruction.basis.size())
      invalid("reconstruction.initial must match the basis size");
    if (reconstruction.reg_weight < 0.0 || reconstruction.max_iter < 1) invalid("bad reconstruction settings");
    for (const auto& name : reconstruction.basis) basis_function(name, domain);
  }
  for (const auto& t : potential.terms) basis_function(t.basis, domain);
  for (const auto& t : probe.q2.terms) basis_function(t.basis, domain);
}

PipelineConfig config_from_json(const json& j) {
  try {
    PipelineConfig c;
    read_opt(j, "name", c.name);
    const json& d = j.at("domain");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "interval") {
      c.domain = DomainSpec::interval(parse_length(d.at("extent_a"), "extent_a"), d.at("n_a").get<int>());
    } else if (kind == "rectangle") {
      const double a = parse_length(d.at("extent_a"), "extent_a");
      double aspect = default_aspect();
      read_opt(d, "aspect", aspect);
      const double b = d.contains("extent_b") ? parse_length(d.at("extent_b"), "extent_b") : a * aspect;
      c.domain = DomainSpec::rectangle(a, b, d.at("n_a").get<int>(), d.at("n_b").get<int>());
    } else {
      invalid("domain.kind must be interval or rectangle");
    }
    if (j.contains("potential")) c.potential = parse_potential(j.at("potential"));
    if (j.contains("forward")) read_opt(j.at("forward"), "j_max", c.j_max);
    if (j.contains("lambda_grid")) {
      const json& g = j.at("lambda_grid");
      read_opt(g, "min", c.lambda_min);
      read_opt(g, "max", c.lambda_max);
      read_opt(g, "step", c.lambda_step);
    }
    if (j.contains("extraction")) {
      const json& e = j.at("extraction");
      read_opt(e, "eps_gap", c.extraction.eps_gap);
      read_opt(e, "jump_tol", c.extraction.jump_tol);
      read_opt(e, "bisection_iterations", c.extraction.bisection_iterations);
    }
    if (j.contains("sign_recovery")) {
      const json& s = j.at("sign_recovery");
      read_opt(s, "tau_rel", c.sign.tau_rel);
      read_opt(s, "window", c.sign.window);
      read_opt(s, "m_max", c.sign.m_max);
      read_opt(s, "min_confidence", c.sign.min_confidence);
    }
    if (j.contains("ndmap")) {
      read_opt(j.at("ndmap"), "lambdas", c.nd_lambdas);
      read_opt(j.at("ndmap"), "j_cut", c.nd_j_cut);
    }
    if (j.contains("reconstruction")) {
      const json& r = j.at("reconstruction");
      read_opt(r, "enabled", c.reconstruction.enabled);
      read_opt(r, "basis", c.reconstruction.basis);
      read_opt(r, "initial", c.reconstruction.initial);
      read_opt(r, "reg_weight", c.reconstruction.reg_weight);
      read_opt(r, "max_iter", c.reconstruction.max_iter);
      read_opt(r, "use_signed_traces", c.reconstruction.use_signed_traces);
    }
    if (j.contains("probe")) {
      const json& p = j.at("probe");
      read_opt(p, "enabled", c.probe.enabled);
      if (p.contains("q2")) c.probe.q2 = parse_potential(p.at("q2"));
      read_opt(p, "lambda", c.probe.lambda);
      if (p.contains("f")) c.probe.f = parse_boundary_data(p.at("f"));
      if (p.contains("g")) c.probe.g = parse_boundary_data(p.at("g"));
    }
    read_opt(j, "seed", c.seed);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    invalid(std::string("malformed configuration: ") + e.what());
  }
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["name"] = c.name;
  json d;
  if (c.domain.kind == DomainKind::Interval) {
    d = {{"kind", "interval"}, {"extent_a", c.domain.extent_a}, {"n_a", c.domain.n_a}};
  } else {
    d = {{"kind", "rectangle"}, {"extent_a", c.domain.extent_a}, {"extent_b", c.domain.extent_b},
         {"n_a", c.domain.n_a},  {"n_b", c.domain.n_b}};
  }
  j["domain"] = d;
  j["potential"] = potential_to_json(c.potential);
  j["forward"] = {{"j_max", c.j_max}};
  j["lambda_grid"] = {{"min", c.lambda_min}, {"max", c.lambda_max}, {"step", c.lambda_step}};
  j["extraction"] = {{"eps_gap", c.extraction.eps_gap},
                     {"jump_tol", c.extraction.jump_tol},
                     {"bisection_iterations", c.extraction.bisection_iterations}};
  j["sign_recovery"] = {{"tau_rel", c.sign.tau_rel},
                        {"window", c.sign.window},
                        {"m_max", c.sign.m_max},
                        {"min_confidence", c.sign.min_confidence}};
  j["ndmap"] = {{"lambdas", c.nd_lambdas}, {"j_cut", c.nd_j_cut}};
  j["reconstruction"] = {{"enabled", c.reconstruction.enabled},
                         {"basis", c.reconstruction.basis},
                         {"initial", c.reconstruction.initial},
                         {"reg_weight", c.reconstruction.reg_weight},
                         {"max_iter", c.reconstruction.max_iter},
                         {"use_signed_traces", c.reconstruction.use_signed_traces}};
  j["probe"] = {{"enabled", c.probe.enabled},
                {"q2", potential_to_json(c.probe.q2)},
                {"lambda", c.probe.lambda},
                {"f", boundary_data_to_json(c.probe.f)},
                {"g", boundary_data_to_json(c.probe.g)}};
  j["seed"] = c.seed;
  return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<std::string> preset_names() {
  return {"interval_q0", "interval_recover", "square_degenerate", "rect_q0",
          "rect_recover", "probe_same",      "probe_perturbed"};
}

PipelineConfig preset(const std::string& name) {
  const char* text = preset_json(name);
  if (text == nullptr) invalid("unknown preset '" + name + "'");
  return config_from_json(json::parse(text));
}

std::vector<double> seeded_uniform(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return out;
}

}  // namespace specinv
