#include "fairmix/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "fairmix/errors.hpp"
#include "json.hpp"

namespace fairmix {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::Fit: return "fit";
    case ExperimentKind::SweepSigma: return "sweep-sigma";
    case ExperimentKind::InitMap: return "init-map";
    case ExperimentKind::Trials: return "trials";
    case ExperimentKind::Example3: return "example3";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) noexcept {
  for (auto k : {ExperimentKind::Fit, ExperimentKind::SweepSigma, ExperimentKind::InitMap,
                 ExperimentKind::Trials, ExperimentKind::Example3}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::vector<double> AxisSpec::values() const {
  if (const auto* r = std::get_if<AxisRange>(&spec)) return r->values();
  return std::get<std::vector<double>>(spec);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError(path.empty() ? "/" : path, message);
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto key : allowed) known = known || it.key() == key;
    if (!known) fail(child(path, it.key()), "unknown key");
  }
}

const json* find(const json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, std::string_view key) {
  const json* v = find(j, key);
  if (!v) fail(child(path, key), "missing required key");
  return *v;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

// null encodes "disabled" (infinite tolerance).
double as_tolerance(const json& j, const std::string& path) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  const double v = as_double(j, path);
  if (!(v > 0.0)) fail(path, "tolerance must be > 0");
  return v;
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::size_t as_count(const json& j, const std::string& path, std::size_t min = 1) {
  const auto v = as_u64(j, path);
  if (v < min) fail(path, "must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::vector<double> as_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_double(j[k], child(path, k)));
  return out;
}

AxisRange parse_range(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"from", "to", "step"});
  AxisRange r{as_double(require(j, path, "from"), child(path, "from")),
              as_double(require(j, path, "to"), child(path, "to")),
              as_double(require(j, path, "step"), child(path, "step"))};
  try {
    (void)r.count();
  } catch (const StructuralError& e) {
    fail(path, e.what());
  }
  return r;
}

AxisSpec parse_axis(const json& j, const std::string& path) {
  require_object(j, path);
  if (find(j, "values")) {
    reject_unknown(j, path, {"values"});
    auto v = as_doubles(j["values"], child(path, "values"));
    if (v.empty()) fail(child(path, "values"), "axis needs at least one value");
    return AxisSpec{std::move(v)};
  }
  return AxisSpec{parse_range(j, path)};
}

RegularGrid parse_grid(const json& j, const std::string& path) {
  require_object(j, path);
  if (find(j, "x")) {
    reject_unknown(j, path, {"x", "y"});
    const AxisRange x = parse_range(j["x"], child(path, "x"));
    if (const json* y = find(j, "y")) return RegularGrid(x, parse_range(*y, child(path, "y")));
    return RegularGrid(x);
  }
  return RegularGrid(parse_range(j, path));
}

MixtureModel parse_model(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"components", "weights"});
  const std::string cpath = child(path, "components");
  const json& comps = require(j, path, "components");
  if (!comps.is_array() || comps.empty()) fail(cpath, "expected a nonempty array of components");
  std::vector<GaussianComponent> components;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const std::string p = child(cpath, k);
    const json& c = comps[k];
    require_object(c, p);
    reject_unknown(c, p, {"mean", "sigma", "rho"});
    const auto mean = as_doubles(require(c, p, "mean"), child(p, "mean"));
    const auto sigma = as_doubles(require(c, p, "sigma"), child(p, "sigma"));
    if (mean.empty() || mean.size() > 2) fail(child(p, "mean"), "mean must have 1 or 2 entries");
    if (sigma.size() != mean.size()) fail(child(p, "sigma"), "sigma must match the mean's dimension");
    const json* rho = find(c, "rho");
    try {
      if (mean.size() == 1) {
        if (rho) fail(child(p, "rho"), "rho is only allowed in 2-D");
        components.push_back(GaussianComponent::univariate(mean[0], sigma[0]));
      } else {
        const double r = rho ? as_double(*rho, child(p, "rho")) : 0.0;
        components.push_back(
            GaussianComponent::bivariate(Point(mean[0], mean[1]), sigma[0], sigma[1], r));
      }
    } catch (const StructuralError& e) {
      fail(p, e.what());
    }
  }
  const std::string wpath = child(path, "weights");
  auto weights = as_doubles(require(j, path, "weights"), wpath);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0 || weights[k] > 1.0) fail(child(wpath, k), "weight must lie in [0, 1]");
  }
  try {
    return MixtureModel(std::move(components), std::move(weights));
  } catch (const StructuralError& e) {
    const std::string msg = e.what();
    fail(msg.find("weight") != std::string::npos ? wpath : path, msg);
  }
}

StopSpec parse_stop(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"mode", "mu_tol", "sigma_tol", "weight_tol", "kl_tol", "max_iter",
                           "boundary_weight_floor"});
  StopSpec s;
  if (const json* v = find(j, "mode")) {
    const auto text = as_string(*v, child(path, "mode"));
    if (text == "truth-aware") {
      s.mode = StopMode::TruthAware;
    } else if (text == "kl-only") {
      s.mode = StopMode::KLOnly;
    } else {
      fail(child(path, "mode"), "expected \"truth-aware\" or \"kl-only\"");
    }
  }
  if (const json* v = find(j, "mu_tol")) s.mu_tol = as_tolerance(*v, child(path, "mu_tol"));
  if (const json* v = find(j, "sigma_tol")) s.sigma_tol = as_tolerance(*v, child(path, "sigma_tol"));
  if (const json* v = find(j, "weight_tol")) s.weight_tol = as_tolerance(*v, child(path, "weight_tol"));
  if (const json* v = find(j, "kl_tol")) s.kl_tol = as_tolerance(*v, child(path, "kl_tol"));
  if (const json* v = find(j, "max_iter")) s.max_iter = as_count(*v, child(path, "max_iter"));
  if (const json* v = find(j, "boundary_weight_floor")) {
    s.boundary_weight_floor = as_double(*v, child(path, "boundary_weight_floor"));
    if (!(s.boundary_weight_floor > 0.0 && s.boundary_weight_floor < 1.0)) {
      fail(child(path, "boundary_weight_floor"), "must lie in (0, 1)");
    }
  }
  return s;
}

MapRanges parse_map(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"mu1", "mu2", "init_sigma", "init_weights", "trials_per_cell",
                           "upper_triangle"});
  MapRanges m;
  m.mu1 = parse_axis(require(j, path, "mu1"), child(path, "mu1"));
  m.mu2 = parse_axis(require(j, path, "mu2"), child(path, "mu2"));
  if (const json* v = find(j, "init_sigma")) {
    m.init_sigma = as_double(*v, child(path, "init_sigma"));
    if (!(m.init_sigma > 0.0)) fail(child(path, "init_sigma"), "must be > 0");
  }
  if (const json* v = find(j, "init_weights")) {
    const std::string wp = child(path, "init_weights");
    m.init_weights = as_doubles(*v, wp);
    if (m.init_weights.size() != 2) fail(wp, "expected two weights");
    for (double w : m.init_weights) {
      if (w < 0.0 || w > 1.0) fail(wp, "weight must lie in [0, 1]");
    }
    if (std::abs(m.init_weights[0] + m.init_weights[1] - 1.0) > 1e-12) fail(wp, "weights must sum to 1");
  }
  if (const json* v = find(j, "trials_per_cell")) {
    m.trials_per_cell = as_count(*v, child(path, "trials_per_cell"));
    if (m.trials_per_cell % 2 == 0) fail(child(path, "trials_per_cell"), "must be odd");
  }
  if (const json* v = find(j, "upper_triangle")) m.upper_triangle = as_bool(*v, child(path, "upper_triangle"));
  return m;
}

PairScenario parse_pair(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"name", "truth", "init"});
  PairScenario p{as_string(require(j, path, "name"), child(path, "name")),
                 parse_model(require(j, path, "truth"), child(path, "truth")),
                 parse_model(require(j, path, "init"), child(path, "init"))};
  for (const auto* m : {&p.truth, &p.init}) {
    if (m->dim() != 2 || m->size() != 2) fail(path, "pairs must be 2-D two-component mixtures");
  }
  return p;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// ---------------------------------------------------------------------------
// Emission

ordered_json tolerance_json(double v) {
  return std::isinf(v) ? ordered_json(nullptr) : ordered_json(v);
}

ordered_json range_json(const AxisRange& r) {
  return ordered_json{{"from", r.from}, {"to", r.to}, {"step", r.step}};
}

ordered_json axis_json(const AxisSpec& a) {
  if (const auto* r = std::get_if<AxisRange>(&a.spec)) return range_json(*r);
  return ordered_json{{"values", std::get<std::vector<double>>(a.spec)}};
}

ordered_json grid_json(const RegularGrid& g) {
  if (g.dim() == 1) return range_json(g.axis(0));
  return ordered_json{{"x", range_json(g.axis(0))}, {"y", range_json(g.axis(1))}};
}

ordered_json model_json(const MixtureModel& m) {
  ordered_json comps = ordered_json::array();
  for (const auto& c : m.components()) {
    ordered_json cj;
    if (c.dim() == 1) {
      cj["mean"] = {c.mean()[0]};
      cj["sigma"] = {c.sigma(0)};
    } else {
      cj["mean"] = {c.mean()[0], c.mean()[1]};
      cj["sigma"] = {c.sigma(0), c.sigma(1)};
      cj["rho"] = c.rho();
    }
    comps.push_back(std::move(cj));
  }
  return ordered_json{{"components", std::move(comps)}, {"weights", m.weights()}};
}

ordered_json stop_json(const StopSpec& s) {
  return ordered_json{{"mode", std::string(to_string(s.mode))},
                      {"mu_tol", tolerance_json(s.mu_tol)},
                      {"sigma_tol", tolerance_json(s.sigma_tol)},
                      {"weight_tol", tolerance_json(s.weight_tol)},
                      {"kl_tol", tolerance_json(s.kl_tol)},
                      {"max_iter", s.max_iter},
                      {"boundary_weight_floor", s.boundary_weight_floor}};
}

ordered_json to_json(const ScenarioFile& s) {
  ordered_json j;
  j["schema_version"] = s.schema_version;
  j["kind"] = std::string(to_string(s.kind));
  if (s.description) j["description"] = *s.description;
  if (s.truth) j["truth"] = model_json(*s.truth);
  if (s.init) j["init"] = model_json(*s.init);
  if (s.grid) j["grid"] = grid_json(*s.grid);
  if (s.sigmas) j["sigmas"] = range_json(*s.sigmas);
  if (s.map) {
    j["map"] = ordered_json{{"mu1", axis_json(s.map->mu1)},
                            {"mu2", axis_json(s.map->mu2)},
                            {"init_sigma", s.map->init_sigma},
                            {"init_weights", s.map->init_weights},
                            {"trials_per_cell", s.map->trials_per_cell},
                            {"upper_triangle", s.map->upper_triangle}};
  }
  if (s.sample_size) j["sample_size"] = *s.sample_size;
  if (s.binning) j["binning"] = std::string(to_string(*s.binning));
  if (s.seed) j["seed"] = *s.seed;
  if (!s.seeds.empty()) j["seeds"] = s.seeds;
  if (s.stop) j["stop"] = stop_json(*s.stop);
  if (!s.algorithms.empty()) {
    ordered_json algs = ordered_json::array();
    for (auto a : s.algorithms) algs.push_back(std::string(to_string(a)));
    j["algorithms"] = std::move(algs);
  }
  if (s.runs) j["runs"] = *s.runs;
  if (s.fast_threshold) j["fast_threshold"] = *s.fast_threshold;
  if (!s.pairs.empty()) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : s.pairs) {
      pairs.push_back(ordered_json{{"name", p.name}, {"truth", model_json(p.truth)}, {"init", model_json(p.init)}});
    }
    j["pairs"] = std::move(pairs);
  }
  if (s.horizontal_tol) j["horizontal_tol"] = *s.horizontal_tol;
  if (s.outputs.csv || s.outputs.svg) {
    ordered_json o = ordered_json::object();
    if (s.outputs.csv) o["csv"] = *s.outputs.csv;
    if (s.outputs.svg) o["svg"] = *s.outputs.svg;
    j["outputs"] = std::move(o);
  }
  return j;
}

}  // namespace

void validate_scenario(const ScenarioFile& s) {
  if (s.schema_version != kScenarioSchemaVersion) {
    fail("/schema_version", "unsupported schema version " + std::to_string(s.schema_version));
  }
  auto need = [](bool present, std::string_view key) {
    if (!present) fail("/" + std::string(key), "missing required key");
  };
  const bool is_pairs = s.kind == ExperimentKind::Example3;
  if (!is_pairs) need(s.truth.has_value(), "truth");
  if (s.init && s.truth && (s.init->dim() != s.truth->dim() || s.init->size() != s.truth->size())) {
    fail("/init", "init and truth must have the same dimension and component count");
  }
  if (s.grid && s.truth && s.grid->dim() != s.truth->dim()) {
    fail("/grid", "grid dimension does not match the truth model");
  }
  switch (s.kind) {
    case ExperimentKind::Fit:
      need(s.init.has_value(), "init");
      need(!s.algorithms.empty(), "algorithms");
      need(s.stop.has_value(), "stop");
      break;
    case ExperimentKind::SweepSigma:
      need(s.grid.has_value(), "grid");
      need(s.sigmas.has_value(), "sigmas");
      if (s.truth->dim() != 1) fail("/truth", "sweep-sigma needs a 1-D truth");
      break;
    case ExperimentKind::InitMap:
      need(s.map.has_value(), "map");
      need(s.sample_size.has_value(), "sample_size");
      need(!s.algorithms.empty(), "algorithms");
      need(s.stop.has_value(), "stop");
      need(s.seed.has_value(), "seed");
      if (s.truth->dim() != 1 || s.truth->size() != 2) {
        fail("/truth", "init-map needs a 1-D two-component truth");
      }
      break;
    case ExperimentKind::Trials:
      need(s.init.has_value(), "init");
      need(s.sample_size.has_value(), "sample_size");
      need(!s.algorithms.empty(), "algorithms");
      need(s.stop.has_value(), "stop");
      need(s.fast_threshold.has_value(), "fast_threshold");
      if (s.seeds.empty()) {
        need(s.runs.has_value(), "runs");
        need(s.seed.has_value(), "seed");
      } else if (s.runs && *s.runs != s.seeds.size()) {
        fail("/runs", "runs must equal the number of seeds");
      }
      break;
    case ExperimentKind::Example3:
      need(!s.pairs.empty(), "pairs");
      need(s.sample_size.has_value(), "sample_size");
      need(!s.algorithms.empty(), "algorithms");
      need(s.stop.has_value(), "stop");
      need(s.seed.has_value(), "seed");
      break;
  }
}

ScenarioFile parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_col(text, e.byte), "malformed JSON");
  }
  const std::string path;
  require_object(root, path);
  reject_unknown(root, path,
                 {"schema_version", "kind", "description", "truth", "init", "grid", "sigmas", "map",
                  "sample_size", "binning", "seed", "seeds", "stop", "algorithms", "runs",
                  "fast_threshold", "pairs", "horizontal_tol", "outputs"});

  ScenarioFile s;
  s.schema_version = static_cast<int>(as_u64(require(root, path, "schema_version"), "/schema_version"));
  {
    const auto text_kind = as_string(require(root, path, "kind"), "/kind");
    const auto kind = parse_experiment_kind(text_kind);
    if (!kind) fail("/kind", "unknown experiment kind \"" + text_kind + "\"");
    s.kind = *kind;
  }
  if (const json* v = find(root, "description")) s.description = as_string(*v, "/description");
  if (const json* v = find(root, "truth")) s.truth = parse_model(*v, "/truth");
  if (const json* v = find(root, "init")) s.init = parse_model(*v, "/init");
  if (const json* v = find(root, "grid")) s.grid = parse_grid(*v, "/grid");
  if (const json* v = find(root, "sigmas")) s.sigmas = parse_range(*v, "/sigmas");
  if (const json* v = find(root, "map")) s.map = parse_map(*v, "/map");
  if (const json* v = find(root, "sample_size")) s.sample_size = as_count(*v, "/sample_size");
  if (const json* v = find(root, "binning")) {
    const auto b = as_string(*v, "/binning");
    if (b == "grid") {
      s.binning = Binning::Grid;
    } else if (b == "raw") {
      s.binning = Binning::Raw;
    } else {
      fail("/binning", "expected \"grid\" or \"raw\"");
    }
  }
  if (const json* v = find(root, "seed")) s.seed = as_u64(*v, "/seed");
  if (const json* v = find(root, "seeds")) {
    if (!v->is_array()) fail("/seeds", "expected an array of integers");
    for (std::size_t k = 0; k < v->size(); ++k) s.seeds.push_back(as_u64((*v)[k], child("/seeds", k)));
  }
  if (const json* v = find(root, "stop")) s.stop = parse_stop(*v, "/stop");
  if (const json* v = find(root, "algorithms")) {
    if (!v->is_array()) fail("/algorithms", "expected an array of algorithm names");
    for (std::size_t k = 0; k < v->size(); ++k) {
      const auto name = as_string((*v)[k], child("/algorithms", k));
      const auto alg = parse_algorithm(name);
      if (!alg) fail(child("/algorithms", k), "unknown algorithm \"" + name + "\" (em, cmem, e3m)");
      s.algorithms.push_back(*alg);
    }
  }
  if (const json* v = find(root, "runs")) s.runs = as_count(*v, "/runs");
  if (const json* v = find(root, "fast_threshold")) s.fast_threshold = as_count(*v, "/fast_threshold");
  if (const json* v = find(root, "pairs")) {
    if (!v->is_array()) fail("/pairs", "expected an array of pairs");
    for (std::size_t k = 0; k < v->size(); ++k) s.pairs.push_back(parse_pair((*v)[k], child("/pairs", k)));
  }
  if (const json* v = find(root, "horizontal_tol")) {
    s.horizontal_tol = as_double(*v, "/horizontal_tol");
    if (!(*s.horizontal_tol > 0.0)) fail("/horizontal_tol", "must be > 0");
  }
  if (const json* v = find(root, "outputs")) {
    require_object(*v, "/outputs");
    reject_unknown(*v, "/outputs", {"csv", "svg"});
    if (const json* c = find(*v, "csv")) s.outputs.csv = as_string(*c, "/outputs/csv");
    if (const json* g = find(*v, "svg")) s.outputs.svg = as_string(*g, "/outputs/svg");
  }
  validate_scenario(s);
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const ScenarioFile& s) { return to_json(s).dump(2) + "\n"; }

std::uint64_t scenario_hash(const ScenarioFile& s) {
  const std::string canonical = to_json(s).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace fairmix
