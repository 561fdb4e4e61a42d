#include "msdiff/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "msdiff/errors.hpp"

namespace msdiff {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ValidationError, path + ": " + what, path);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string at_index(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known)
      throw Error(ErrorKind::ParseError, "unknown key \"" + key + "\" at " + join(path, key),
                  join(path, key));
  }
}

const json& member(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) invalid(join(path, key), "required key is missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, join(path, key));
}

std::string string_value(const json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

template <class T, class Get>
std::vector<T> array_of(const json& j, const std::string& path, Get get) {
  if (!j.is_array()) invalid(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get(j[i], at_index(path, i)));
  return out;
}

// Rewraps core-model errors as validation errors with the field path rooted
// at `prefix` (empty when the field is already a full path).
template <class Fn>
auto with_prefix(const std::string& prefix, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError || e.kind() == ErrorKind::ParseError) throw;
    const std::string path = e.field().empty() ? prefix
                             : prefix.empty()   ? e.field()
                                                : join(prefix, e.field());
    throw Error(ErrorKind::ValidationError, path + ": " + e.what(), path);
  }
}

MixtureSpec parse_mixture(const json& j) {
  const std::string path = "mixture";
  require_object(j, path);
  check_keys(j, path, {"n", "alpha", "K", "bounds"});
  RawMixture raw;
  raw.n = integer(member(j, path, "n"), join(path, "n"));
  raw.alpha = number(member(j, path, "alpha"), join(path, "alpha"));
  raw.K = array_of<std::vector<double>>(member(j, path, "K"), join(path, "K"),
                                        [](const json& row, const std::string& p) {
                                          return array_of<double>(row, p, number);
                                        });
  const std::string bpath = join(path, "bounds");
  const json& b = member(j, path, "bounds");
  require_object(b, bpath);
  check_keys(b, bpath, {"c_min", "c_max", "T_min", "T_max"});
  raw.bounds.c_min = number(member(b, bpath, "c_min"), join(bpath, "c_min"));
  raw.bounds.c_max = number(member(b, bpath, "c_max"), join(bpath, "c_max"));
  raw.bounds.T_min = number(member(b, bpath, "T_min"), join(bpath, "T_min"));
  raw.bounds.T_max = number(member(b, bpath, "T_max"), join(bpath, "T_max"));
  return with_prefix(path, [&] { return validate_mixture(raw); });
}

Grid parse_grid(const json& j) {
  const std::string path = "grid";
  require_object(j, path);
  check_keys(j, path, {"d", "cells", "lengths"});
  const int d = integer(member(j, path, "d"), join(path, "d"));
  const auto cells = array_of<int>(member(j, path, "cells"), join(path, "cells"), integer);
  const auto lengths = array_of<double>(member(j, path, "lengths"), join(path, "lengths"), number);
  return with_prefix(path, [&] { return Grid::make(d, cells, lengths); });
}

std::array<int, 2> parse_mode(const json& j, const std::string& path) {
  if (j.is_number_integer()) return {integer(j, path), 0};
  const auto modes = array_of<int>(j, path, integer);
  if (modes.empty() || modes.size() > 2) invalid(path, "expected one or two modes");
  return {modes[0], modes.size() > 1 ? modes[1] : 0};
}

std::array<double, 2> parse_point(const json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.5};
  const auto p = array_of<double>(j, path, number);
  if (p.empty() || p.size() > 2) invalid(path, "expected one or two coordinates");
  return {p[0], p.size() > 1 ? p[1] : 0.5};
}

Profile parse_profile(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string preset = string_value(member(j, path, "preset"), join(path, "preset"));
  if (preset == "uniform") {
    check_keys(j, path, {"preset", "value"});
    return UniformProfile{number(member(j, path, "value"), join(path, "value"))};
  }
  if (preset == "cosine") {
    check_keys(j, path, {"preset", "mean", "amplitude", "mode"});
    CosineProfile p;
    p.mean = number(member(j, path, "mean"), join(path, "mean"));
    p.amplitude = number(member(j, path, "amplitude"), join(path, "amplitude"));
    if (auto it = j.find("mode"); it != j.end()) p.mode = parse_mode(*it, join(path, "mode"));
    if (p.mode[0] < 0 || p.mode[1] < 0) invalid(join(path, "mode"), "modes must be non-negative");
    return p;
  }
  if (preset == "gaussian") {
    check_keys(j, path, {"preset", "center", "width", "floor", "peak"});
    GaussianProfile p;
    p.center = parse_point(member(j, path, "center"), join(path, "center"));
    p.width = number(member(j, path, "width"), join(path, "width"));
    if (!(p.width > 0.0)) invalid(join(path, "width"), "width must be positive");
    p.floor = number_or(j, path, "floor", 0.0);
    p.peak = number(member(j, path, "peak"), join(path, "peak"));
    return p;
  }
  if (preset == "step") {
    check_keys(j, path, {"preset", "left", "right", "interface"});
    StepProfile p;
    p.left = number(member(j, path, "left"), join(path, "left"));
    p.right = number(member(j, path, "right"), join(path, "right"));
    p.interface = number(member(j, path, "interface"), join(path, "interface"));
    return p;
  }
  invalid(join(path, "preset"), "unknown preset \"" + preset + "\"");
}

ScenarioConfig parse_document(const json& doc) {
  require_object(doc, "(root)");
  check_keys(doc, "", {"mixture", "grid", "initial", "time", "schemes", "output"});
  ScenarioConfig cfg;
  cfg.mixture = parse_mixture(member(doc, "", "mixture"));
  cfg.grid = parse_grid(member(doc, "", "grid"));

  const json& init = member(doc, "", "initial");
  require_object(init, "initial");
  check_keys(init, "initial", {"species", "temperature"});
  cfg.species = array_of<Profile>(member(init, "initial", "species"), "initial.species", parse_profile);
  if (static_cast<int>(cfg.species.size()) != cfg.mixture.n)
    invalid("initial.species", "expected " + std::to_string(cfg.mixture.n) + " profiles");
  cfg.temperature = parse_profile(member(init, "initial", "temperature"), "initial.temperature");

  const json& time = member(doc, "", "time");
  require_object(time, "time");
  check_keys(time, "time", {"t_end", "dt", "cfl_safety"});
  cfg.time.t_end = number(member(time, "time", "t_end"), "time.t_end");
  if (!(cfg.time.t_end > 0.0)) invalid("time.t_end", "must be positive");
  if (time.contains("dt") && time.contains("cfl_safety"))
    invalid("time", "give either dt or cfl_safety, not both");
  if (auto it = time.find("dt"); it != time.end()) {
    cfg.time.fixed_dt = number(*it, "time.dt");
    if (!(*cfg.time.fixed_dt > 0.0)) invalid("time.dt", "must be positive");
  }
  cfg.time.cfl_safety = number_or(time, "time", "cfl_safety", 1.0);
  if (!(cfg.time.cfl_safety > 0.0)) invalid("time.cfl_safety", "must be positive");

  if (auto it = doc.find("schemes"); it != doc.end()) {
    require_object(*it, "schemes");
    check_keys(*it, "schemes", {"concentration", "temperature"});
    if (auto c = it->find("concentration"); c != it->end()) {
      const std::string s = string_value(*c, "schemes.concentration");
      if (s == "explicit")
        cfg.concentration_scheme = ConcentrationScheme::Explicit;
      else if (s == "semi_implicit")
        cfg.concentration_scheme = ConcentrationScheme::SemiImplicit;
      else
        invalid("schemes.concentration", "expected explicit or semi_implicit");
    }
    if (auto t = it->find("temperature"); t != it->end()) {
      const std::string s = string_value(*t, "schemes.temperature");
      if (s == "upwind")
        cfg.temperature_scheme = TemperatureScheme::Upwind;
      else if (s == "characteristics")
        cfg.temperature_scheme = TemperatureScheme::Characteristics;
      else
        invalid("schemes.temperature", "expected upwind or characteristics");
    }
  }

  if (auto it = doc.find("output"); it != doc.end()) {
    require_object(*it, "output");
    check_keys(*it, "output", {"dir", "snapshot_times", "every_n_steps"});
    if (auto d = it->find("dir"); d != it->end()) cfg.output.dir = string_value(*d, "output.dir");
    if (it->contains("snapshot_times") && it->contains("every_n_steps"))
      invalid("output", "give either snapshot_times or every_n_steps, not both");
    if (auto s = it->find("snapshot_times"); s != it->end()) {
      cfg.output.snapshot_times = array_of<double>(*s, "output.snapshot_times", number);
      for (std::size_t i = 0; i < cfg.output.snapshot_times.size(); ++i) {
        const double t = cfg.output.snapshot_times[i];
        if (t < 0.0 || t > cfg.time.t_end)
          invalid(at_index("output.snapshot_times", i), "outside [0, t_end]");
      }
    }
    if (auto e = it->find("every_n_steps"); e != it->end()) {
      cfg.output.every_n_steps = integer(*e, "output.every_n_steps");
      if (cfg.output.every_n_steps < 1) invalid("output.every_n_steps", "must be >= 1");
    }
  }

  with_prefix("", [&] { return build_initial_state(cfg); });
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::ParseError, "malformed JSON at line " + std::to_string(line) +
                                           ", column " + std::to_string(column) + ": " + e.what());
  }
  return parse_document(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ScenarioConfig refine(const ScenarioConfig& config, int factor) {
  ScenarioConfig out = config;
  const Grid& g = config.grid;
  std::vector<int> cells;
  std::vector<double> lengths;
  for (int a = 0; a < g.dim(); ++a) {
    cells.push_back(g.cells(a) * factor);
    lengths.push_back(g.length(a));
  }
  out.grid = Grid::make(g.dim(), cells, lengths);
  if (out.time.fixed_dt) *out.time.fixed_dt /= static_cast<double>(factor) * factor;
  return out;
}

}  // namespace msdiff
