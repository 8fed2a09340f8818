#include "q4nl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "q4nl/error.hpp"

namespace q4nl {

using nlohmann::json;

bool OutputConfig::has(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

StepPlan RunConfig::plan() const { return StepPlan::over(time.t_end, time.dt, time.record_every); }

WeightSpec RunConfig::weight(const Grid& grid) const {
  WeightSpec w;
  w.kind = diagnostics.weight.kind;
  w.epsilon = w.kind == WeightKind::radial_eps ? diagnostics.weight.epsilon_cells * grid.spacing() : 0.0;
  w.window = diagnostics.weight.window;
  return w;
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError("expected an object", path.empty() ? "<root>" : path);
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      throw ConfigError("unknown key", at(path, key));
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("expected a number", path);
  return v.get<double>();
}

long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("expected an integer", path);
  return v.get<long>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError("expected true or false", path);
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("expected a string", path);
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("expected an array", path);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], at(path, i)));
  return out;
}

std::array<double, 3> vec3(const json& v, const std::string& path) {
  const auto xs = numbers(v, path);
  if (xs.size() > 3) throw ConfigError("at most 3 entries", path);
  std::array<double, 3> out{};
  std::copy(xs.begin(), xs.end(), out.begin());
  return out;
}

CouplingMatrix matrix(const json& v, int n, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw ConfigError("expected " + std::to_string(n) + " rows", path);
  CouplingMatrix m(n);
  for (int i = 0; i < n; ++i) {
    const auto row = at(path, static_cast<std::size_t>(i));
    const auto& r = v[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<int>(r.size()) != n)
      throw ConfigError("expected " + std::to_string(n) + " entries", row);
    for (int j = 0; j < n; ++j) m(i, j) = number(r[static_cast<std::size_t>(j)], at(row, static_cast<std::size_t>(j)));
  }
  return m;
}

template <class F>
void maybe(const json& obj, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it);
}

const json& need(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key", at(path, key));
  return *it;
}

Bump parse_bump(const json& v, const std::string& path) {
  only_keys(v, path, {"amplitude", "sigma", "center", "velocity"});
  Bump b;
  maybe(v, "amplitude", [&](const json& x) { b.amplitude = number(x, at(path, "amplitude")); });
  maybe(v, "sigma", [&](const json& x) { b.sigma = number(x, at(path, "sigma")); });
  maybe(v, "center", [&](const json& x) { b.center = vec3(x, at(path, "center")); });
  maybe(v, "velocity", [&](const json& x) { b.velocity = vec3(x, at(path, "velocity")); });
  return b;
}

RunConfig from_json(const json& root) {
  RunConfig c;
  only_keys(root, "", {"grid", "system", "time", "initial", "diagnostics", "scattering", "output"});

  const auto& g = need(root, "grid", "");
  only_keys(g, "grid", {"d", "n", "L"});
  c.grid.dimension = static_cast<int>(integer(need(g, "d", "grid"), "grid.d"));
  c.grid.points_per_axis = static_cast<int>(integer(need(g, "n", "grid"), "grid.n"));
  c.grid.side_length = number(need(g, "L", "grid"), "grid.L");

  const auto& s = need(root, "system", "");
  only_keys(s, "system", {"N", "p", "kappa", "beta", "lambda"});
  const long n_comp = integer(need(s, "N", "system"), "system.N");
  if (n_comp < 1 || n_comp > 64) throw ConfigError("N must lie in [1, 64]", "system.N");
  c.system.components = static_cast<int>(n_comp);
  c.system.p = number(need(s, "p", "system"), "system.p");
  c.system.kappa = static_cast<int>(integer(need(s, "kappa", "system"), "system.kappa"));
  c.system.beta = matrix(need(s, "beta", "system"), c.system.components, "system.beta");
  c.system.lambda = CouplingMatrix(c.system.components);
  maybe(s, "lambda", [&](const json& x) { c.system.lambda = matrix(x, c.system.components, "system.lambda"); });

  maybe(root, "time", [&](const json& t) {
    only_keys(t, "time", {"dt", "t_end", "record_every"});
    maybe(t, "dt", [&](const json& x) { c.time.dt = number(x, "time.dt"); });
    maybe(t, "t_end", [&](const json& x) { c.time.t_end = number(x, "time.t_end"); });
    maybe(t, "record_every", [&](const json& x) { c.time.record_every = integer(x, "time.record_every"); });
  });

  maybe(root, "initial", [&](const json& in) {
    only_keys(in, "initial", {"kind", "params", "seed"});
    maybe(in, "kind", [&](const json& x) { c.initial.kind = parse_initial_kind(text(x, "initial.kind")); });
    maybe(in, "seed", [&](const json& x) {
      if (!x.is_number_unsigned()) throw ConfigError("expected a nonnegative integer", "initial.seed");
      c.initial.seed = x.get<std::uint64_t>();
    });
    maybe(in, "params", [&](const json& p) {
      const std::string path = "initial.params";
      only_keys(p, path, {"bumps", "amplitude", "k_width", "window", "component_scale"});
      auto& ip = c.initial.params;
      maybe(p, "bumps", [&](const json& x) {
        if (!x.is_array()) throw ConfigError("expected an array", path + ".bumps");
        ip.bumps.clear();
        for (std::size_t i = 0; i < x.size(); ++i) ip.bumps.push_back(parse_bump(x[i], at(path + ".bumps", i)));
      });
      maybe(p, "amplitude", [&](const json& x) { ip.amplitude = number(x, path + ".amplitude"); });
      maybe(p, "k_width", [&](const json& x) { ip.k_width = number(x, path + ".k_width"); });
      maybe(p, "window", [&](const json& x) { ip.window = number(x, path + ".window"); });
      maybe(p, "component_scale", [&](const json& x) { ip.component_scale = numbers(x, path + ".component_scale"); });
    });
  });

  maybe(root, "diagnostics", [&](const json& d) {
    only_keys(d, "diagnostics", {"q_list", "weight", "interaction", "tolerance"});
    maybe(d, "q_list", [&](const json& x) { c.diagnostics.q_list = numbers(x, "diagnostics.q_list"); });
    maybe(d, "interaction", [&](const json& x) { c.diagnostics.interaction = boolean(x, "diagnostics.interaction"); });
    maybe(d, "tolerance", [&](const json& x) { c.diagnostics.tolerance = number(x, "diagnostics.tolerance"); });
    maybe(d, "weight", [&](const json& w) {
      only_keys(w, "diagnostics.weight", {"kind", "epsilon_cells", "window"});
      auto& wc = c.diagnostics.weight;
      maybe(w, "kind", [&](const json& x) { wc.kind = parse_weight_kind(text(x, "diagnostics.weight.kind")); });
      maybe(w, "epsilon_cells", [&](const json& x) { wc.epsilon_cells = number(x, "diagnostics.weight.epsilon_cells"); });
      maybe(w, "window", [&](const json& x) { wc.window = static_cast<int>(integer(x, "diagnostics.weight.window")); });
    });
  });

  maybe(root, "scattering", [&](const json& sc) {
    only_keys(sc, "scattering", {"checkpoint_times", "horizon", "tolerance"});
    maybe(sc, "checkpoint_times", [&](const json& x) { c.scattering.checkpoint_times = numbers(x, "scattering.checkpoint_times"); });
    maybe(sc, "horizon", [&](const json& x) { c.scattering.horizon = number(x, "scattering.horizon"); });
    maybe(sc, "tolerance", [&](const json& x) { c.scattering.tolerance = number(x, "scattering.tolerance"); });
  });

  maybe(root, "output", [&](const json& o) {
    only_keys(o, "output", {"directory", "formats"});
    maybe(o, "directory", [&](const json& x) { c.output.directory = text(x, "output.directory"); });
    maybe(o, "formats", [&](const json& x) {
      if (!x.is_array()) throw ConfigError("expected an array", "output.formats");
      c.output.formats.clear();
      for (std::size_t i = 0; i < x.size(); ++i) c.output.formats.push_back(text(x[i], at("output.formats", i)));
    });
  });
  return c;
}

json matrix_json(const CouplingMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vec_json(const std::array<double, 3>& v, int d) {
  // Trailing entries past the dimension are kept when nonzero so the round trip is exact.
  int used = 3;
  while (used > d && v[static_cast<std::size_t>(used - 1)] == 0.0) --used;
  json out = json::array();
  for (int a = 0; a < used; ++a) out.push_back(v[static_cast<std::size_t>(a)]);
  return out;
}

}  // namespace

void validate(const RunConfig& c) {
  validate(c.grid);
  validate(c.system);
  if (!(c.time.dt > 0.0) || !std::isfinite(c.time.dt)) throw ConfigError("dt must be positive", "time.dt");
  if (!(c.time.t_end >= 0.0) || !std::isfinite(c.time.t_end)) throw ConfigError("t_end must be >= 0", "time.t_end");
  if (c.time.record_every < 1) throw ConfigError("record_every must be >= 1", "time.record_every");

  const auto& ip = c.initial.params;
  if (c.initial.kind != InitialKind::random_schwartz) {
    if (ip.bumps.empty()) throw ConfigError("at least one bump is required", "initial.params.bumps");
    for (std::size_t i = 0; i < ip.bumps.size(); ++i) {
      const auto path = "initial.params.bumps[" + std::to_string(i) + "]";
      if (!(ip.bumps[i].sigma > 0.0)) throw ConfigError("sigma must be positive", path + ".sigma");
      if (!std::isfinite(ip.bumps[i].amplitude)) throw ConfigError("amplitude must be finite", path + ".amplitude");
    }
  } else {
    if (!(ip.k_width > 0.0)) throw ConfigError("k_width must be positive", "initial.params.k_width");
    if (!(ip.window > 0.0)) throw ConfigError("window must be positive", "initial.params.window");
  }
  if (!ip.component_scale.empty() && static_cast<int>(ip.component_scale.size()) != c.system.components)
    throw ConfigError("one entry per component is required", "initial.params.component_scale");

  for (std::size_t i = 0; i < c.diagnostics.q_list.size(); ++i) {
    const double q = c.diagnostics.q_list[i];
    if (!(q >= 1.0) || !std::isfinite(q))
      throw ConfigError("exponents must be finite and >= 1", "diagnostics.q_list[" + std::to_string(i) + "]");
  }
  const auto& w = c.diagnostics.weight;
  if (w.kind == WeightKind::radial_eps && !(w.epsilon_cells > 0.0))
    throw ConfigError("epsilon must be positive", "diagnostics.weight.epsilon_cells");
  if (w.window < 0 || 2 * w.window >= c.grid.points_per_axis)
    throw ConfigError("window must lie in [0, n/2)", "diagnostics.weight.window");
  if (!(c.diagnostics.tolerance > 0.0)) throw ConfigError("tolerance must be positive", "diagnostics.tolerance");

  const auto& times = c.scattering.checkpoint_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto path = "scattering.checkpoint_times[" + std::to_string(i) + "]";
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw ConfigError("times must be >= 0", path);
    if (i > 0 && !(times[i] > times[i - 1])) throw ConfigError("times must be strictly increasing", path);
  }
  if (!(c.scattering.horizon >= 0.0) || !std::isfinite(c.scattering.horizon))
    throw ConfigError("horizon must be >= 0", "scattering.horizon");
  if (!(c.scattering.tolerance > 0.0)) throw ConfigError("tolerance must be positive", "scattering.tolerance");

  if (c.output.directory.empty()) throw ConfigError("directory must not be empty", "output.directory");
  for (std::size_t i = 0; i < c.output.formats.size(); ++i) {
    const auto& f = c.output.formats[i];
    if (f != "csv" && f != "checkpoint")
      throw ConfigError("unknown format '" + f + "'", "output.formats[" + std::to_string(i) + "]");
  }
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  RunConfig c = from_json(root);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  const int d = c.grid.dimension;
  json root;
  root["grid"] = {{"d", c.grid.dimension}, {"n", c.grid.points_per_axis}, {"L", c.grid.side_length}};
  root["system"] = {{"N", c.system.components},
                    {"p", c.system.p},
                    {"kappa", c.system.kappa},
                    {"beta", matrix_json(c.system.beta)},
                    {"lambda", matrix_json(c.system.lambda)}};
  root["time"] = {{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"record_every", c.time.record_every}};
  json bumps = json::array();
  for (const auto& b : c.initial.params.bumps)
    bumps.push_back({{"amplitude", b.amplitude},
                     {"sigma", b.sigma},
                     {"center", vec_json(b.center, d)},
                     {"velocity", vec_json(b.velocity, d)}});
  root["initial"] = {{"kind", to_string(c.initial.kind)},
                     {"seed", c.initial.seed},
                     {"params",
                      {{"bumps", bumps},
                       {"amplitude", c.initial.params.amplitude},
                       {"k_width", c.initial.params.k_width},
                       {"window", c.initial.params.window},
                       {"component_scale", c.initial.params.component_scale}}}};
  root["diagnostics"] = {{"q_list", c.diagnostics.q_list},
                         {"weight",
                          {{"kind", to_string(c.diagnostics.weight.kind)},
                           {"epsilon_cells", c.diagnostics.weight.epsilon_cells},
                           {"window", c.diagnostics.weight.window}}},
                         {"interaction", c.diagnostics.interaction},
                         {"tolerance", c.diagnostics.tolerance}};
  root["scattering"] = {{"checkpoint_times", c.scattering.checkpoint_times},
                        {"horizon", c.scattering.horizon},
                        {"tolerance", c.scattering.tolerance}};
  root["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return root.dump(2) + "\n";
}

}  // namespace q4nl
