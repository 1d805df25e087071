#include "hfm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <fstream>
#include <functional>
#include <sstream>

namespace hfm {

namespace {

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValueError("expected a number, got '" + std::string(s) + "'");
  }
  if (!std::isfinite(value)) throw ValueError("value must be finite");
  return value;
}

std::vector<double> parse_list(std::string_view text) {
  std::string_view s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ValueError("expected a list like [a, b, c], got '" + std::string(s) + "'");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(parse_number(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

Vec3 parse_vec3(std::string_view text) {
  const auto v = parse_list(text);
  if (v.size() != 3) throw ValueError("expected 3 entries, got " + std::to_string(v.size()));
  return {v[0], v[1], v[2]};
}

Vec3 parse_direction(std::string_view text) {
  const Vec3 v = parse_vec3(text);
  if (v.norm() == 0.0) throw ValueError("direction must be non-zero");
  return v.normalized();
}

JointVector parse_joints(std::string_view text) {
  const auto v = parse_list(text);
  if (v.size() != kJoints) throw ValueError("expected 7 joint values, got " + std::to_string(v.size()));
  return Eigen::Map<const JointVector>(v.data());
}

bool parse_bool(std::string_view text) {
  const auto s = trim(text);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValueError("expected true or false, got '" + std::string(s) + "'");
}

std::string parse_word(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) throw ValueError("expected a non-empty value");
  return std::string(s);
}

template <class Kind>
Kind& surface_as(Scenario& s, const char* kind_name) {
  auto* k = std::get_if<Kind>(&s.surface);
  if (!k) throw ValueError(std::string("only applies to surface.kind = ") + kind_name);
  return *k;
}

using Setter = std::function<void(Scenario&, std::string_view)>;

struct KeySpec {
  std::string key;
  Setter apply;
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> v;
    auto add = [&](std::string key, Setter f) { v.push_back({std::move(key), std::move(f)}); };

    add("name", [](Scenario& s, std::string_view t) { s.name = parse_word(t); });
    add("duration", [](Scenario& s, std::string_view t) { s.duration = parse_number(t); });
    add("rate", [](Scenario& s, std::string_view t) { s.rate = parse_number(t); });

    for (int i = 0; i < kJoints; ++i) {
      const std::string base = "robot.joint" + std::to_string(i + 1);
      add(base + ".axis", [i](Scenario& s, std::string_view t) { s.robot.joints[i].axis = parse_direction(t); });
      add(base + ".offset", [i](Scenario& s, std::string_view t) { s.robot.joints[i].offset = parse_vec3(t); });
    }
    add("robot.q0", [](Scenario& s, std::string_view t) { s.q0 = parse_joints(t); });
    add("robot.q_seed", [](Scenario& s, std::string_view t) { s.q_seed = parse_joints(t); });
    add("robot.start_height", [](Scenario& s, std::string_view t) { s.start_height = parse_number(t); });
    add("robot.start_tilt_deg", [](Scenario& s, std::string_view t) { s.start_tilt_deg = parse_number(t); });
    add("robot.start_tilt_axis", [](Scenario& s, std::string_view t) { s.start_tilt_axis = parse_direction(t); });
    add("tool.offset", [](Scenario& s, std::string_view t) { s.robot.tool.offset = parse_vec3(t); });
    add("tool.approach_axis", [](Scenario& s, std::string_view t) { s.robot.tool.approach_axis = parse_direction(t); });

    // surface.kind is applied before every other surface key.
    add("surface.kind", [](Scenario& s, std::string_view t) {
      const std::string kind = parse_word(t);
      if (kind == "plane") s.surface = Plane{};
      else if (kind == "sine_extrusion") s.surface = SineExtrusion{};
      else if (kind == "dome") s.surface = Dome{};
      else throw ValueError("expected plane, sine_extrusion or dome, got '" + kind + "'");
    });
    add("surface.point", [](Scenario& s, std::string_view t) { surface_as<Plane>(s, "plane").point = parse_vec3(t); });
    add("surface.normal", [](Scenario& s, std::string_view t) { surface_as<Plane>(s, "plane").normal = parse_direction(t); });
    add("surface.amplitude", [](Scenario& s, std::string_view t) {
      surface_as<SineExtrusion>(s, "sine_extrusion").amplitude = parse_number(t);
    });
    add("surface.wavelength", [](Scenario& s, std::string_view t) {
      const double w = parse_number(t);
      if (!(w > 0.0)) throw ValueError("must be > 0");
      surface_as<SineExtrusion>(s, "sine_extrusion").frequency = 2.0 * std::numbers::pi / w;
    });
    add("surface.base_height", [](Scenario& s, std::string_view t) {
      surface_as<SineExtrusion>(s, "sine_extrusion").base_height = parse_number(t);
    });
    add("surface.axis", [](Scenario& s, std::string_view t) {
      surface_as<SineExtrusion>(s, "sine_extrusion").extrusion_axis = parse_direction(t);
    });
    add("surface.center", [](Scenario& s, std::string_view t) { surface_as<Dome>(s, "dome").center = parse_vec3(t); });
    add("surface.radius", [](Scenario& s, std::string_view t) { surface_as<Dome>(s, "dome").radius = parse_number(t); });

    add("path.start", [](Scenario& s, std::string_view t) { s.path.start = parse_vec3(t); });
    add("path.end", [](Scenario& s, std::string_view t) { s.path.end = parse_vec3(t); });
    add("path.duration", [](Scenario& s, std::string_view t) { s.path.duration = parse_number(t); });

    add("contact.stiffness", [](Scenario& s, std::string_view t) { s.contact.stiffness = parse_number(t); });
    add("contact.mu", [](Scenario& s, std::string_view t) { s.contact.mu = parse_number(t); });
    add("contact.slip_regularization", [](Scenario& s, std::string_view t) { s.contact.slip_regularization = parse_number(t); });
    add("contact.noise_std", [](Scenario& s, std::string_view t) { s.contact.noise_std = parse_number(t); });
    add("contact.seed", [](Scenario& s, std::string_view t) {
      const double v = parse_number(t);
      if (v < 0.0 || v != std::floor(v) || v > 9.0e15) throw ValueError("must be a non-negative integer");
      s.seed = static_cast<std::uint64_t>(v);
    });

    add("estimator.enabled", [](Scenario& s, std::string_view t) { s.estimator_enabled = parse_bool(t); });
    add("estimator.window", [](Scenario& s, std::string_view t) {
      const double v = parse_number(t);
      if (v != std::floor(v) || v > 1e6) throw ValueError("must be an integer");
      s.estimator.window = static_cast<int>(v);
    });
    add("estimator.weights", [](Scenario& s, std::string_view t) { s.estimator.weights = parse_list(t); });
    add("estimator.v_epsilon", [](Scenario& s, std::string_view t) { s.estimator.v_epsilon = parse_number(t); });
    add("estimator.mu_initial", [](Scenario& s, std::string_view t) { s.estimator.mu_initial = parse_number(t); });
    add("estimator.f_min", [](Scenario& s, std::string_view t) { s.estimator.f_min = parse_number(t); });
    add("estimator.mu_max", [](Scenario& s, std::string_view t) { s.estimator.mu_max = parse_number(t); });

    add("controller.k_m", [](Scenario& s, std::string_view t) { s.controller.k_m = parse_vec3(t); });
    add("controller.k_f", [](Scenario& s, std::string_view t) { s.controller.k_f = parse_vec3(t); });
    add("controller.k_adm", [](Scenario& s, std::string_view t) { s.controller.k_adm = parse_vec3(t); });
    add("controller.k_ee", [](Scenario& s, std::string_view t) { s.controller.k_ee = parse_vec3(t); });
    add("controller.f_des", [](Scenario& s, std::string_view t) { s.controller.f_des = parse_vec3(t); });
    add("controller.d_h", [](Scenario& s, std::string_view t) { s.controller.d_h = parse_vec3(t); });
    add("controller.d", [](Scenario& s, std::string_view t) { s.controller.d = parse_number(t); });
    add("controller.alpha", [](Scenario& s, std::string_view t) { s.controller.alpha = parse_number(t); });
    add("controller.lambda", [](Scenario& s, std::string_view t) { s.controller.lambda = parse_number(t); });
    add("controller.rho_limit", [](Scenario& s, std::string_view t) { s.controller.rho_limit = parse_number(t); });
    add("controller.approach_depth", [](Scenario& s, std::string_view t) { s.controller.approach_depth = parse_number(t); });
    add("controller.orientation", [](Scenario& s, std::string_view t) { s.controller.orientation = parse_bool(t); });
    add("controller.offset_frame", [](Scenario& s, std::string_view t) {
      const std::string f = parse_word(t);
      if (f == "world") s.controller.offset_frame = OffsetFrame::World;
      else if (f == "normal") s.controller.offset_frame = OffsetFrame::Normal;
      else throw ValueError("expected world or normal, got '" + f + "'");
    });

    add("sim.approach_timeout", [](Scenario& s, std::string_view t) { s.approach_timeout = parse_number(t); });
    add("sim.metrics_transient", [](Scenario& s, std::string_view t) { s.metrics_transient = parse_number(t); });
    return v;
  }();
  return specs;
}

// Runs a module's own validate() and turns its message into a diagnostic.
template <class F>
void collect(std::vector<Diagnostic>& out, const ConfigEntries& config, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    std::string msg = e.what();
    std::string key = msg.substr(0, msg.find(' '));
    const auto it = config.entries.find(key);
    out.push_back({key, it == config.entries.end() ? 0 : it->second.line, msg});
  }
}

}  // namespace

std::string Diagnostic::str(std::string_view source) const {
  std::ostringstream os;
  if (!source.empty()) {
    os << source;
    if (line > 0) os << ':' << line;
    os << ": ";
  } else if (line > 0) {
    os << "line " << line << ": ";
  }
  if (!key.empty()) os << key << ": ";
  os << message;
  return os.str();
}

ScenarioError::ScenarioError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? std::string("invalid scenario") : diagnostics.front().str()),
      diagnostics_(std::move(diagnostics)) {}

Scenario::Scenario() {
  q_seed << 1.28, 2.04, 1.97, -1.86, 2.15, -1.37, 0.02;
  path.start = {0.4, 0.0, 0.0};
  path.end = {0.6, 0.0, 0.0};
  path.duration = duration;
  path.sample_rate = rate;
}

ConfigEntries parse_config(std::string_view text, std::string source) {
  ConfigEntries out;
  out.source = std::move(source);
  std::vector<Diagnostic> errors;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == line.npos) {
      errors.push_back({"", line_no, "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_.") != key.npos) {
      errors.push_back({key, line_no, "malformed key"});
      continue;
    }
    if (value.empty()) {
      errors.push_back({key, line_no, "missing value"});
      continue;
    }
    if (const auto it = out.entries.find(key); it != out.entries.end()) {
      errors.push_back({key, line_no, "duplicate key (first set on line " +
                                          std::to_string(it->second.line) + ")"});
      continue;
    }
    out.entries[key] = {value, line_no};
  }
  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return out;
}

void apply_override(ConfigEntries& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string key(trim(assignment.substr(0, eq == assignment.npos ? 0 : eq)));
  if (eq == assignment.npos || key.empty()) {
    throw ScenarioError({{"", 0, "override '" + std::string(assignment) + "' is not KEY=VALUE"}});
  }
  const std::string value(trim(assignment.substr(eq + 1)));
  if (value.empty()) throw ScenarioError({{key, 0, "override has no value"}});
  config.entries[key] = {value, 0};
}

Scenario build_scenario(const ConfigEntries& config) {
  Scenario s;
  std::vector<Diagnostic> errors;

  for (const auto& [key, entry] : config.entries) {
    const bool known = std::any_of(schema().begin(), schema().end(),
                                   [&](const KeySpec& k) { return k.key == key; });
    if (!known) errors.push_back({key, entry.line, "unknown key"});
  }
  for (const auto& spec : schema()) {
    const auto it = config.entries.find(spec.key);
    if (it == config.entries.end()) continue;
    try {
      spec.apply(s, it->second.value);
    } catch (const ValueError& e) {
      errors.push_back({spec.key, it->second.line, e.what()});
    }
  }

  if (!config.entries.contains("path.duration")) s.path.duration = s.duration;
  s.path.sample_rate = s.rate;
  s.controller.rate = s.rate;

  auto line_of = [&](const std::string& key) {
    const auto it = config.entries.find(key);
    return it == config.entries.end() ? 0 : it->second.line;
  };
  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) errors.push_back({key, line_of(key), msg});
  };
  check(s.rate >= 100.0, "rate", "must be >= 100 Hz");
  check(s.duration >= 0.0, "duration", "must be >= 0");
  check(s.path.duration >= 0.0, "path.duration", "must be >= 0");
  check(s.start_height >= 0.0, "robot.start_height", "must be >= 0");
  check(s.approach_timeout > 0.0, "sim.approach_timeout", "must be > 0");
  check(s.metrics_transient >= 0.0, "sim.metrics_transient", "must be >= 0");
  check(s.controller.d >= 0.0, "controller.d", "must be >= 0");
  if (!s.estimator.weights.empty() && static_cast<int>(s.estimator.weights.size()) != s.estimator.window) {
    errors.push_back({"estimator.weights", line_of("estimator.weights"),
                      "has " + std::to_string(s.estimator.weights.size()) +
                          " entries but estimator.window = " + std::to_string(s.estimator.window) +
                          "; the weights list must have exactly window entries"});
  } else {
    collect(errors, config, [&] { s.estimator.validate(); });
  }
  collect(errors, config, [&] { s.contact.validate(); });
  collect(errors, config, [&] { s.controller.validate(); });
  collect(errors, config, [&] { validate_surface(s.surface); });
  collect(errors, config, [&] { s.robot.validate(); });
  if (errors.empty()) {
    try {
      project_onto_surface(s.surface, s.path.start);
      project_onto_surface(s.surface, s.path.end);
    } catch (const PathOffSurface& e) {
      errors.push_back({"path.start", line_of("path.start"), e.what()});
    }
  }

  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({{"", 0, "cannot open scenario file '" + path.string() + "'"}});
  std::ostringstream text;
  text << in.rdbuf();
  ConfigEntries config = parse_config(text.str(), path.string());
  for (const auto& o : overrides) apply_override(config, o);
  if (!config.entries.contains("name")) config.entries["name"] = {path.stem().string(), 0};
  return build_scenario(config);
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : schema()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

}  // namespace hfm
