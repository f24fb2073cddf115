#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "foldsim/controller.hpp"
#include "foldsim/simulator.hpp"

namespace foldsim {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complete description of one folding run. Defaults reproduce the nominal
/// task: 5 N contact force, 15 mm/s slide, 0.05 rad/s fold, 100 Hz control
/// over a 1 kHz plant.
struct ScenarioConfig {
  struct Geometry {
    double rod_length = 0.15;              // m
    double initial_contact_offset = 0.12;  // m along tangent from anchor
    double initial_theta = -1.0471975511965976;  // rad, rod inclination at start
    Vec3 surface_anchor{0.0, 0.0, 0.0};
    Vec3 surface_normal{0.0, 0.0, 1.0};
    Vec3 surface_tangent{1.0, 0.0, 0.0};
    double wall_offset = 0.35;   // m
    double surface_extent = 0.40;  // m
  } geometry;

  struct Gains {
    double k_f = 0.01;          // (m/s)/N
    double f_d = 5.0;           // N
    double v_d_mag = 0.015;     // m/s
    double omega_d_mag = 0.05;  // rad/s
    double theta_target = 0.0;  // rad
    double theta_tol = 0.02;    // rad
  } gains;

  ContactParams contact{};

  struct Sensor {
    double sigma_f = 0.05;    // N
    double sigma_tau = 0.02;  // N*m
    std::uint64_t seed = 12345;
    int filter_window = 5;
  } sensor;

  struct Estimator {
    double f_min = 0.5;        // N
    double normal_tilt = 0.0;  // rad; rotates the believed frame toward +tangent
  } estimator;

  struct Controller {
    std::string wall_rule = "geometric";  // geometric | force
    double wall_margin = 0.005;           // m
    double wall_force_threshold = 2.0;    // N
    int wall_force_ticks = 10;
    int hold_limit = 50;
    int rot_axis_sign = 1;  // +1: tangent x normal, -1: the reverse
  } controller;

  struct Actuator {
    double tau = 0.0;  // first-order velocity-loop lag of hand 1, s (0 = ideal tracking)
  } actuator;

  struct Rates {
    int physics_hz = 1000;
    int control_hz = 100;
  } rates;

  struct Run {
    double duration = 30.0;  // s
  } run;

  /// Throws config_error naming the offending key when a value is out of range.
  void validate() const;
};

namespace detail {

struct ConfigField {
  std::string key;
  std::function<void(ScenarioConfig&, const std::string& value, int line)> parse;
  std::function<std::string(const ScenarioConfig&)> write;
};

// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double parse_double_value(const std::string& text, const std::string& key, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw config_error("line " + std::to_string(line) + ": key '" + key +
                       "' expects a number, got '" + text + "'");
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) {
    throw config_error("line " + std::to_string(line) + ": trailing characters after number in key '" + key + "'");
  }
  return v;
}

inline std::vector<ConfigField> config_fields() {
  std::vector<ConfigField> fields;

  auto add_double = [&fields](const char* key, std::function<double&(ScenarioConfig&)> ref) {
    fields.push_back(ConfigField{
        key,
        [key, ref](ScenarioConfig& c, const std::string& v, int line) {
          ref(c) = parse_double_value(v, key, line);
        },
        [ref](const ScenarioConfig& c) {
          return format_double(ref(const_cast<ScenarioConfig&>(c)));
        }});
  };
  auto add_int = [&fields](const char* key, std::function<int&(ScenarioConfig&)> ref) {
    fields.push_back(ConfigField{
        key,
        [key, ref](ScenarioConfig& c, const std::string& v, int line) {
          const double d = parse_double_value(v, key, line);
          const int i = static_cast<int>(d);
          if (static_cast<double>(i) != d) {
            throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                               "' expects an integer");
          }
          ref(c) = i;
        },
        [ref](const ScenarioConfig& c) {
          return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
        }});
  };
  auto add_u64 = [&fields](const char* key, std::function<std::uint64_t&(ScenarioConfig&)> ref) {
    fields.push_back(ConfigField{
        key,
        [key, ref](ScenarioConfig& c, const std::string& v, int line) {
          try {
            std::size_t pos = 0;
            const std::uint64_t u = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            ref(c) = u;
          } catch (const std::exception&) {
            throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                               "' expects a non-negative integer");
          }
        },
        [ref](const ScenarioConfig& c) {
          return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
        }});
  };
  auto add_vec3 = [&fields](const char* key, std::function<Vec3&(ScenarioConfig&)> ref) {
    fields.push_back(ConfigField{
        key,
        [key, ref](ScenarioConfig& c, const std::string& v, int line) {
          std::istringstream ss(v);
          double x, y, z;
          if (!(ss >> x >> y >> z)) {
            throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                               "' expects three numbers");
          }
          std::string rest;
          if (ss >> rest) {
            throw config_error("line " + std::to_string(line) + ": key '" + std::string(key) +
                               "' expects exactly three numbers");
          }
          ref(c) = Vec3(x, y, z);
        },
        [ref](const ScenarioConfig& c) {
          const Vec3& v = ref(const_cast<ScenarioConfig&>(c));
          return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
        }});
  };
  auto add_string = [&fields](const char* key, std::function<std::string&(ScenarioConfig&)> ref) {
    fields.push_back(ConfigField{
        key,
        [ref](ScenarioConfig& c, const std::string& v, int) { ref(c) = v; },
        [ref](const ScenarioConfig& c) { return ref(const_cast<ScenarioConfig&>(c)); }});
  };

  add_double("geometry.rod_length", [](ScenarioConfig& c) -> double& { return c.geometry.rod_length; });
  add_double("geometry.initial_contact_offset", [](ScenarioConfig& c) -> double& { return c.geometry.initial_contact_offset; });
  add_double("geometry.initial_theta", [](ScenarioConfig& c) -> double& { return c.geometry.initial_theta; });
  add_vec3("geometry.surface_anchor", [](ScenarioConfig& c) -> Vec3& { return c.geometry.surface_anchor; });
  add_vec3("geometry.surface_normal", [](ScenarioConfig& c) -> Vec3& { return c.geometry.surface_normal; });
  add_vec3("geometry.surface_tangent", [](ScenarioConfig& c) -> Vec3& { return c.geometry.surface_tangent; });
  add_double("geometry.wall_offset", [](ScenarioConfig& c) -> double& { return c.geometry.wall_offset; });
  add_double("geometry.surface_extent", [](ScenarioConfig& c) -> double& { return c.geometry.surface_extent; });

  add_double("gains.k_f", [](ScenarioConfig& c) -> double& { return c.gains.k_f; });
  add_double("gains.f_d", [](ScenarioConfig& c) -> double& { return c.gains.f_d; });
  add_double("gains.v_d_mag", [](ScenarioConfig& c) -> double& { return c.gains.v_d_mag; });
  add_double("gains.omega_d_mag", [](ScenarioConfig& c) -> double& { return c.gains.omega_d_mag; });
  add_double("gains.theta_target", [](ScenarioConfig& c) -> double& { return c.gains.theta_target; });
  add_double("gains.theta_tol", [](ScenarioConfig& c) -> double& { return c.gains.theta_tol; });

  add_double("contact.k_n", [](ScenarioConfig& c) -> double& { return c.contact.k_n; });
  add_double("contact.c_n", [](ScenarioConfig& c) -> double& { return c.contact.c_n; });
  add_double("contact.mu", [](ScenarioConfig& c) -> double& { return c.contact.mu; });
  add_double("contact.stick_velocity", [](ScenarioConfig& c) -> double& { return c.contact.stick_velocity; });
  add_double("contact.eps_sep", [](ScenarioConfig& c) -> double& { return c.contact.eps_sep; });
  add_double("contact.max_penetration", [](ScenarioConfig& c) -> double& { return c.contact.max_penetration; });

  add_double("sensor.sigma_f", [](ScenarioConfig& c) -> double& { return c.sensor.sigma_f; });
  add_double("sensor.sigma_tau", [](ScenarioConfig& c) -> double& { return c.sensor.sigma_tau; });
  add_u64("sensor.seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.sensor.seed; });
  add_int("sensor.filter_window", [](ScenarioConfig& c) -> int& { return c.sensor.filter_window; });

  add_double("estimator.f_min", [](ScenarioConfig& c) -> double& { return c.estimator.f_min; });
  add_double("estimator.normal_tilt", [](ScenarioConfig& c) -> double& { return c.estimator.normal_tilt; });

  add_string("controller.wall_rule", [](ScenarioConfig& c) -> std::string& { return c.controller.wall_rule; });
  add_double("controller.wall_margin", [](ScenarioConfig& c) -> double& { return c.controller.wall_margin; });
  add_double("controller.wall_force_threshold", [](ScenarioConfig& c) -> double& { return c.controller.wall_force_threshold; });
  add_int("controller.wall_force_ticks", [](ScenarioConfig& c) -> int& { return c.controller.wall_force_ticks; });
  add_int("controller.hold_limit", [](ScenarioConfig& c) -> int& { return c.controller.hold_limit; });
  add_int("controller.rot_axis_sign", [](ScenarioConfig& c) -> int& { return c.controller.rot_axis_sign; });

  add_double("actuator.tau", [](ScenarioConfig& c) -> double& { return c.actuator.tau; });

  add_int("rates.physics_hz", [](ScenarioConfig& c) -> int& { return c.rates.physics_hz; });
  add_int("rates.control_hz", [](ScenarioConfig& c) -> int& { return c.rates.control_hz; });

  add_double("run.duration", [](ScenarioConfig& c) -> double& { return c.run.duration; });

  return fields;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

inline void ScenarioConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw config_error("invalid config: " + key + " " + why);
  };
  auto positive = [&fail](const std::string& key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be > 0");
  };
  auto non_negative = [&fail](const std::string& key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(key, "must be >= 0");
  };

  positive("geometry.rod_length", geometry.rod_length);
  positive("geometry.initial_contact_offset", geometry.initial_contact_offset);
  if (!(std::abs(geometry.initial_theta) < 1.5)) {
    fail("geometry.initial_theta", "must lie in (-1.5, 1.5) rad");
  }
  if (std::abs(geometry.surface_normal.norm() - 1.0) > k_unit_tol) {
    fail("geometry.surface_normal", "must be a unit vector");
  }
  if (std::abs(geometry.surface_tangent.norm() - 1.0) > k_unit_tol) {
    fail("geometry.surface_tangent", "must be a unit vector");
  }
  if (std::abs(geometry.surface_normal.dot(geometry.surface_tangent)) > k_unit_tol) {
    fail("geometry.surface_tangent", "must be orthogonal to the surface normal");
  }
  positive("geometry.wall_offset", geometry.wall_offset);
  if (geometry.initial_contact_offset >= geometry.wall_offset) {
    fail("geometry.initial_contact_offset", "must be smaller than geometry.wall_offset");
  }
  positive("geometry.surface_extent", geometry.surface_extent);

  non_negative("gains.k_f", gains.k_f);
  positive("gains.f_d", gains.f_d);
  non_negative("gains.v_d_mag", gains.v_d_mag);
  non_negative("gains.omega_d_mag", gains.omega_d_mag);
  positive("gains.theta_tol", gains.theta_tol);

  positive("contact.k_n", contact.k_n);
  non_negative("contact.c_n", contact.c_n);
  non_negative("contact.mu", contact.mu);
  positive("contact.stick_velocity", contact.stick_velocity);
  positive("contact.eps_sep", contact.eps_sep);
  positive("contact.max_penetration", contact.max_penetration);

  non_negative("sensor.sigma_f", sensor.sigma_f);
  non_negative("sensor.sigma_tau", sensor.sigma_tau);
  if (sensor.filter_window < 1) fail("sensor.filter_window", "must be >= 1");

  non_negative("estimator.f_min", estimator.f_min);
  if (!(std::abs(estimator.normal_tilt) < 1.0)) {
    fail("estimator.normal_tilt", "must lie in (-1, 1) rad");
  }

  if (controller.wall_rule != "geometric" && controller.wall_rule != "force") {
    fail("controller.wall_rule", "must be 'geometric' or 'force'");
  }
  positive("controller.wall_margin", controller.wall_margin);
  positive("controller.wall_force_threshold", controller.wall_force_threshold);
  if (controller.wall_force_ticks < 1) fail("controller.wall_force_ticks", "must be >= 1");
  if (controller.hold_limit < 1) fail("controller.hold_limit", "must be >= 1");
  if (controller.rot_axis_sign != 1 && controller.rot_axis_sign != -1) {
    fail("controller.rot_axis_sign", "must be +1 or -1");
  }

  non_negative("actuator.tau", actuator.tau);

  if (rates.physics_hz < 1) fail("rates.physics_hz", "must be >= 1");
  if (rates.control_hz < 1) fail("rates.control_hz", "must be >= 1");
  if (rates.physics_hz % rates.control_hz != 0) {
    fail("rates.physics_hz", "must be an integer multiple of rates.control_hz");
  }

  non_negative("run.duration", run.duration);
}

/// Parses the flat dotted-key format. Unknown or duplicate keys are errors;
/// anything not set keeps its default.
inline ScenarioConfig parse_config(std::string_view text) {
  const std::vector<detail::ConfigField> fields = detail::config_fields();
  ScenarioConfig cfg;
  std::vector<bool> seen(fields.size(), false);

  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      throw config_error("line " + std::to_string(line_no) + ": missing key before '='");
    }

    bool matched = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].key == key) {
        if (seen[i]) {
          throw config_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        seen[i] = true;
        fields[i].parse(cfg, value, line_no);
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw config_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  cfg.validate();
  return cfg;
}

/// Canonical serialization: every key, fixed order, 17 significant digits so
/// that load(write(c)) reproduces c exactly.
inline std::string write_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const detail::ConfigField& f : detail::config_fields()) {
    out += f.key;
    out += " = ";
    out += f.write(cfg);
    out += "\n";
  }
  return out;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const config_error& e) {
    throw config_error(path.string() + ": " + e.what());
  }
}

inline void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw config_error("cannot write config file: " + path.string());
  }
  out << write_config(cfg);
}

}  // namespace foldsim
