#include "memcav/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "memcav/constants.hpp"

namespace memcav {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid scenario:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  out = static_cast<int>(v);
  return true;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "yes" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "no" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

bool parse_pair(const std::string& s, int& a, int& b) {
  std::istringstream is(s);
  std::string x, y, rest;
  if (!(is >> x >> y) || (is >> rest)) return false;
  return parse_int(x, a) && parse_int(y, b);
}

// Setter returns false when the value text is malformed.
using Setter = std::function<bool(ScenarioConfig&, const std::string&)>;

Setter real(double ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& v) { return parse_double(v, c.*field); };
}

template <class Owner>
Setter nested_real(Owner ScenarioConfig::*owner, double Owner::*field) {
  return [owner, field](ScenarioConfig& c, const std::string& v) {
    return parse_double(v, (c.*owner).*field);
  };
}

Setter optional_real(std::optional<double> ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& v) {
    double x = 0.0;
    if (!parse_double(v, x)) return false;
    c.*field = x;
    return true;
  };
}

const std::map<std::string, std::map<std::string, Setter>>& grammar() {
  static const std::map<std::string, std::map<std::string, Setter>> g = {
      {"scenario",
       {{"name", [](ScenarioConfig& c, const std::string& v) {
           c.name = v;
           return true;
         }}}},
      {"cavity",
       {{"length", nested_real(&ScenarioConfig::cavity, &CavityGeometry::length)},
        {"curvature", nested_real(&ScenarioConfig::cavity, &CavityGeometry::curvature)},
        {"finesse", nested_real(&ScenarioConfig::cavity, &CavityGeometry::finesse)},
        {"wavelength", nested_real(&ScenarioConfig::cavity, &CavityGeometry::wavelength)},
        {"planar",
         [](ScenarioConfig& c, const std::string& v) { return parse_bool(v, c.cavity.planar); }},
        {"exact_resonance",
         [](ScenarioConfig& c, const std::string& v) { return parse_bool(v, c.exact_resonance); }},
        {"transverse_mode", [](ScenarioConfig& c, const std::string& v) {
           return parse_pair(v, c.transverse_m, c.transverse_n);
         }}}},
      {"membrane",
       {{"n_real", nested_real(&ScenarioConfig::membrane, &MembraneSlab::n_real)},
        {"n_imag", nested_real(&ScenarioConfig::membrane, &MembraneSlab::n_imag)},
        {"thickness", nested_real(&ScenarioConfig::membrane, &MembraneSlab::thickness)},
        {"side", nested_real(&ScenarioConfig::membrane, &MembraneSlab::side)},
        {"surface_density",
         nested_real(&ScenarioConfig::membrane, &MembraneSlab::surface_density)},
        {"position", [](ScenarioConfig& c, const std::string& v) {
           if (v == "max_coupling") {
             c.position_at_max_coupling = true;
             c.membrane.position = 0.0;
             return true;
           }
           c.position_at_max_coupling = false;
           return parse_double(v, c.membrane.position);
         }}}},
      {"mechanics",
       {{"mode",
         [](ScenarioConfig& c, const std::string& v) { return parse_pair(v, c.mode_j, c.mode_k); }},
        {"frequency_hz", optional_real(&ScenarioConfig::frequency_hz)},
        {"tension", optional_real(&ScenarioConfig::tension)},
        {"mass", optional_real(&ScenarioConfig::mass)},
        {"quality", real(&ScenarioConfig::quality)}}},
      {"drive",
       {{"power", real(&ScenarioConfig::power)},
        {"detuning_over_omega_m",
         [](ScenarioConfig& c, const std::string& v) {
           c.detuning_mode = DetuningMode::target_detuning;
           return parse_double(v, c.detuning_over_omega_m);
         }},
        {"laser_offset", [](ScenarioConfig& c, const std::string& v) {
           c.detuning_mode = DetuningMode::fixed_laser_frequency;
           return parse_double(v, c.laser_offset);
         }}}},
      {"environment", {{"temperature", real(&ScenarioConfig::temperature)}}},
      {"sweep",
       {{"axis",
         [](ScenarioConfig& c, const std::string& v) {
           try {
             c.sweep.axis = parse_axis(v);
           } catch (const std::invalid_argument&) {
             return false;
           }
           return true;
         }},
        {"start", [](ScenarioConfig& c,
                     const std::string& v) { return parse_double(v, c.sweep.start); }},
        {"stop",
         [](ScenarioConfig& c, const std::string& v) { return parse_double(v, c.sweep.stop); }},
        {"points",
         [](ScenarioConfig& c, const std::string& v) { return parse_int(v, c.sweep.points); }},
        {"scale", [](ScenarioConfig& c, const std::string& v) {
           if (v == "linear") c.sweep.logarithmic = false;
           else if (v == "log") c.sweep.logarithmic = true;
           else return false;
           return true;
         }}}},
      {"output", {{"format", [](ScenarioConfig& c, const std::string& v) {
                     if (v == "csv") c.format = OutputFormat::csv;
                     else if (v == "json") c.format = OutputFormat::json;
                     else return false;
                     return true;
                   }}}},
  };
  return g;
}

template <class F>
void collect(std::vector<std::string>& problems, const std::string& where, F&& check) {
  try {
    check();
  } catch (const std::exception& e) {
    problems.push_back(where + ": " + e.what());
  }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::detuning: return "detuning";
    case SweepAxis::temperature: return "temperature";
    case SweepAxis::power: return "power";
    case SweepAxis::thickness: return "thickness";
    case SweepAxis::position: return "position";
  }
  return "none";
}

std::string axis_label(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::detuning: return "detuning [Delta/Omega_m]";
    case SweepAxis::temperature: return "temperature [K]";
    case SweepAxis::power: return "power [W]";
    case SweepAxis::thickness: return "thickness [m]";
    case SweepAxis::position: return "position [m]";
    case SweepAxis::none: break;
  }
  return "point";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::none, SweepAxis::detuning, SweepAxis::temperature,
                      SweepAxis::power, SweepAxis::thickness, SweepAxis::position}) {
    if (axis_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  if (axis == SweepAxis::none || points <= 0) return v;
  if (points == 1) return {start};
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    if (logarithmic) {
      v.push_back(start * std::pow(stop / start, t));
    } else {
      v.push_back(start + (stop - start) * t);
    }
  }
  v.back() = stop;
  return v;
}

void ScenarioConfig::validate() const {
  std::vector<std::string> problems;
  collect(problems, "cavity", [&] { cavity.validate(); });
  if (transverse_m < 0 || transverse_n < 0) {
    problems.push_back("cavity.transverse_mode: indices must be non-negative");
  }
  collect(problems, "membrane", [&] { membrane.validate(); });
  if (mode_j < 1 || mode_k < 1) problems.push_back("mechanics.mode: indices must be >= 1");
  if (!frequency_hz && !tension) {
    problems.push_back("mechanics: give frequency_hz, or tension with membrane.surface_density");
  }
  if (frequency_hz && !(*frequency_hz > 0.0)) {
    problems.push_back("mechanics.frequency_hz: must be positive");
  }
  if (tension && !(*tension > 0.0)) problems.push_back("mechanics.tension: must be positive");
  if (mass && !(*mass > 0.0)) problems.push_back("mechanics.mass: must be positive");
  if (!(quality > 1.0)) problems.push_back("mechanics.quality: must exceed 1");
  if (!(power >= 0.0)) problems.push_back("drive.power: must be non-negative");
  if (!(temperature >= 0.0)) problems.push_back("environment.temperature: must be non-negative");
  if (sweep.axis != SweepAxis::none) {
    if (sweep.points < 1) problems.push_back("sweep.points: must be >= 1");
    if (sweep.logarithmic && !(sweep.start > 0.0 && sweep.stop > 0.0)) {
      problems.push_back("sweep.scale: log spacing needs positive start and stop");
    }
  }
  if (!problems.empty()) throw ScenarioError(problems);
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  const auto& g = grammar();
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + ": unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!g.count(section)) problems.push_back(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      problems.push_back(where + ": key '" + key + "' outside any section");
      continue;
    }
    const auto sec = g.find(section);
    if (sec == g.end()) continue;
    const auto setter = sec->second.find(key);
    if (setter == sec->second.end()) {
      problems.push_back(where + ": unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (!seen.insert(section + "." + key).second) {
      problems.push_back(where + ": duplicate key " + section + "." + key);
      continue;
    }
    if (!setter->second(cfg, value)) {
      problems.push_back(where + ": bad value '" + value + "' for " + section + "." + key);
    }
  }
  if (!seen.count("cavity.curvature") && !cfg.cavity.planar && seen.count("cavity.length")) {
    problems.push_back(origin + ": cavity.curvature is required unless cavity.planar = true");
  }
  if (cfg.mass && !seen.count("membrane.surface_density") && cfg.membrane.side > 0.0) {
    cfg.membrane.surface_density = 4.0 * *cfg.mass / (cfg.membrane.side * cfg.membrane.side);
  }
  if (!problems.empty()) throw ScenarioError(problems);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError({path + ": cannot open scenario file"});
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream os;
  if (!c.name.empty()) os << "[scenario]\nname = " << c.name << "\n\n";
  os << "[cavity]\n"
     << "length = " << number(c.cavity.length) << "\n";
  if (c.cavity.planar) {
    os << "planar = true\n";
  }
  os << "curvature = " << number(c.cavity.curvature) << "\n"
     << "finesse = " << number(c.cavity.finesse) << "\n"
     << "wavelength = " << number(c.cavity.wavelength) << "\n"
     << "transverse_mode = " << c.transverse_m << " " << c.transverse_n << "\n"
     << "exact_resonance = " << (c.exact_resonance ? "true" : "false") << "\n\n";
  os << "[membrane]\n"
     << "n_real = " << number(c.membrane.n_real) << "\n"
     << "n_imag = " << number(c.membrane.n_imag) << "\n"
     << "thickness = " << number(c.membrane.thickness) << "\n"
     << "side = " << number(c.membrane.side) << "\n"
     << "surface_density = " << number(c.membrane.surface_density) << "\n"
     << "position = "
     << (c.position_at_max_coupling ? std::string("max_coupling") : number(c.membrane.position))
     << "\n\n";
  os << "[mechanics]\n"
     << "mode = " << c.mode_j << " " << c.mode_k << "\n";
  if (c.frequency_hz) os << "frequency_hz = " << number(*c.frequency_hz) << "\n";
  if (c.tension) os << "tension = " << number(*c.tension) << "\n";
  if (c.mass) os << "mass = " << number(*c.mass) << "\n";
  os << "quality = " << number(c.quality) << "\n\n";
  os << "[drive]\n"
     << "power = " << number(c.power) << "\n";
  if (c.detuning_mode == DetuningMode::target_detuning) {
    os << "detuning_over_omega_m = " << number(c.detuning_over_omega_m) << "\n\n";
  } else {
    os << "laser_offset = " << number(c.laser_offset) << "\n\n";
  }
  os << "[environment]\n"
     << "temperature = " << number(c.temperature) << "\n\n";
  if (c.sweep.axis != SweepAxis::none) {
    os << "[sweep]\n"
       << "axis = " << axis_name(c.sweep.axis) << "\n"
       << "start = " << number(c.sweep.start) << "\n"
       << "stop = " << number(c.sweep.stop) << "\n"
       << "points = " << c.sweep.points << "\n"
       << "scale = " << (c.sweep.logarithmic ? "log" : "linear") << "\n\n";
  }
  os << "[output]\n"
     << "format = " << (c.format == OutputFormat::csv ? "csv" : "json") << "\n";
  return os.str();
}

VibrationalMode build_mechanics(const ScenarioConfig& cfg) {
  VibrationalMode vib;
  vib.index_j = cfg.mode_j;
  vib.index_k = cfg.mode_k;
  vib.quality = cfg.quality;
  vib.effective_mass = cfg.mass ? *cfg.mass : cfg.membrane.effective_mass();
  if (cfg.frequency_hz) {
    vib.frequency = 2.0 * kPi * *cfg.frequency_hz;
  } else {
    const double sound = std::sqrt(*cfg.tension / cfg.membrane.surface_density);
    vib.frequency = vibrational_frequency(cfg.mode_j, cfg.mode_k, cfg.membrane, sound);
  }
  vib.validate();
  return vib;
}

SystemModel build_system(const ScenarioConfig& cfg) {
  SystemModel sys = make_system(cfg.cavity, cfg.membrane, build_mechanics(cfg), cfg.temperature,
                                cfg.transverse_m, cfg.transverse_n, cfg.exact_resonance);
  if (cfg.position_at_max_coupling) sys.membrane.position = max_coupling_position(sys.k0);
  return sys;
}

DriveParams build_drive(const ScenarioConfig& cfg, const SystemModel& sys) {
  if (cfg.detuning_mode == DetuningMode::target_detuning) {
    return DriveParams::target(cfg.power, cfg.detuning_over_omega_m * sys.mechanics.frequency);
  }
  return DriveParams::fixed(cfg.power, cfg.laser_offset);
}

ScenarioConfig with_axis_value(const ScenarioConfig& cfg, SweepAxis axis, double value) {
  ScenarioConfig c = cfg;
  switch (axis) {
    case SweepAxis::detuning:
      c.detuning_mode = DetuningMode::target_detuning;
      c.detuning_over_omega_m = value;
      break;
    case SweepAxis::temperature: c.temperature = value; break;
    case SweepAxis::power: c.power = value; break;
    case SweepAxis::thickness: c.membrane.thickness = value; break;
    case SweepAxis::position:
      c.position_at_max_coupling = false;
      c.membrane.position = value;
      break;
    case SweepAxis::none: break;
  }
  return c;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return serialize_scenario(a) == serialize_scenario(b);
}

}  // namespace memcav
