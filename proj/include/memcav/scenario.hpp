#pragma once

// Declarative scenario files: sectioned key = value text, see
// docs/scenario_format.md for the grammar.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "memcav/operating_point.hpp"

namespace memcav {

/// Raised for malformed files or invalid values; carries every problem found.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class SweepAxis { none, detuning, temperature, power, thickness, position };

std::string axis_name(SweepAxis axis);
/// Column label including the unit, e.g. "temperature [K]".
std::string axis_label(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::none;
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool logarithmic = false;

  std::vector<double> values() const;
};

enum class OutputFormat { csv, json };

struct ScenarioConfig {
  std::string name;

  CavityGeometry cavity;
  int transverse_m = 0;
  int transverse_n = 0;
  bool exact_resonance = false;  // drive the bare mode instead of 2 pi / lambda

  MembraneSlab membrane;
  bool position_at_max_coupling = true;

  int mode_j = 1;
  int mode_k = 1;
  std::optional<double> frequency_hz;
  std::optional<double> tension;  // [N/m]
  std::optional<double> mass;     // pinned effective mass [kg]
  double quality = 0.0;

  double power = 0.0;
  DetuningMode detuning_mode = DetuningMode::target_detuning;
  double detuning_over_omega_m = 1.0;
  double laser_offset = 0.0;

  double temperature = 0.0;

  SweepSpec sweep;
  OutputFormat format = OutputFormat::csv;

  /// Throws ScenarioError listing every violated invariant.
  void validate() const;
};

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_scenario(const std::string& path);

/// Text that parses back to an identical config.
std::string serialize_scenario(const ScenarioConfig& cfg);

VibrationalMode build_mechanics(const ScenarioConfig& cfg);
/// Cavity, slab, mechanics and driven mode, with z0 resolved.
SystemModel build_system(const ScenarioConfig& cfg);
DriveParams build_drive(const ScenarioConfig& cfg, const SystemModel& sys);

/// Copy of cfg with the sweep axis quantity set to value.
ScenarioConfig with_axis_value(const ScenarioConfig& cfg, SweepAxis axis, double value);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace memcav
