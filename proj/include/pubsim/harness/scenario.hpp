#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pubsim/dynamics.hpp"
#include "pubsim/harness/servo.hpp"
#include "pubsim/inner_loop.hpp"
#include "pubsim/smc.hpp"
#include "pubsim/thruster.hpp"

namespace pubsim {

inline constexpr const char* kScenarioFormat = "pubsim-scenario/1";

enum class PlantModel { Full, Planar, Lateral, Linear };
enum class ControllerKind { OpenLoop, InnerLoop, Smc };

/// One open-loop command row, held until the next row.
struct OpenLoopRow {
  double t = 0.0;
  double input = 0.0;  // thrust (N) or throttle fraction, see OpenLoopConfig
  double yaw_servo_deg = 90.0;
  double pitch_servo_deg = 90.0;
};

struct OpenLoopConfig {
  bool throttle_input = false;  // input column is a throttle fraction
  std::optional<ThrustMap> throttle_map;
  std::vector<OpenLoopRow> script;  // sorted by t, non-empty
};

struct InnerLoopConfig {
  TrimPoint trim;
  GainSet gains;
  double speed_step = 0.0;   // dT1 applied from step_time on
  double step_time = 0.0;
  // Replaces the linear plant's u channel with du_dot = -pole du + numerator dT.
  std::optional<FirstOrderLoop> speed_loop;
};

/// Sampled reference pose (t, x_e, y_e, psi_e); linear interpolation.
struct ReferenceTrajectory {
  std::vector<double> t, x, y, psi;

  static ReferenceTrajectory load(const std::filesystem::path& path);
  static ReferenceTrajectory parse(const std::string& text);
  static ReferenceTrajectory constant(double x, double y, double psi);

  /// Pose and pose rate (slope of the active segment) at time t.
  void sample(double t, Vec3& pose, Vec3& rate) const;
};

struct SmcConfig {
  SmcModelParams model_params;
  bool mass_matrix_literal = false;
  SmcGains gains;
  ReferenceTrajectory reference;
  bool vectored_actuation = false;
  GimbalLimits limits;
};

struct Scenario {
  std::filesystem::path source;
  PlantModel model = PlantModel::Planar;
  ControllerKind controller = ControllerKind::OpenLoop;
  AirshipParams airship = AirshipParams::prototype();
  BodyState initial;
  double duration = 0.0;
  double dt = 1e-3;
  std::size_t record_every = 1;
  std::uint64_t seed = 0;

  double max_thrust = 0.051;                  // N
  std::optional<double> electrode_spacing;    // m, spacing map sets max thrust
  ServoCommandMap servo;
  double yaw_noise_deg = 0.0;                 // gimbal oscillation, off by default

  OpenLoopConfig open_loop;
  InnerLoopConfig inner_loop;
  SmcConfig smc;

  std::optional<std::filesystem::path> output_csv;
  std::optional<std::filesystem::path> output_summary;

  void validate() const;
};

/// Parses a YAML scenario document. Relative file references resolve
/// against `base_dir`.
Scenario parse_scenario(const std::string& yaml_text,
                        const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

/// Reads the `airship:` mapping (all keys optional, prototype defaults).
AirshipParams parse_airship(const std::string& yaml_text);

/// Parameter file for linearize / certify-gains: `airship:` plus `trim:`.
struct ParamsFile {
  AirshipParams airship = AirshipParams::prototype();
  TrimPoint trim;
};
ParamsFile parse_params(const std::string& yaml_text);

/// Either a fixed `gains: {k_1, k_2}` pair or a
/// `grid: {k_1: [min, max, steps], k_2: [min, max, steps]}` search.
struct GainSpec {
  std::optional<std::pair<double, double>> pair;
  std::optional<GainGrid> grid;
};
GainSpec parse_gain_spec(const std::string& yaml_text);

std::string read_text_file(const std::filesystem::path& path);

std::string to_string(PlantModel model);
std::string to_string(ControllerKind controller);

}  // namespace pubsim
