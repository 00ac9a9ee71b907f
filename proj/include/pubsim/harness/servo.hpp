#pragma once

#include "pubsim/dynamics.hpp"

namespace pubsim {

/// Hobby-servo mapping: deflection 0 sits at the 90-degree centre.
struct ServoCommandMap {
  double center_deg = 90.0;
  double min_deg = 0.0;
  double max_deg = 180.0;
  double slew_deg_per_s = 0.0;  // 0 disables the slew limit
};

struct ServoPositions {
  double yaw_deg = 90.0;
  double pitch_deg = 90.0;
  bool saturated = false;
  bool slew_limited = false;
};

/// Servo angles for a thruster command. With `previous` and dt > 0 the slew
/// limit is applied against the previous positions.
ServoPositions servo_map(const ThrusterCommand& cmd, const ServoCommandMap& map,
                         const ServoPositions* previous = nullptr, double dt = 0.0);

/// Gimbal deflection (rad) realized by a servo angle.
double servo_to_deflection(double servo_deg, const ServoCommandMap& map);

}  // namespace pubsim
