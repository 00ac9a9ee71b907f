#include "pubsim/harness/servo.hpp"

#include <algorithm>
#include <cmath>

#include "pubsim/error.hpp"

namespace pubsim {

namespace {

double drive(double target, const ServoCommandMap& map, const double* previous, double dt,
             bool& saturated, bool& slew_limited) {
  double deg = std::clamp(target, map.min_deg, map.max_deg);
  if (deg != target) saturated = true;
  if (previous && dt > 0.0 && map.slew_deg_per_s > 0.0) {
    const double step = map.slew_deg_per_s * dt;
    const double limited = std::clamp(deg, *previous - step, *previous + step);
    if (limited != deg) slew_limited = true;
    deg = limited;
  }
  return deg;
}

}  // namespace

ServoPositions servo_map(const ThrusterCommand& cmd, const ServoCommandMap& map,
                         const ServoPositions* previous, double dt) {
  if (!(map.min_deg <= map.center_deg && map.center_deg <= map.max_deg) || map.min_deg < 0.0 ||
      map.max_deg > 180.0) {
    throw Error(ErrorCode::InvalidArgument, "servo range must lie within [0, 180] deg around the centre");
  }
  if (!std::isfinite(cmd.delta_y) || !std::isfinite(cmd.delta_p)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite gimbal command");
  }
  ServoPositions out;
  out.yaw_deg = drive(map.center_deg + rad_to_deg(cmd.delta_y), map,
                      previous ? &previous->yaw_deg : nullptr, dt, out.saturated,
                      out.slew_limited);
  out.pitch_deg = drive(map.center_deg + rad_to_deg(cmd.delta_p), map,
                        previous ? &previous->pitch_deg : nullptr, dt, out.saturated,
                        out.slew_limited);
  return out;
}

double servo_to_deflection(double servo_deg, const ServoCommandMap& map) {
  return deg_to_rad(servo_deg - map.center_deg);
}

}  // namespace pubsim
