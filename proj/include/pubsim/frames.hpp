#pragma once

#include "pubsim/types.hpp"

namespace pubsim {

/// Euler attitude (rad). Yaw is kept wrapped to (-pi, pi].
struct AttitudeAngles {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

/// Angle of attack and sideslip (rad).
struct FlowAngles {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Result of extracting flow angles from a body velocity.
struct FlowSample {
  FlowAngles angles;
  double airspeed = 0.0;
  bool clipped = false;  // |alpha| reached pi/2, aero tables are not valid there
};

/// Below this speed (m/s) the flow angles are undefined and aero loads are zero.
inline constexpr double kStagnationSpeed = 1e-6;

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

/// Shortest signed difference a - b, wrapped to (-pi, pi].
double angle_difference(double a, double b);

/// Ground-to-body rotation: roll * pitch * yaw factors, in that product order.
RotationMatrix ground_to_body(const AttitudeAngles& att);

/// Ground-to-body rotation for level attitude (phi = theta = 0).
RotationMatrix yaw_ground_to_body(double psi);

/// Airflow-to-body rotation: beta factor about x times alpha factor about y.
RotationMatrix airflow_to_body(const FlowAngles& flow);

/// (p, q, r) from (phi_dot, theta_dot, psi_dot).
Vec3 body_rates_from_euler_rates(const AttitudeAngles& att, const Vec3& euler_rates);

/// Inverse of body_rates_from_euler_rates. Throws GimbalLock at cos(theta) = 0.
Vec3 euler_rates_from_body_rates(const AttitudeAngles& att, const Vec3& body_rates);

/// alpha = atan2(w, u), beta = asin(v / |v|). Throws StagnantFlow when
/// |v| <= kStagnationSpeed.
FlowSample flow_angles_from_velocity(const Vec3& v_body);

/// Body velocity with the given airspeed and flow angles; inverse of
/// flow_angles_from_velocity inside the valid range.
Vec3 velocity_from_flow(double airspeed, const FlowAngles& flow);

}  // namespace pubsim
