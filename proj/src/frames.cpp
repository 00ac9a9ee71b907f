#include "pubsim/frames.hpp"

#include <algorithm>
#include <cmath>

#include "pubsim/error.hpp"

namespace pubsim {

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

double angle_difference(double a, double b) { return wrap_angle(a - b); }

RotationMatrix ground_to_body(const AttitudeAngles& att) {
  const double cf = std::cos(att.phi), sf = std::sin(att.phi);
  const double ct = std::cos(att.theta), st = std::sin(att.theta);
  Mat3 roll, pitch;
  roll << 1, 0, 0,
          0, cf, sf,
          0, -sf, cf;
  pitch << ct, 0, -st,
           0, 1, 0,
           st, 0, ct;
  return roll * pitch * yaw_ground_to_body(att.psi);
}

RotationMatrix yaw_ground_to_body(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  Mat3 yaw;
  yaw << c, s, 0,
         -s, c, 0,
         0, 0, 1;
  return yaw;
}

RotationMatrix airflow_to_body(const FlowAngles& flow) {
  const double cb = std::cos(flow.beta), sb = std::sin(flow.beta);
  const double ca = std::cos(flow.alpha), sa = std::sin(flow.alpha);
  Mat3 sideslip, attack;
  sideslip << 1, 0, 0,
              0, cb, -sb,
              0, sb, cb;
  attack << ca, 0, sa,
            0, 1, 0,
            -sa, 0, ca;
  return sideslip * attack;
}

Vec3 body_rates_from_euler_rates(const AttitudeAngles& att, const Vec3& euler_rates) {
  const double cf = std::cos(att.phi), sf = std::sin(att.phi);
  const double ct = std::cos(att.theta), st = std::sin(att.theta);
  const double phi_dot = euler_rates.x(), theta_dot = euler_rates.y(), psi_dot = euler_rates.z();
  return {phi_dot - psi_dot * st,
          theta_dot * cf + psi_dot * ct * sf,
          -theta_dot * sf + psi_dot * ct * cf};
}

Vec3 euler_rates_from_body_rates(const AttitudeAngles& att, const Vec3& body_rates) {
  const double cf = std::cos(att.phi), sf = std::sin(att.phi);
  const double ct = std::cos(att.theta), st = std::sin(att.theta);
  if (std::abs(ct) < 1e-12) {
    throw Error(ErrorCode::GimbalLock, "Euler rates undefined at theta = +-pi/2");
  }
  const double p = body_rates.x(), q = body_rates.y(), r = body_rates.z();
  const double yaw_rate = (q * sf + r * cf) / ct;
  return {p + yaw_rate * st, q * cf - r * sf, yaw_rate};
}

FlowSample flow_angles_from_velocity(const Vec3& v_body) {
  const double speed = v_body.norm();
  if (speed <= kStagnationSpeed) {
    throw Error(ErrorCode::StagnantFlow, "flow angles undefined below the stagnation speed");
  }
  FlowSample out;
  out.airspeed = speed;
  out.angles.alpha = std::atan2(v_body.z(), v_body.x());
  out.angles.beta = std::asin(std::clamp(v_body.y() / speed, -1.0, 1.0));
  constexpr double kLimit = kPi / 2;
  if (std::abs(out.angles.alpha) >= kLimit) {
    out.angles.alpha = std::copysign(kLimit, out.angles.alpha);
    out.clipped = true;
  }
  if (std::abs(out.angles.beta) >= kLimit) out.clipped = true;
  return out;
}

Vec3 velocity_from_flow(double airspeed, const FlowAngles& flow) {
  const double cb = std::cos(flow.beta);
  return airspeed * Vec3{cb * std::cos(flow.alpha), std::sin(flow.beta), cb * std::sin(flow.alpha)};
}

}  // namespace pubsim
