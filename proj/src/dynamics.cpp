#include "pubsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pubsim/airframe.hpp"
#include "pubsim/error.hpp"

namespace pubsim {

void AirshipParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, std::string("airship params: ") + what);
  };
  require(mass > 0.0, "mass must be positive");
  require(Ix > 0.0 && Iy > 0.0 && Iz > 0.0, "principal inertias must be positive");
  require(Ix * Iz - Ixz * Ixz > 0.0, "inertia tensor must be positive definite");
  require(yaw_damping_C2 >= 0.0, "C2 must be non-negative");
  require(air_density > 0.0, "air density must be positive");
  require(buoyancy >= 0.0, "buoyancy must be non-negative");
  require(cb_offset_d >= 0.0, "buoyancy-centre offset must be non-negative");
}

Eigen::Matrix3d AirshipParams::inertia_tensor() const {
  Eigen::Matrix3d j;
  j << Ix, 0, -Ixz,
       0, Iy, 0,
       -Ixz, 0, Iz;
  return j;
}

AirshipParams AirshipParams::prototype() {
  const EnvelopeGeometry env = prototype_envelope();
  AirshipParams p;
  p.mass = 0.2978;
  // Solid-ellipsoid inertia about the centre.
  const double a2 = env.semi_axis_a * env.semi_axis_a;
  const double b2 = env.semi_axis_b * env.semi_axis_b;
  const double c2 = env.semi_axis_c * env.semi_axis_c;
  p.Ix = p.mass * (b2 + c2) / 5.0;
  p.Iy = p.mass * (a2 + c2) / 5.0;
  p.Iz = p.mass * (a2 + b2) / 5.0;
  p.Ixz = 0.0;
  p.cb_offset_d = 0.15;
  p.buoyancy = p.mass * kStandardGravity;
  p.net_lift = 0.0;
  p.thruster_sx = 0.30;
  p.thruster_sz = 0.30;
  p.link_length = 0.05;
  p.yaw_damping_C2 = 0.01;
  p.drag_coefficient = 0.0071;
  p.lift_slope = 0.05;
  p.moment_slope = 0.02;
  p.reference_chord = 1.97;
  p.air_density = 1.205;
  return p;
}

BodyState::Vector BodyState::to_vector() const {
  Vector x;
  x << u, v, w, p, q, r, x_g, y_g, h, att.phi, att.theta, att.psi;
  return x;
}

BodyState BodyState::from_vector(const Vector& x) {
  BodyState s;
  s.u = x[0];
  s.v = x[1];
  s.w = x[2];
  s.p = x[3];
  s.q = x[4];
  s.r = x[5];
  s.x_g = x[6];
  s.y_g = x[7];
  s.h = x[8];
  s.att = AttitudeAngles{x[9], x[10], x[11]};
  return s;
}

Wrench aero_wrench(const AirshipParams& params, const Vec3& v_body) {
  if (v_body.norm() <= kStagnationSpeed) return Wrench::zero(Frame::Body);
  const FlowSample flow = flow_angles_from_velocity(v_body);
  const double qbar = 0.5 * params.air_density * flow.airspeed * flow.airspeed;
  const double alpha = flow.angles.alpha;
  const double drag = qbar * params.drag_coefficient;
  const double lift = qbar * params.lift_slope * alpha;
  const double pitching = qbar * params.reference_chord * params.moment_slope * alpha;

  const Wrench in_airflow{Vec3{-drag, 0.0, -lift}, Vec3{0.0, pitching, 0.0}, Frame::Airflow};
  const RotationMatrix l_ba = airflow_to_body(flow.angles);
  return Wrench{l_ba * in_airflow.force, l_ba * in_airflow.moment, Frame::Body};
}

Wrench thruster_wrench(const AirshipParams& params, const ThrusterCommand& cmd) {
  const double cy = std::cos(cmd.delta_y), sy = std::sin(cmd.delta_y);
  const double cp = std::cos(cmd.delta_p), sp = std::sin(cmd.delta_p);
  const Vec3 force{cmd.thrust * cy * cp, cmd.thrust * sy * cp, -cmd.thrust * sp};
  const Vec3 mount{params.thruster_sx, 0.0, params.thruster_sz};
  const Vec3 link{params.link_length * cy * sp, params.link_length * sy * sp,
                  params.link_length * cp};
  return Wrench{force, (mount + link).cross(force), Frame::Body};
}

Wrench static_wrench(const AirshipParams& params, const AttitudeAngles& att) {
  const RotationMatrix l_bg = ground_to_body(att);
  const Wrench buoy = buoyancy_wrench(BuoyancyConfig{params.buoyancy, params.cb_offset_d}, att);
  return Wrench{l_bg * Vec3{0.0, 0.0, -params.net_lift}, buoy.moment, Frame::Body};
}

BodyState full_derivatives(const AirshipParams& params, const BodyState& state,
                           const ThrusterCommand& cmd) {
  const Vec3 vel = state.velocity();
  const Vec3 omega = state.rates();
  const double u = state.u, v = state.v, w = state.w;
  const double p = state.p, q = state.q, r = state.r;

  const Wrench loads = aero_wrench(params, vel) + thruster_wrench(params, cmd) +
                       static_wrench(params, state.att) +
                       Wrench{Vec3::Zero(), Vec3{0.0, 0.0, -params.yaw_damping_C2 * r},
                              Frame::Body};

  const Vec3 accel = Vec3{v * r - w * q, -u * r + w * p, u * q - v * p} + loads.force / params.mass;

  // Left side of the rotational equation, split into J * omega_dot + gyro.
  const double Ix = params.Ix, Iy = params.Iy, Iz = params.Iz, Ixz = params.Ixz;
  const Vec3 gyro{q * r * (Iz - Iy) - p * q * Ixz,
                  p * r * (Ix - Iz) + (p * p - r * r) * Ixz,
                  p * q * (Iy - Ix) + q * r * Ixz};
  const Vec3 rhs = loads.moment - gyro;
  const double det_xz = Ix * Iz - Ixz * Ixz;
  if (!(Iy > 0.0) || !(std::abs(det_xz) > 1e-14 * std::abs(Ix * Iz)) || !std::isfinite(det_xz)) {
    throw Error(ErrorCode::SingularInertia, "inertia system is not invertible");
  }
  const Vec3 omega_dot{(Iz * rhs.x() + Ixz * rhs.z()) / det_xz, rhs.y() / Iy,
                       (Ixz * rhs.x() + Ix * rhs.z()) / det_xz};

  const Vec3 euler_dot = euler_rates_from_body_rates(state.att, omega);
  const Vec3 ground_vel = ground_to_body(state.att).transpose() * vel;

  BodyState d;
  d.u = accel.x();
  d.v = accel.y();
  d.w = accel.z();
  d.p = omega_dot.x();
  d.q = omega_dot.y();
  d.r = omega_dot.z();
  d.x_g = ground_vel.x();
  d.y_g = ground_vel.y();
  d.h = -ground_vel.z();
  d.att = AttitudeAngles{euler_dot.x(), euler_dot.y(), euler_dot.z()};
  return d;
}

BodyState planar_derivatives(const AirshipParams& params, const BodyState& state,
                             const ThrusterCommand& cmd) {
  const double off = std::max({std::abs(state.att.phi), std::abs(state.att.theta),
                               std::abs(state.p), std::abs(state.q)});
  if (off > kPlanarTolerance) {
    throw Error(ErrorCode::ConstraintViolation,
                "planar model needs phi = theta = p = q = 0");
  }
  const double u = state.u, v = state.v, w = state.w, r = state.r;
  const double psi = state.att.psi;

  // Aerodynamic force and the yaw moment M sin(beta).
  Vec3 aero_force = Vec3::Zero();
  double aero_yaw = 0.0;
  const Vec3 vel{u, v, w};
  if (vel.norm() > kStagnationSpeed) {
    const FlowSample flow = flow_angles_from_velocity(vel);
    const double qbar = 0.5 * params.air_density * flow.airspeed * flow.airspeed;
    const double alpha = flow.angles.alpha;
    const double drag = qbar * params.drag_coefficient;
    const double lift = qbar * params.lift_slope * alpha;
    const double pitching = qbar * params.reference_chord * params.moment_slope * alpha;
    aero_force = airflow_to_body(flow.angles) * Vec3{-drag, 0.0, -lift};
    aero_yaw = pitching * std::sin(flow.angles.beta);
  }

  const double cy = std::cos(cmd.delta_y), sy = std::sin(cmd.delta_y);
  const double cp = std::cos(cmd.delta_p), sp = std::sin(cmd.delta_p);
  const Vec3 thrust{cmd.thrust * cy * cp, cmd.thrust * sy * cp, -cmd.thrust * sp};
  const Vec3 force = aero_force + thrust + Vec3{0.0, 0.0, -params.net_lift};

  BodyState d;
  d.u = v * r + force.x() / params.mass;
  d.v = -u * r + force.y() / params.mass;
  d.w = force.z() / params.mass;
  d.r = (aero_yaw + params.thruster_sx * cmd.thrust * sy * cp - params.yaw_damping_C2 * r) /
        params.Iz;
  d.x_g = u * std::cos(psi) - v * std::sin(psi);
  d.y_g = u * std::sin(psi) + v * std::cos(psi);
  d.h = -w;
  d.att.psi = r;
  return d;
}

}  // namespace pubsim
