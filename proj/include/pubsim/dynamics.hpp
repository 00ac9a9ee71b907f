#pragma once

#include <Eigen/Dense>

#include "pubsim/frames.hpp"
#include "pubsim/types.hpp"

namespace pubsim {

/// Physical constants of the vehicle. Aero coefficients have the reference
/// area folded in (C_D here is C_D * S_ref).
struct AirshipParams {
  double mass = 0.2978;  // kg
  double Ix = 0.0;       // kg m^2
  double Iy = 0.0;
  double Iz = 0.0;
  double Ixz = 0.0;
  double cb_offset_d = 0.0;   // m, buoyancy centre above mass centre
  double buoyancy = 0.0;      // N, static force acting at the buoyancy centre
  double net_lift = 0.0;      // N, buoyancy minus weight
  double thruster_sx = 0.0;   // m, gimbal mount along body x
  double thruster_sz = 0.0;   // m, gimbal mount along body z (down)
  double link_length = 0.0;   // m, gimbal pivot to thrust line
  double yaw_damping_C2 = 0.0;  // N m s
  double drag_coefficient = 0.0;    // C_D
  double lift_slope = 0.0;          // C_L_alpha, 1/rad
  double moment_slope = 0.0;        // C_m_alpha, 1/rad
  double reference_chord = 0.0;     // c0, m
  double air_density = 1.205;       // kg/m^3

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  Eigen::Matrix3d inertia_tensor() const;

  /// Prototype mass and drag with ellipsoid inertia; the remaining
  /// coefficients were never measured and carry placeholder values.
  static AirshipParams prototype();
};

/// 12-component rigid-body state. Altitude h is positive up.
struct BodyState {
  double u = 0.0, v = 0.0, w = 0.0;
  double p = 0.0, q = 0.0, r = 0.0;
  double x_g = 0.0, y_g = 0.0, h = 0.0;
  AttitudeAngles att;

  using Vector = Eigen::Matrix<double, 12, 1>;

  Vector to_vector() const;
  static BodyState from_vector(const Vector& x);

  Vec3 velocity() const { return {u, v, w}; }
  Vec3 rates() const { return {p, q, r}; }
};

/// Component names in to_vector() order.
inline constexpr const char* kStateNames[12] = {"u", "v", "w", "p", "q", "r",
                                                "x_g", "y_g", "h", "phi", "theta", "psi"};

/// Thrust magnitude and gimbal deflections. delta_y = delta_p = 0 points the
/// thrust along +x_b; the 90-degree servo centre is applied only at the
/// servo boundary.
struct ThrusterCommand {
  double thrust = 0.0;   // N
  double delta_y = 0.0;  // rad
  double delta_p = 0.0;  // rad
};

/// Drag/lift/pitching moment with linear-in-alpha closures, rotated from the
/// airflow frame. Zero below the stagnation speed.
Wrench aero_wrench(const AirshipParams& params, const Vec3& v_body);

/// Vectored thrust force and its moment about the mass centre.
Wrench thruster_wrench(const AirshipParams& params, const ThrusterCommand& cmd);

/// Static vertical force from net lift plus the restoring moment of the
/// buoyancy acting above the mass centre. Body frame.
Wrench static_wrench(const AirshipParams& params, const AttitudeAngles& att);

/// Full 6-DOF state derivative. Throws SingularInertia.
BodyState full_derivatives(const AirshipParams& params, const BodyState& state,
                           const ThrusterCommand& cmd);

/// Level-flight model (phi = theta = p = q = 0). Throws ConstraintViolation
/// when the state leaves that manifold by more than kPlanarTolerance.
BodyState planar_derivatives(const AirshipParams& params, const BodyState& state,
                             const ThrusterCommand& cmd);

inline constexpr double kPlanarTolerance = 1e-9;

}  // namespace pubsim
