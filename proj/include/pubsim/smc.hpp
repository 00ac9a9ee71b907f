#pragma once

#include "pubsim/dynamics.hpp"
#include "pubsim/types.hpp"

namespace pubsim {

/// Constants of the lateral-planar model M_s X_dot = A_s X + B_s U over
/// X = (u, v, r). Added-mass and offsets default to zero.
struct SmcModelParams {
  double mass = 0.2978;
  double Iz = 0.0;
  double m11 = 0.0, m22 = 0.0, m66 = 0.0;
  double x_G = 0.0, y_G = 0.0;
  // Aerodynamic derivatives, row by row. X_v multiplies v in the axial row.
  double X_u = 0.0, X_v = 0.0, X_r = 0.0;
  double Y_u = 0.0, Y_v = 0.0, Y_r = 0.0;
  double N_u = 0.0, N_v = 0.0, N_r = 0.0;
  double wind_u = 0.0, wind_v = 0.0;
};

struct SmcModel {
  Mat3 M_s = Mat3::Identity();
  Mat3 A_s = Mat3::Zero();
  Mat3 B_s = Mat3::Identity();

  /// Symmetric generalized mass by default. `literal` builds the matrix
  /// with (m + m22, 0, m x_G) as its second row and throws SingularMassMatrix
  /// when that is singular.
  static SmcModel build(const SmcModelParams& p, bool literal = false);

  /// X_dot for the given state and generalized force.
  Vec3 acceleration(const Vec3& x, const Vec3& u) const;
};

struct SmcGains {
  double c1 = 1.0;
  double c2 = 1.0;
  double epsilon = 0.0;
  double k = 1.0;
  double boundary_layer = 0.0;  // 0 disables sgn smoothing

  void validate() const;
};

struct TrackingError {
  Vec3 e = Vec3::Zero();
  Vec3 e_dot = Vec3::Zero();
};

/// e = eta - eta_d with the yaw component wrapped.
TrackingError tracking_error(const Vec3& eta, const Vec3& eta_dot, const Vec3& eta_d,
                             const Vec3& eta_d_dot);

struct SlidingState {
  Vec3 s = Vec3::Zero();
  Vec3 V = Vec3::Zero();
  Vec3 V_dot = Vec3::Zero();
};

/// sgn(0) = 0; with boundary layer phi > 0, s / (|s| + phi).
double switching(double s, double boundary_layer = 0.0);

Vec3 sliding_surface(const SmcGains& g, const TrackingError& err);

/// s_dot = -eps sgn(s) - k s.
Vec3 reaching_law(const SmcGains& g, const Vec3& s);

/// Generalized force driving s along the reaching law. C_bg maps ground
/// rates to body velocities (X = C_bg eta_dot).
Vec3 smc_control(const SmcModel& model, const SmcGains& g, const Vec3& eta_dot,
                 const TrackingError& err, const Mat3& C_bg, const Mat3& C_bg_dot,
                 const Vec3& eta_ddot_desired = Vec3::Zero());

/// Per channel V = s^2 / 2, V_dot = -eps |s| - k s^2.
SlidingState lyapunov_monitor(const SmcGains& g, const Vec3& s);

/// Planar ground-to-body map for yaw psi and its time derivative at rate r.
Mat3 planar_ground_to_body(double psi);
Mat3 planar_ground_to_body_rate(double psi, double r);

struct GimbalLimits {
  double yaw = kPi / 2;    // rad, |delta_y| limit
  double pitch = kPi / 2;  // rad, |delta_p| limit
};

struct Allocation {
  ThrusterCommand command;
  Vec3 residual = Vec3::Zero();  // requested minus realized (F_x, F_y, N_z)
  bool saturated = false;
};

/// Maps U = (F_x, F_y, N_z) onto one vectored thruster. `yaw_lever` (s_x)
/// lets the realized yaw moment s_x T sin(delta_y) cos(delta_p) count
/// against N_z; with 0 the whole N_z is reported as residual.
Allocation allocate_actuation(const Vec3& U, double max_thrust, const GimbalLimits& limits,
                              double yaw_lever = 0.0, double vertical_force = 0.0);

}  // namespace pubsim
