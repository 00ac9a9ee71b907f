#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pubsim/dynamics.hpp"

namespace pubsim {

struct TrimPoint {
  double speed = 0.0;    // V, m/s
  double thrust = 0.0;   // T0, N
  double delta_y0 = 0.0;
  double delta_p0 = 0.0;
};

/// Small-perturbation model over (du, dv, dw, dr) with inputs (dT, d_delta_y,
/// d_delta_p) about low-speed level flight.
struct LinearModel {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::Matrix<double, 4, 3> B = Eigen::Matrix<double, 4, 3>::Zero();
  TrimPoint trim;

  Eigen::Matrix2d vr_block() const;
  Eigen::Vector2d vr_input() const;
};

LinearModel linearize(const AirshipParams& params, double trim_speed, double trim_thrust);

/// Closed-loop u-channel for the prototype:
/// Phi(s) = 3.3580 / (s + 0.0575 + 3.3580 k_u).
inline constexpr double kSpeedLoopNumerator = 3.3580;
inline constexpr double kSpeedLoopPole = 0.0575;

/// Gain making Phi(0) = 1 for Phi(s) = numer / (s + pole + numer k_u).
double design_ku_unity_dc(double numerator, double pole);

/// Lower bound on k_w for the w channel, rho V C_La / (2 T).
double kw_lower_bound(const AirshipParams& params, double trim_speed, double trim_thrust);

/// v-r block with d_delta_y = -k1 dv - k2 dr substituted.
Eigen::Matrix2d closed_loop_vr(const LinearModel& model, double k1, double k2);

struct LyapunovCertificate {
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  double residual = 0.0;        // || A^T M + M A + I ||_inf
  double min_eigenvalue = 0.0;  // of M

  bool valid() const { return min_eigenvalue > 0.0 && residual < 1e-10; }
};

/// Solves A^T M + M A = -I for symmetric M. Throws SingularLyapunov when the
/// solution is not unique.
LyapunovCertificate lyapunov_certify(const Eigen::Matrix2d& a_cl);

struct GainGrid {
  double k1_min = 0.0, k1_max = 0.0;
  std::size_t k1_steps = 1;
  double k2_min = 0.0, k2_max = 0.0;
  std::size_t k2_steps = 1;
};

struct VrGainResult {
  double k1 = 0.0;
  double k2 = 0.0;
  Eigen::Matrix2d a_cl = Eigen::Matrix2d::Zero();
  LyapunovCertificate certificate;
  std::size_t candidates_tried = 0;
};

/// First certified (k1, k2) in row-major grid order (k1 outer, k2 inner).
std::optional<VrGainResult> search_vr_gains(const LinearModel& model, const GainGrid& grid);

struct GainSet {
  double k_u = 0.0;
  double k_w = 0.0;
  double k_1 = 0.0;
  double k_2 = 0.0;
};

/// Perturbations about trim plus the optional external inputs.
struct InnerLoopInput {
  double du = 0.0, dv = 0.0, dw = 0.0, dr = 0.0;
  double thrust_feedforward = 0.0;   // dT1
  double pitch_feedforward = 0.0;    // d_delta_p1
};

/// Absolute thruster command from trim plus the state feedback laws.
ThrusterCommand inner_loop_command(const GainSet& gains, const TrimPoint& trim,
                                   const InnerLoopInput& in);

struct FirstOrderLoop {
  double numerator = kSpeedLoopNumerator;
  double pole = kSpeedLoopPole;
  double k_u = 0.0;

  double rate() const { return pole + numerator * k_u; }
  double dc_gain() const { return numerator / rate(); }
};

struct StepSample {
  double t = 0.0;
  double y = 0.0;
};

/// Analytic unit-step response y = K (1 - exp(-a t)) sampled every dt,
/// including t = 0 and the last sample at or before `duration`.
std::vector<StepSample> step_response(const FirstOrderLoop& loop, double duration, double dt);

/// key=value lines.
std::string format_report(const LinearModel& model);
std::string format_report(const LyapunovCertificate& cert, double k1, double k2);

}  // namespace pubsim
