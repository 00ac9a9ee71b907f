#include "pubsim/smc.hpp"

#include <algorithm>
#include <cmath>

#include "pubsim/error.hpp"
#include "pubsim/frames.hpp"

namespace pubsim {

SmcModel SmcModel::build(const SmcModelParams& p, bool literal) {
  if (!(p.mass > 0.0) || !(p.Iz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "SMC model needs positive mass and Iz");
  }
  const double m = p.mass;
  SmcModel model;
  if (literal) {
    model.M_s << m + p.m11, 0.0, -m * p.y_G,
                 m + p.m22, 0.0, m * p.x_G,
                 -m * p.y_G, m * p.x_G, p.Iz + p.m66;
    Eigen::FullPivLU<Mat3> lu(model.M_s);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::SingularMassMatrix, "generalized mass matrix (literal form) is singular");
    }
  } else {
    model.M_s << m + p.m11, 0.0, -m * p.y_G,
                 0.0, m + p.m22, m * p.x_G,
                 -m * p.y_G, m * p.x_G, p.Iz + p.m66;
    if (model.M_s.llt().info() != Eigen::Success) {
      throw Error(ErrorCode::SingularMassMatrix, "generalized mass matrix is not positive definite");
    }
  }
  const double dm = p.m11 - p.m22;
  model.A_s << p.X_u, p.X_v, p.X_r + dm * p.wind_v,
               p.Y_u, p.Y_v, p.Y_r + dm * p.wind_u,
               p.N_u, p.N_v, p.N_r;
  model.B_s = Mat3::Identity();
  return model;
}

Vec3 SmcModel::acceleration(const Vec3& x, const Vec3& u) const {
  return M_s.partialPivLu().solve(A_s * x + B_s * u);
}

void SmcGains::validate() const {
  if (c2 == 0.0) throw Error(ErrorCode::InvalidArgument, "SMC gain c2 must be non-zero");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "SMC epsilon must be >= 0");
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "SMC gain k must be positive");
  if (!(boundary_layer >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "boundary layer must be >= 0");
  }
}

TrackingError tracking_error(const Vec3& eta, const Vec3& eta_dot, const Vec3& eta_d,
                             const Vec3& eta_d_dot) {
  TrackingError err;
  err.e = eta - eta_d;
  err.e.z() = angle_difference(eta.z(), eta_d.z());
  err.e_dot = eta_dot - eta_d_dot;
  return err;
}

double switching(double s, double boundary_layer) {
  if (boundary_layer > 0.0) return s / (std::abs(s) + boundary_layer);
  return (s > 0.0) - (s < 0.0);
}

Vec3 sliding_surface(const SmcGains& g, const TrackingError& err) {
  return g.c1 * err.e + g.c2 * err.e_dot;
}

Vec3 reaching_law(const SmcGains& g, const Vec3& s) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = -g.epsilon * switching(s[i], g.boundary_layer) - g.k * s[i];
  return out;
}

Vec3 smc_control(const SmcModel& model, const SmcGains& g, const Vec3& eta_dot,
                 const TrackingError& err, const Mat3& C_bg, const Mat3& C_bg_dot,
                 const Vec3& eta_ddot_desired) {
  g.validate();
  if (!(std::abs(C_bg.determinant()) > 1e-12)) {
    throw Error(ErrorCode::SingularTransform, "pose transform is not invertible");
  }
  Eigen::FullPivLU<Mat3> b_lu(model.B_s);
  if (!b_lu.isInvertible()) throw Error(ErrorCode::SingularTransform, "B_s is not invertible");

  const Vec3 s = sliding_surface(g, err);
  Vec3 sw;
  for (int i = 0; i < 3; ++i) sw[i] = switching(s[i], g.boundary_layer);

  // Pose acceleration that makes c1 e_dot + c2 e_ddot follow the reaching law.
  const Vec3 eta_ddot = eta_ddot_desired - (g.epsilon * sw + g.k * s + g.c1 * err.e_dot) / g.c2;
  // X = C eta_dot  =>  X_dot = C eta_ddot + C_dot eta_dot; invert M_s X_dot = A_s X + B_s U.
  const Vec3 x = C_bg * eta_dot;
  const Vec3 x_dot = C_bg * eta_ddot + C_bg_dot * eta_dot;
  return b_lu.solve(model.M_s * x_dot - model.A_s * x);
}

SlidingState lyapunov_monitor(const SmcGains& g, const Vec3& s) {
  SlidingState out;
  out.s = s;
  for (int i = 0; i < 3; ++i) {
    out.V[i] = 0.5 * s[i] * s[i];
    out.V_dot[i] = -g.epsilon * std::abs(s[i]) - g.k * s[i] * s[i];
  }
  return out;
}

Mat3 planar_ground_to_body(double psi) { return yaw_ground_to_body(psi); }

Mat3 planar_ground_to_body_rate(double psi, double r) {
  const double c = std::cos(psi), s = std::sin(psi);
  Mat3 d;
  d << -s, c, 0,
       -c, -s, 0,
       0, 0, 0;
  return r * d;
}

Allocation allocate_actuation(const Vec3& U, double max_thrust, const GimbalLimits& limits,
                              double yaw_lever, double vertical_force) {
  if (!(max_thrust > 0.0)) throw Error(ErrorCode::InvalidArgument, "max thrust must be positive");
  const double fx = U.x(), fy = U.y();
  const double horizontal = std::hypot(fx, fy);
  const double requested = std::hypot(horizontal, vertical_force);

  Allocation out;
  out.command.thrust = std::min(requested, max_thrust);
  out.saturated = requested > max_thrust;

  double dy = horizontal > 0.0 ? std::atan2(fy, fx) : 0.0;
  double dp = vertical_force != 0.0 ? std::atan2(-vertical_force, horizontal) : 0.0;
  const double dy_clamped = std::clamp(dy, -limits.yaw, limits.yaw);
  const double dp_clamped = std::clamp(dp, -limits.pitch, limits.pitch);
  out.saturated = out.saturated || dy_clamped != dy || dp_clamped != dp;
  out.command.delta_y = dy_clamped;
  out.command.delta_p = dp_clamped;

  const double t = out.command.thrust;
  const double cp = std::cos(dp_clamped);
  const Vec3 realized{t * std::cos(dy_clamped) * cp, t * std::sin(dy_clamped) * cp,
                      yaw_lever * t * std::sin(dy_clamped) * cp};
  out.residual = U - realized;
  return out;
}

}  // namespace pubsim
