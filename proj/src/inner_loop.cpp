#include "pubsim/inner_loop.hpp"

#include <cmath>
#include <sstream>

#include "pubsim/error.hpp"
#include "pubsim/format.hpp"

namespace pubsim {

Eigen::Matrix2d LinearModel::vr_block() const {
  Eigen::Matrix2d a;
  a << A(1, 1), A(1, 3),
       A(3, 1), A(3, 3);
  return a;
}

Eigen::Vector2d LinearModel::vr_input() const { return {B(1, 1), B(3, 1)}; }

LinearModel linearize(const AirshipParams& params, double trim_speed, double trim_thrust) {
  if (!(trim_speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "trim speed must be positive");
  if (!(trim_thrust >= 0.0)) throw Error(ErrorCode::InvalidArgument, "trim thrust must be >= 0");
  params.validate();
  const double m = params.mass, rho = params.air_density, V = trim_speed, T = trim_thrust;

  LinearModel lin;
  lin.trim = TrimPoint{V, T, 0.0, 0.0};
  // Literal entries, including the positive lift slopes on dv and dw.
  lin.A(0, 0) = -rho * V * params.drag_coefficient / m;
  lin.A(1, 1) = rho * V * params.lift_slope / (2.0 * m);
  lin.A(1, 3) = -V;
  lin.A(2, 2) = rho * V * params.lift_slope / (2.0 * m);
  lin.A(3, 1) = rho * V * params.reference_chord * params.moment_slope / (2.0 * m);
  lin.A(3, 3) = -params.yaw_damping_C2 / params.Iz;

  lin.B(0, 0) = 1.0 / m;
  lin.B(1, 1) = T / m;
  lin.B(2, 2) = -T / m;
  lin.B(3, 1) = params.thruster_sx * T / params.Iz;
  return lin;
}

double design_ku_unity_dc(double numerator, double pole) {
  if (!(numerator > 0.0)) throw Error(ErrorCode::InvalidArgument, "numerator must be positive");
  return (numerator - pole) / numerator;
}

double kw_lower_bound(const AirshipParams& params, double trim_speed, double trim_thrust) {
  if (trim_thrust == 0.0) {
    throw Error(ErrorCode::DivisionByZeroThrust, "k_w bound undefined at zero trim thrust");
  }
  return params.air_density * trim_speed * params.lift_slope / (2.0 * trim_thrust);
}

Eigen::Matrix2d closed_loop_vr(const LinearModel& model, double k1, double k2) {
  const Eigen::RowVector2d gains(k1, k2);
  return model.vr_block() - model.vr_input() * gains;
}

LyapunovCertificate lyapunov_certify(const Eigen::Matrix2d& a_cl) {
  if (!a_cl.allFinite()) throw Error(ErrorCode::InvalidArgument, "closed-loop matrix not finite");
  const double a = a_cl(0, 0), b = a_cl(0, 1), c = a_cl(1, 0), d = a_cl(1, 1);
  // Unknowns (m1, m2, m4) of the symmetric M.
  Eigen::Matrix3d sys;
  sys << 2.0 * a, 2.0 * c, 0.0,
         b, a + d, c,
         0.0, 2.0 * b, 2.0 * d;
  const Eigen::Vector3d rhs(-1.0, 0.0, -1.0);
  const double scale = std::max(1.0, a_cl.cwiseAbs().maxCoeff());
  Eigen::FullPivLU<Eigen::Matrix3d> lu(sys);
  if (std::abs(sys.determinant()) <= 1e-12 * scale * scale * scale || !lu.isInvertible()) {
    throw Error(ErrorCode::SingularLyapunov,
                "Lyapunov equation has no unique solution (eigenvalues symmetric about the imaginary axis)");
  }
  const Eigen::Vector3d sol = lu.solve(rhs);

  LyapunovCertificate cert;
  cert.M << sol[0], sol[1],
            sol[1], sol[2];
  const Eigen::Matrix2d res = a_cl.transpose() * cert.M + cert.M * a_cl + Eigen::Matrix2d::Identity();
  cert.residual = res.cwiseAbs().rowwise().sum().maxCoeff();
  const double tr = cert.M.trace();
  const double det = cert.M.determinant();
  cert.min_eigenvalue = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
  return cert;
}

std::optional<VrGainResult> search_vr_gains(const LinearModel& model, const GainGrid& grid) {
  if (grid.k1_steps == 0 || grid.k2_steps == 0) {
    throw Error(ErrorCode::InvalidArgument, "gain grid needs at least one step per axis");
  }
  auto node = [](double lo, double hi, std::size_t steps, std::size_t i) {
    return steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };
  std::size_t tried = 0;
  for (std::size_t i = 0; i < grid.k1_steps; ++i) {
    for (std::size_t j = 0; j < grid.k2_steps; ++j) {
      ++tried;
      const double k1 = node(grid.k1_min, grid.k1_max, grid.k1_steps, i);
      const double k2 = node(grid.k2_min, grid.k2_max, grid.k2_steps, j);
      const Eigen::Matrix2d a_cl = closed_loop_vr(model, k1, k2);
      LyapunovCertificate cert;
      try {
        cert = lyapunov_certify(a_cl);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularLyapunov) continue;
        throw;
      }
      if (cert.valid()) return VrGainResult{k1, k2, a_cl, cert, tried};
    }
  }
  return std::nullopt;
}

ThrusterCommand inner_loop_command(const GainSet& gains, const TrimPoint& trim,
                                   const InnerLoopInput& in) {
  ThrusterCommand cmd;
  cmd.thrust = trim.thrust - gains.k_u * in.du + in.thrust_feedforward;
  cmd.delta_p = trim.delta_p0 + gains.k_w * in.dw + in.pitch_feedforward;
  cmd.delta_y = trim.delta_y0 - gains.k_1 * in.dv - gains.k_2 * in.dr;
  return cmd;
}

std::vector<StepSample> step_response(const FirstOrderLoop& loop, double duration, double dt) {
  if (!(dt > 0.0) || !(duration > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step response needs dt > 0 and duration > 0");
  }
  const double a = loop.rate();
  const double gain = loop.dc_gain();
  const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  std::vector<StepSample> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.push_back({t, gain * (1.0 - std::exp(-a * t))});
  }
  return out;
}

std::string format_report(const LinearModel& model) {
  std::ostringstream out;
  out << "trim_speed=" << format_number(model.trim.speed) << '\n'
      << "trim_thrust=" << format_number(model.trim.thrust) << '\n';
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out << "A" << i + 1 << j + 1 << '=' << format_number(model.A(i, j)) << '\n';
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      out << "B" << i + 1 << j + 1 << '=' << format_number(model.B(i, j)) << '\n';
    }
  }
  return out.str();
}

std::string format_report(const LyapunovCertificate& cert, double k1, double k2) {
  std::ostringstream out;
  out << "k1=" << format_number(k1) << '\n'
      << "k2=" << format_number(k2) << '\n'
      << "m1=" << format_number(cert.M(0, 0)) << '\n'
      << "m2=" << format_number(cert.M(0, 1)) << '\n'
      << "m4=" << format_number(cert.M(1, 1)) << '\n'
      << "residual_inf=" << format_number(cert.residual) << '\n'
      << "min_eigenvalue=" << format_number(cert.min_eigenvalue) << '\n'
      << "certified=" << (cert.valid() ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace pubsim
