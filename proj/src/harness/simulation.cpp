#include "pubsim/harness/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pubsim/error.hpp"
#include "pubsim/frames.hpp"
#include "pubsim/harness/integrator.hpp"

namespace pubsim {

namespace {

using StateVec = BodyState::Vector;

constexpr double kReachThreshold = 1e-3;

struct PlantInput {
  ThrusterCommand cmd;
  Vec3 generalized = Vec3::Zero();
  bool use_generalized = false;
};

Vec3 generalized_from_thrust(const ThrusterCommand& c, double lever) {
  const double fy = c.thrust * std::sin(c.delta_y) * std::cos(c.delta_p);
  return {c.thrust * std::cos(c.delta_y) * std::cos(c.delta_p), fy, lever * fy};
}

// Right-hand side for every plant, in BodyState vector layout.
class Plant {
 public:
  explicit Plant(const Scenario& sc) : sc_(sc) {
    if (sc.model == PlantModel::Lateral) {
      lateral_ = SmcModel::build(sc.smc.model_params, sc.smc.mass_matrix_literal);
    }
    if (sc.model == PlantModel::Linear) {
      const auto& trim = sc.inner_loop.trim;
      linear_ = linearize(sc.airship, trim.speed, trim.thrust);
      if (const auto& loop = sc.inner_loop.speed_loop) {
        linear_.A(0, 0) = -loop->pole;
        linear_.B(0, 0) = loop->numerator;
      }
    }
  }

  StateVec derivative(const StateVec& xv, const PlantInput& in) const {
    const BodyState x = BodyState::from_vector(xv);
    switch (sc_.model) {
      case PlantModel::Full:
        return full_derivatives(sc_.airship, x, in.cmd).to_vector();
      case PlantModel::Planar:
        return planar_derivatives(sc_.airship, x, in.cmd).to_vector();
      case PlantModel::Lateral: {
        const Vec3 u = in.use_generalized ? in.generalized
                                          : generalized_from_thrust(in.cmd, sc_.airship.thruster_sx);
        const Vec3 xdot = lateral_.acceleration({x.u, x.v, x.r}, u);
        BodyState d;
        d.u = xdot.x();
        d.v = xdot.y();
        d.r = xdot.z();
        set_planar_kinematics(x, d);
        return d.to_vector();
      }
      case PlantModel::Linear: {
        const auto& trim = sc_.inner_loop.trim;
        const Eigen::Vector4d dx{x.u - trim.speed, x.v, x.w, x.r};
        const Eigen::Vector3d du{in.cmd.thrust - trim.thrust, in.cmd.delta_y - trim.delta_y0,
                                 in.cmd.delta_p - trim.delta_p0};
        const Eigen::Vector4d dxdot = linear_.A * dx + linear_.B * du;
        BodyState d;
        d.u = dxdot[0];
        d.v = dxdot[1];
        d.w = dxdot[2];
        d.r = dxdot[3];
        set_planar_kinematics(x, d);
        d.h = -x.w;
        return d.to_vector();
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown plant model");
  }

 private:
  static void set_planar_kinematics(const BodyState& x, BodyState& d) {
    const double c = std::cos(x.att.psi), s = std::sin(x.att.psi);
    d.x_g = x.u * c - x.v * s;
    d.y_g = x.u * s + x.v * c;
    d.att.psi = x.r;
  }

  const Scenario& sc_;
  SmcModel lateral_;
  LinearModel linear_;
};

struct SmcStep {
  Vec3 s = Vec3::Zero();
  Vec3 U = Vec3::Zero();
  Vec3 pose_ref = Vec3::Zero();
};

double inf_norm(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

SimResult run_scenario(const Scenario& sc) {
  sc.validate();
  const Plant plant(sc);
  SimResult result;
  SimSummary& sum = result.summary;

  std::uint32_t static_flags = kFlagNone;
  double max_thrust = sc.max_thrust;
  if (sc.electrode_spacing) {
    try {
      const SpacingThrust st = spacing_to_thrust(dual_ring_spacing_map(), *sc.electrode_spacing);
      max_thrust = st.thrust;
      if (st.extrapolated) static_flags |= kFlagExtrapolatedMap;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PunctureFault) throw;
      max_thrust = 0.0;
      static_flags |= kFlagPuncture;
    }
  }

  SmcModel smc_model;
  const bool smc = sc.controller == ControllerKind::Smc;
  if (smc) smc_model = SmcModel::build(sc.smc.model_params, sc.smc.mass_matrix_literal);
  const SmcGains& gains = sc.smc.gains;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  const auto steps = static_cast<std::size_t>(std::llround(sc.duration / sc.dt));
  StateVec x = sc.initial.to_vector();
  x[11] = wrap_angle(x[11]);
  require_finite(x, kStateNames);

  ServoPositions servo_prev;
  bool have_servo_prev = false;

  std::vector<StepSample> speed_samples;
  double du_at_step = 0.0;
  bool step_started = false;

  sum.min_altitude = x[8];
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * sc.dt;
    const BodyState state = BodyState::from_vector(x);
    SimRecord rec;
    rec.t = t;
    rec.state = state;
    rec.flags = static_flags;

    try {
      PlantInput input;
      bool thruster_path = true;
      SmcStep sm;

      if (sc.controller == ControllerKind::OpenLoop) {
        const auto& script = sc.open_loop.script;
        auto it = std::upper_bound(script.begin(), script.end(), t,
                                   [](double v, const OpenLoopRow& r) { return v < r.t; });
        if (it != script.begin()) {
          const OpenLoopRow& row = *std::prev(it);
          input.cmd.thrust = sc.open_loop.throttle_input
                                 ? throttle_to_thrust(*sc.open_loop.throttle_map, row.input)
                                 : row.input;
          input.cmd.delta_y = servo_to_deflection(row.yaw_servo_deg, sc.servo);
          input.cmd.delta_p = servo_to_deflection(row.pitch_servo_deg, sc.servo);
        }
      } else if (sc.controller == ControllerKind::InnerLoop) {
        const auto& il = sc.inner_loop;
        InnerLoopInput in;
        in.du = state.u - il.trim.speed;
        in.dv = state.v;
        in.dw = state.w;
        in.dr = state.r;
        if (t >= il.step_time) in.thrust_feedforward = il.speed_step;
        input.cmd = inner_loop_command(il.gains, il.trim, in);
        if (il.speed_step != 0.0 && t >= il.step_time) {
          if (!step_started) {
            du_at_step = in.du;
            step_started = true;
          }
          speed_samples.push_back({t - il.step_time, in.du - du_at_step});
        }
      } else {
        const Mat3 C = planar_ground_to_body(state.att.psi);
        const Mat3 C_dot = planar_ground_to_body_rate(state.att.psi, state.r);
        const Vec3 X{state.u, state.v, state.r};
        const Vec3 eta{state.x_g, state.y_g, state.att.psi};
        const Vec3 eta_dot = C.transpose() * X;
        Vec3 ref_rate;
        sc.smc.reference.sample(t, sm.pose_ref, ref_rate);
        const TrackingError err = tracking_error(eta, eta_dot, sm.pose_ref, ref_rate);
        sm.s = sliding_surface(gains, err);
        sm.U = smc_control(smc_model, gains, eta_dot, err, C, C_dot);
        rec.generalized_force = sm.U;
        if (sc.smc.vectored_actuation) {
          if (max_thrust > 0.0) {
            const Allocation a =
                allocate_actuation(sm.U, max_thrust, sc.smc.limits, sc.airship.thruster_sx);
            input.cmd = a.command;
            rec.residual = a.residual;
          } else {
            rec.residual = sm.U;
          }
          if (inf_norm(rec.residual) > 1e-12) rec.flags |= kFlagAllocationResidual;
        } else {
          input.generalized = sm.U;
          input.use_generalized = true;
          thruster_path = false;
        }
      }

      if (thruster_path) {
        if (sc.yaw_noise_deg > 0.0) input.cmd.delta_y += deg_to_rad(sc.yaw_noise_deg * noise(rng));
        if (input.cmd.thrust > max_thrust) {
          input.cmd.thrust = max_thrust;
          rec.flags |= kFlagThrustSaturated;
        } else if (input.cmd.thrust < 0.0) {
          input.cmd.thrust = 0.0;
          rec.flags |= kFlagThrustSaturated;
        }
        const ServoPositions pos =
            servo_map(input.cmd, sc.servo, have_servo_prev ? &servo_prev : nullptr, sc.dt);
        if (pos.saturated) rec.flags |= kFlagServoSaturated;
        if (pos.slew_limited) rec.flags |= kFlagSlewLimited;
        servo_prev = pos;
        have_servo_prev = true;
        rec.servo = pos;
        input.cmd.delta_y = servo_to_deflection(pos.yaw_deg, sc.servo);
        input.cmd.delta_p = servo_to_deflection(pos.pitch_deg, sc.servo);
        rec.command = input.cmd;
      }

      const StateVec xdot = plant.derivative(x, input);

      if (smc) {
        // s_dot from the plant's own response, for V_dot = s * s_dot.
        const Mat3 C = planar_ground_to_body(state.att.psi);
        const Mat3 C_dot = planar_ground_to_body_rate(state.att.psi, state.r);
        const Vec3 X{state.u, state.v, state.r};
        const Vec3 X_dot{xdot[0], xdot[1], xdot[5]};
        const Vec3 eta_ddot = C_dot.transpose() * X + C.transpose() * X_dot;
        Vec3 ref_pose, ref_rate;
        sc.smc.reference.sample(t, ref_pose, ref_rate);
        const Vec3 e_dot = C.transpose() * X - ref_rate;
        const Vec3 s_dot = gains.c1 * e_dot + gains.c2 * eta_ddot;
        rec.sliding = sm.s;
        rec.lyapunov = 0.5 * sm.s.cwiseProduct(sm.s);
        rec.lyapunov_rate = sm.s.cwiseProduct(s_dot);

        const double s_norm = inf_norm(sm.s);
        if (i == 0) {
          sum.initial_sliding_norm = s_norm;
          sum.initial_sliding_energy = 0.5 * sm.s.squaredNorm();
          if (gains.epsilon > 0.0) {
            sum.reaching_time_bound = std::log1p(gains.k * s_norm / gains.epsilon) / gains.k;
          }
        }
        if (sum.sliding_reach_time < 0.0 && s_norm < kReachThreshold) sum.sliding_reach_time = t;
        sum.final_sliding_norm = s_norm;
        sum.final_sliding_energy = 0.5 * sm.s.squaredNorm();
        sum.final_heading_error = std::abs(angle_difference(state.att.psi, sm.pose_ref.z()));
        sum.final_position_error =
            std::hypot(state.x_g - sm.pose_ref.x(), state.y_g - sm.pose_ref.y());
      }

      if (state.h < 0.0) rec.flags |= kFlagGroundContact;
      if (sc.model == PlantModel::Full || sc.model == PlantModel::Planar) {
        const Vec3 vel = state.velocity();
        if (vel.norm() > kStagnationSpeed && flow_angles_from_velocity(vel).clipped) {
          rec.flags |= kFlagFlowClipped;
        }
      }

      const double speed = state.velocity().norm();
      sum.max_speed = std::max(sum.max_speed, speed);
      sum.min_altitude = std::min(sum.min_altitude, state.h);
      sum.flags_seen |= rec.flags;

      if (i % sc.record_every == 0 || i == steps) {
        if (rec.flags != kFlagNone) ++sum.flagged_records;
        result.records.push_back(rec);
      }

      if (i < steps) {
        x = integrate_step([&](const StateVec& y) { return plant.derivative(y, input); }, x,
                           sc.dt, kStateNames);
        x[11] = wrap_angle(x[11]);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "t=" + format_number(t) + ": " + e.what());
    }
  }

  const BodyState final_state = BodyState::from_vector(x);
  sum.steps = steps;
  sum.duration = static_cast<double>(steps) * sc.dt;
  sum.final_speed = final_state.velocity().norm();
  sum.final_altitude = final_state.h;
  sum.final_heading = final_state.att.psi;
  if (!speed_samples.empty()) {
    sum.final_speed_perturbation = speed_samples.back().y;
    sum.speed_time_constant = first_order_time_constant(speed_samples, speed_samples.back().y);
  }
  return result;
}

std::string csv_header() {
  return "t,u,v,w,p,q,r,x_g,y_g,h,phi,theta,psi,thrust,delta_y,delta_p,servo_yaw_deg,"
         "servo_pitch_deg,s_x,s_y,s_psi,V_x,V_y,V_psi,Vdot_x,Vdot_y,Vdot_psi,U_x,U_y,U_n,"
         "residual_x,residual_y,residual_n,flags";
}

void write_csv(std::ostream& out, const std::vector<SimRecord>& records) {
  out << csv_header() << '\n';
  for (const SimRecord& r : records) {
    const StateVec x = r.state.to_vector();
    out << format_number(r.t);
    for (int i = 0; i < 12; ++i) out << ',' << format_number(x[i]);
    for (double v : {r.command.thrust, r.command.delta_y, r.command.delta_p, r.servo.yaw_deg,
                     r.servo.pitch_deg}) {
      out << ',' << format_number(v);
    }
    for (const Vec3* v : {&r.sliding, &r.lyapunov, &r.lyapunov_rate, &r.generalized_force,
                          &r.residual}) {
      for (int i = 0; i < 3; ++i) out << ',' << format_number((*v)[i]);
    }
    out << ',' << r.flags << '\n';
  }
}

void write_summary(std::ostream& out, const SimSummary& s) {
  out << "steps=" << s.steps << '\n'
      << "duration=" << format_number(s.duration) << '\n'
      << "max_speed=" << format_number(s.max_speed) << '\n'
      << "final_speed=" << format_number(s.final_speed) << '\n'
      << "final_altitude=" << format_number(s.final_altitude) << '\n'
      << "min_altitude=" << format_number(s.min_altitude) << '\n'
      << "final_heading=" << format_number(s.final_heading) << '\n'
      << "final_heading_error=" << format_number(s.final_heading_error) << '\n'
      << "final_position_error=" << format_number(s.final_position_error) << '\n'
      << "initial_sliding_norm=" << format_number(s.initial_sliding_norm) << '\n'
      << "final_sliding_norm=" << format_number(s.final_sliding_norm) << '\n'
      << "sliding_reach_time=" << format_number(s.sliding_reach_time) << '\n'
      << "reaching_time_bound=" << format_number(s.reaching_time_bound) << '\n'
      << "initial_sliding_energy=" << format_number(s.initial_sliding_energy) << '\n'
      << "final_sliding_energy=" << format_number(s.final_sliding_energy) << '\n'
      << "speed_time_constant=" << format_number(s.speed_time_constant) << '\n'
      << "final_speed_perturbation=" << format_number(s.final_speed_perturbation) << '\n'
      << "flagged_records=" << s.flagged_records << '\n'
      << "flags_seen=" << s.flags_seen << '\n';
}

std::vector<StepSample> simulate_speed_loop(const FirstOrderLoop& loop, double duration,
                                            double dt) {
  if (!(dt > 0.0) || !(duration >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "simulate_speed_loop needs dt > 0, duration >= 0");
  }
  using Y = Eigen::Matrix<double, 1, 1>;
  const double rate = loop.rate();
  const auto f = [&](const Y& y) { return Y(-rate * y[0] + loop.numerator); };
  const auto steps = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  std::vector<StepSample> out;
  out.reserve(steps + 1);
  Y y = Y::Zero();
  for (std::size_t i = 0; i <= steps; ++i) {
    out.push_back({static_cast<double>(i) * dt, y[0]});
    if (i < steps) y = integrate_step(f, y, dt);
  }
  return out;
}

double first_order_time_constant(const std::vector<StepSample>& response, double final_value) {
  if (response.empty() || final_value == 0.0) return -1.0;
  const double target = -std::expm1(-1.0) * final_value;
  const double sign = final_value > 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (sign * response[i].y >= sign * target) {
      if (i == 0) return response[0].t;
      const StepSample& a = response[i - 1];
      const StepSample& b = response[i];
      return a.t + (target - a.y) / (b.y - a.y) * (b.t - a.t);
    }
  }
  return -1.0;
}

}  // namespace pubsim
