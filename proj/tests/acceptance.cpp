// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pubsim/airframe.hpp"
#include "pubsim/dynamics.hpp"
#include "pubsim/error.hpp"
#include "pubsim/harness/integrator.hpp"
#include "pubsim/harness/scenario.hpp"
#include "pubsim/harness/simulation.hpp"
#include "pubsim/inner_loop.hpp"
#include "pubsim/thruster.hpp"

using namespace pubsim;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(PUBSIM_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double value, double expected) { return std::abs(value / expected - 1.0); }

Outcome buoyancy_budget() {
  const EnvelopeGeometry env = prototype_envelope();
  const double volume_l = ellipsoid_volume(env) * 1e3;
  const LiftBudget b = lift_budget(env);
  const double gross_g = b.gross_lift_mass * 1e3, net_g = b.net_lift_mass * 1e3;
  const bool ok = rel(volume_l, 268.29) < 5e-3 && rel(gross_g, 297.8) < 5e-3 &&
                  rel(net_g, 218.44) < 5e-3;
  return {ok, fmt("volume=%.3f L", volume_l) + fmt(" gross=%.2f g", gross_g) +
                  fmt(" net=%.2f g", net_g)};
}

Outcome thrust_to_weight_ratios() {
  const ThrusterPreset quad = quad_ring_thruster();
  const ThrusterPreset dual = dual_ring_thruster();
  const double q = thrust_to_weight(quad.max_thrust, quad.geometry.dry_mass);
  const double d = thrust_to_weight(dual.max_thrust, dual.geometry.dry_mass);
  return {rel(q, 2.597) < 1e-3 && rel(d, 0.7105) < 1e-2,
          fmt("quad=%.4f N/kg", q) + fmt(" dual=%.4f N/kg", d)};
}

Outcome thrust_maps() {
  const ThrustMap throttle = dual_ring_throttle_map();
  const ThrustMap spacing = dual_ring_spacing_map();
  const double throttle_table[][2] = {{0.2, 0.00}, {0.3, 0.06}, {0.4, 0.12},
                                      {0.5, 0.31}, {0.6, 0.45}, {0.7, 0.58},
                                      {0.8, 0.70}, {0.9, 1.16}, {1.0, 1.20}};
  const double spacing_table[][2] = {{0.030, 1.16}, {0.035, 1.10}, {0.040, 0.99},
                                     {0.045, 0.90}, {0.050, 0.80}};
  bool exact = true;
  for (const auto& row : throttle_table) {
    exact = exact && throttle_to_thrust(throttle, row[0]) == grams_force_to_newtons(row[1]);
  }
  for (const auto& row : spacing_table) {
    exact = exact && spacing_to_thrust(spacing, row[0]).thrust == grams_force_to_newtons(row[1]);
  }
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = throttle_to_thrust(throttle, i / 10000.0);
    monotone = monotone && t >= prev;
    prev = t;
  }
  prev = 1e9;
  for (int i = 0; i <= 10000; ++i) {
    const double t = spacing_to_thrust(spacing, 0.02501 + i * (0.050 - 0.02501) / 10000.0).thrust;
    monotone = monotone && t <= prev;
    prev = t;
  }
  bool puncture = false;
  try {
    spacing_to_thrust(spacing, 0.025);
  } catch (const Error& e) {
    puncture = e.code() == ErrorCode::PunctureFault;
  }
  return {exact && monotone && puncture,
          std::string("samples_exact=") + (exact ? "yes" : "no") +
              " monotone=" + (monotone ? "yes" : "no") +
              " puncture_at_2.5cm=" + (puncture ? "yes" : "no")};
}

Outcome collision_integral() {
  struct Point {
    const char* name;
    GasIonParams gas;
    Vec3 slip;
  };
  std::vector<Point> points;
  points.push_back({"N2/300K", nitrogen_like_gas(), {30, 0, 0}});
  GasIonParams heavy = nitrogen_like_gas();
  heavy.ion_mass_m = 5.3e-26;  // O2+
  heavy.temperature_T = 250.0;
  points.push_back({"O2+/250K", heavy, {20, -40, 10}});
  GasIonParams light = nitrogen_like_gas();
  light.ion_mass_m = 3.0e-26;
  light.neutral_mass_M = 6.6e-27;  // He
  light.temperature_T = 400.0;
  points.push_back({"light/400K", light, {0, 0, 80}});

  bool ok = true;
  std::string detail;
  std::uint64_t seed = 101;
  for (const Point& pt : points) {
    const Vec3 closed = collision_force_density(pt.gas, pt.slip);
    const MonteCarloEstimate mc =
        collision_force_density_monte_carlo(pt.gas, pt.slip, 10'000'000, seed++);
    const double err = (mc.force_density - closed).norm() / closed.norm();
    ok = ok && err < 0.01 && mc.sample_pairs >= 10'000'000;
    detail += std::string(detail.empty() ? "" : " ") + pt.name + fmt(" rel_err=%.2e", err);
  }
  return {ok, detail};
}

Outcome linearization_fidelity() {
  const ParamsFile params = parse_params(read_text_file(kScenarios / "params.yaml"));
  AirshipParams p = params.airship;
  p.Ixz = 0.0;
  const double V = params.trim.speed, T = params.trim.thrust, h = 1e-5;
  const LinearModel lin = linearize(p, V, T);
  BodyState trim;
  trim.u = V;
  trim.h = 1.8;
  const ThrusterCommand cmd0{T, 0.0, 0.0};
  const int rows[4] = {0, 1, 2, 5};
  const auto deriv = [&](const BodyState& s, const ThrusterCommand& c) {
    return full_derivatives(p, s, c).to_vector();
  };

  Eigen::Matrix4d A_fd;
  for (int j = 0; j < 4; ++j) {
    auto xp = trim.to_vector(), xm = trim.to_vector();
    xp[rows[j]] += h;
    xm[rows[j]] -= h;
    const auto d =
        (deriv(BodyState::from_vector(xp), cmd0) - deriv(BodyState::from_vector(xm), cmd0)) / (2 * h);
    for (int i = 0; i < 4; ++i) A_fd(i, j) = d[rows[i]];
  }
  Eigen::Matrix<double, 4, 3> B_fd;
  for (int j = 0; j < 3; ++j) {
    ThrusterCommand cp = cmd0, cm = cmd0;
    (j == 0 ? cp.thrust : j == 1 ? cp.delta_y : cp.delta_p) += h;
    (j == 0 ? cm.thrust : j == 1 ? cm.delta_y : cm.delta_p) -= h;
    const auto d = (deriv(trim, cp) - deriv(trim, cm)) / (2 * h);
    for (int i = 0; i < 4; ++i) B_fd(i, j) = d[rows[i]];
  }

  // Entries whose closures the nonlinear model shares with the linear one.
  double worst = 0.0;
  for (auto [i, j] : {std::pair{0, 0}, {1, 3}, {3, 3}}) worst = std::max(worst, rel(A_fd(i, j), lin.A(i, j)));
  for (auto [i, j] : {std::pair{0, 0}, {1, 1}, {2, 2}, {3, 1}}) {
    worst = std::max(worst, rel(B_fd(i, j), lin.B(i, j)));
  }
  return {worst < 1e-3, fmt("max_rel_err=%.2e over A11 A24 A44 B11 B22 B33 B42", worst)};
}

Outcome speed_loop_gain() {
  const double k_u = design_ku_unity_dc(kSpeedLoopNumerator, kSpeedLoopPole);
  const Scenario sc = load_scenario(kScenarios / "u_step.yaml");
  const SimResult res = run_scenario(sc);
  const double settled = res.summary.final_speed_perturbation / sc.inner_loop.speed_step;
  const double tau = res.summary.speed_time_constant;
  const bool ok = std::abs(k_u - 0.9828) < 5e-4 && std::abs(settled - 1.0) < 1e-3 &&
                  rel(tau, 0.2978) < 0.02;
  return {ok, fmt("k_u=%.6f", k_u) + fmt(" settled=%.6f", settled) + fmt(" tau=%.4f s", tau)};
}

Outcome lyapunov_certification() {
  const ParamsFile params = parse_params(read_text_file(kScenarios / "params.yaml"));
  const GainSpec spec = parse_gain_spec(read_text_file(kScenarios / "gains_grid.yaml"));
  const LinearModel lin = linearize(params.airship, params.trim.speed, params.trim.thrust);
  const auto found = search_vr_gains(lin, *spec.grid);
  bool ok = found.has_value();
  std::string detail = "no certified pair";
  if (found) {
    const LyapunovCertificate& c = found->certificate;
    ok = c.residual < 1e-10 && c.min_eigenvalue > 0.0;
    detail = fmt("k1=%g", found->k1) + fmt(" k2=%g", found->k2) + fmt(" residual=%.1e", c.residual) +
             fmt(" min_eig=%.3g", c.min_eigenvalue);
  }
  Eigen::Matrix2d unstable;
  unstable << 1, 0, 0, -2;
  bool rejected = false;
  try {
    rejected = !lyapunov_certify(unstable).valid();
  } catch (const Error&) {
    rejected = true;
  }
  detail += std::string(" diag(1,-2)=") + (rejected ? "rejected" : "certified");
  return {ok && rejected, detail};
}

Outcome smc_convergence() {
  const SimResult res = run_scenario(load_scenario(kScenarios / "heading_step.yaml"));
  const double reach = res.summary.sliding_reach_time;
  const double bound = res.summary.reaching_time_bound;
  std::size_t violations = 0;
  for (const SimRecord& r : res.records) {
    for (int i = 0; i < 3; ++i) {
      if (r.sliding[i] != 0.0 && !(r.lyapunov_rate[i] < 0.0)) ++violations;
    }
  }
  const bool ok = reach >= 0.0 && reach <= 1.1 * bound && violations == 0;
  return {ok, fmt("reach=%.3f s", reach) + fmt(" bound=%.3f s", bound) +
                  fmt(" Vdot_violations=%.0f", static_cast<double>(violations))};
}

Outcome model_equivalence() {
  AirshipParams p = AirshipParams::prototype();
  p.Ixz = 0.0;
  p.drag_coefficient = 0.05;
  p.lift_slope = 0.3;
  p.moment_slope = 0.1;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> speed(0.05, 2.0), small(-0.5, 0.5), ang(-kPi, kPi),
      defl(-kPi / 2, kPi / 2), thrust(0.0, 0.051);
  const int compared[] = {0, 1, 2, 5, 6, 7, 8, 9, 10, 11};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    BodyState s;
    s.u = speed(rng);
    s.v = small(rng);
    s.w = small(rng);
    s.r = small(rng);
    s.x_g = small(rng);
    s.y_g = small(rng);
    s.h = speed(rng);
    s.att.psi = ang(rng);
    const ThrusterCommand cmd{thrust(rng), defl(rng), 0.0};
    const auto full = full_derivatives(p, s, cmd).to_vector();
    const auto planar = planar_derivatives(p, s, cmd).to_vector();
    for (int c : compared) worst = std::max(worst, std::abs(full[c] - planar[c]));
  }
  return {worst <= 1e-9, fmt("states=100 max_abs_diff=%.2e", worst)};
}

Outcome cruise_speed() {
  const SimResult res = run_scenario(load_scenario(kScenarios / "cruise.yaml"));
  const auto& recs = res.records;
  const double final_u = recs.back().state.u;
  // Steady: speed change over the last 5 s below 1 %.
  const auto earlier = std::find_if(recs.begin(), recs.end(),
                                    [&](const SimRecord& r) { return r.t >= recs.back().t - 5.0; });
  const double drift = std::abs(final_u - earlier->state.u) / final_u;
  const bool ok = final_u >= 0.1 && final_u <= 0.6 && drift < 0.01;
  return {ok, fmt("steady_speed=%.4f m/s", final_u) + fmt(" drift_5s=%.2e", drift)};
}

double decay_error(double dt) {
  using Vec1 = Eigen::Matrix<double, 1, 1>;
  Vec1 x = Vec1::Ones();
  const int n = static_cast<int>(std::lround(1.0 / dt));
  for (int i = 0; i < n; ++i) x = integrate_step([](const Vec1& y) { return Vec1(-y); }, x, dt);
  return std::abs(x[0] - std::exp(-1.0));
}

Outcome determinism_and_order() {
  const Scenario sc = load_scenario(kScenarios / "cruise_throttle.yaml");
  std::ostringstream a, b;
  write_csv(a, run_scenario(sc).records);
  write_csv(b, run_scenario(sc).records);
  const bool identical = a.str() == b.str();
  const double order = std::log2(decay_error(0.1) / decay_error(0.05));
  const double order_fine = std::log2(decay_error(0.05) / decay_error(0.025));
  const bool ok = identical && order >= 3.5 && order_fine >= 3.5;
  return {ok, std::string("rerun_identical=") + (identical ? "yes" : "no") +
                  fmt(" order=%.3f", order) + fmt(" order_fine=%.3f", order_fine)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"buoyancy budget", buoyancy_budget},
      {"thrust-to-weight", thrust_to_weight_ratios},
      {"thrust maps", thrust_maps},
      {"collision integral", collision_integral},
      {"linearization fidelity", linearization_fidelity},
      {"speed-loop gain and step", speed_loop_gain},
      {"Lyapunov certification", lyapunov_certification},
      {"sliding-mode convergence", smc_convergence},
      {"full/planar equivalence", model_equivalence},
      {"cruise speed bracket", cruise_speed},
      {"determinism and RK4 order", determinism_and_order},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += !out.pass;
    std::printf("%s %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
