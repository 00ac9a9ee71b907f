#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "pubsim/error.hpp"
#include "pubsim/harness/integrator.hpp"
#include "pubsim/harness/scenario.hpp"
#include "pubsim/harness/servo.hpp"
#include "pubsim/harness/simulation.hpp"

using namespace pubsim;

namespace {

using Vec1 = Eigen::Matrix<double, 1, 1>;

Vec1 one(double v) {
  Vec1 x;
  x << v;
  return x;
}

double decay_error(double dt) {
  Vec1 x = one(1.0);
  const int n = static_cast<int>(std::lround(1.0 / dt));
  for (int i = 0; i < n; ++i) x = integrate_step([](const Vec1& y) { return Vec1(-y); }, x, dt);
  return std::abs(x[0] - std::exp(-1.0));
}

const std::string kHover = R"(format: pubsim-scenario/1
simulation: {model: planar, controller: open_loop, duration: 5, dt: 0.001, record_every: 50}
initial: {h: 1.8}
open_loop:
  input: thrust
  script:
    - [0, 0.0, 90, 90]
)";

Scenario open_loop_full(double thrust, double yaw_deg) {
  Scenario sc = parse_scenario(R"(format: pubsim-scenario/1
simulation: {model: full, controller: open_loop, duration: 4, dt: 0.002, record_every: 5, seed: 11}
initial: {h: 1.5}
servo: {slew_deg_per_s: 120}
disturbance: {yaw_noise_deg: 2.0}
open_loop:
  input: thrust
  script:
    - [0, 0.0, 90, 90]
)");
  sc.open_loop.script.push_back({1.0, thrust, yaw_deg, 90.0});
  return sc;
}

}  // namespace

TEST_CASE("integrator keeps a fixed point") {
  const Vec1 x = integrate_step([](const Vec1&) { return one(0.0); }, one(3.25), 0.1);
  CHECK(x[0] == 3.25);
}

TEST_CASE("integrator is exact for constant and linear rates") {
  Vec1 x = one(1.0);
  for (int i = 0; i < 10; ++i) x = integrate_step([](const Vec1&) { return one(0.5); }, x, 0.1);
  CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("integrator decay matches exp(-1)") {
  CHECK(decay_error(1e-3) < 1e-9);
}

TEST_CASE("integrator convergence order is four") {
  const double e1 = decay_error(0.1);
  const double e2 = decay_error(0.05);
  const double order = std::log2(e1 / e2);
  CAPTURE(order);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("integrator rejects non-finite states and bad steps") {
  Eigen::Vector2d x{1.0, 1.0};
  const char* names[] = {"alpha", "beta"};
  try {
    integrate_step(
        [](const Eigen::Vector2d& y) { return Eigen::Vector2d{0.0, y[1] / 0.0}; }, x, 0.1, names);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteState);
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  CHECK_THROWS_AS(integrate_step([](const Vec1& y) { return y; }, one(1.0), 0.0), Error);
}

TEST_CASE("servo map centres deflection at 90 degrees") {
  const ServoCommandMap map;
  ThrusterCommand cmd;
  ServoPositions pos = servo_map(cmd, map);
  CHECK(pos.yaw_deg == 90.0);
  CHECK(pos.pitch_deg == 90.0);
  CHECK_FALSE(pos.saturated);

  cmd.delta_y = kPi / 2;
  cmd.delta_p = -kPi / 4;
  pos = servo_map(cmd, map);
  CHECK(pos.yaw_deg == doctest::Approx(180.0));
  CHECK(pos.pitch_deg == doctest::Approx(45.0));
  CHECK(servo_to_deflection(pos.pitch_deg, map) == doctest::Approx(-kPi / 4));

  cmd.delta_y = 2.0;
  pos = servo_map(cmd, map);
  CHECK(pos.yaw_deg == 180.0);
  CHECK(pos.saturated);

  cmd.delta_y = std::nan("");
  CHECK_THROWS_AS(servo_map(cmd, map), Error);
  ServoCommandMap bad;
  bad.min_deg = 100.0;
  CHECK_THROWS_AS(servo_map(ThrusterCommand{}, bad), Error);
}

TEST_CASE("servo slew limit") {
  ServoCommandMap map;
  map.slew_deg_per_s = 60.0;
  const ServoPositions prev = servo_map(ThrusterCommand{}, map);
  ThrusterCommand cmd;
  cmd.delta_y = deg_to_rad(30.0);
  const ServoPositions pos = servo_map(cmd, map, &prev, 0.1);
  CHECK(pos.yaw_deg == doctest::Approx(96.0));
  CHECK(pos.slew_limited);
  const ServoPositions free = servo_map(cmd, map, &prev, 1.0);
  CHECK(free.yaw_deg == doctest::Approx(120.0));
  CHECK_FALSE(free.slew_limited);
}

TEST_CASE("hover scenario stays put with no flags") {
  const SimResult res = run_scenario(parse_scenario(kHover));
  REQUIRE(res.records.size() == 101);
  const BodyState::Vector x0 = res.records.front().state.to_vector();
  for (const SimRecord& r : res.records) {
    CHECK((r.state.to_vector() - x0).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(res.records.back().state.h == doctest::Approx(1.8));
  CHECK(res.summary.flags_seen == kFlagNone);
  CHECK(res.summary.max_speed < 1e-12);
}

TEST_CASE("simulation is deterministic to the byte") {
  const Scenario sc = open_loop_full(0.02, 120.0);
  std::ostringstream a, b, sa, sb;
  const SimResult r1 = run_scenario(sc);
  const SimResult r2 = run_scenario(sc);
  write_csv(a, r1.records);
  write_csv(b, r2.records);
  write_summary(sa, r1.summary);
  write_summary(sb, r2.summary);
  CHECK(a.str() == b.str());
  CHECK(sa.str() == sb.str());
  CHECK(a.str().rfind(csv_header(), 0) == 0);

  Scenario other = sc;
  other.seed = 12;
  std::ostringstream c;
  write_csv(c, run_scenario(other).records);
  CHECK(c.str() != a.str());
}

TEST_CASE("open-loop run reports servo slew and saturation") {
  const SimResult res = run_scenario(open_loop_full(0.08, 190.0));
  CHECK((res.summary.flags_seen & kFlagSlewLimited) != 0);
  CHECK((res.summary.flags_seen & kFlagServoSaturated) != 0);
  CHECK((res.summary.flags_seen & kFlagThrustSaturated) != 0);
  for (const SimRecord& r : res.records) {
    CHECK(r.command.thrust <= 0.051);
    CHECK(r.servo.yaw_deg <= 180.0);
  }
}

TEST_CASE("electrode spacing sets thrust and flags") {
  Scenario sc = parse_scenario(kHover);
  sc.open_loop.script = {{0.0, 0.04, 90.0, 90.0}};
  sc.duration = 0.5;

  sc.electrode_spacing = 0.0275;
  SimResult res = run_scenario(sc);
  CHECK((res.summary.flags_seen & kFlagExtrapolatedMap) != 0);
  CHECK((res.summary.flags_seen & kFlagThrustSaturated) != 0);
  CHECK(res.records.back().command.thrust == doctest::Approx(grams_force_to_newtons(1.19)).epsilon(1e-3));

  sc.electrode_spacing = 0.025;
  res = run_scenario(sc);
  CHECK((res.summary.flags_seen & kFlagPuncture) != 0);
  CHECK(res.records.back().command.thrust == 0.0);
  CHECK(res.summary.max_speed == 0.0);
}

TEST_CASE("linear speed loop step has the designed time constant") {
  Scenario sc = load_scenario(PUBSIM_SOURCE_DIR "/scenarios/u_step.yaml");
  const SimResult res = run_scenario(sc);
  const double a = sc.inner_loop.speed_loop->pole +
                   sc.inner_loop.speed_loop->numerator * sc.inner_loop.gains.k_u;
  CHECK(res.summary.speed_time_constant == doctest::Approx(1.0 / a).epsilon(0.01));
  CHECK(res.summary.final_speed_perturbation == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(res.summary.flags_seen == kFlagNone);
}

TEST_CASE("sliding-mode heading change") {
  const SimResult res = run_scenario(load_scenario(PUBSIM_SOURCE_DIR "/scenarios/heading_step.yaml"));
  CHECK(res.summary.sliding_reach_time > 0.0);
  CHECK(res.summary.sliding_reach_time <= res.summary.reaching_time_bound * 1.1);
  CHECK(std::abs(res.summary.final_heading_error) < 1e-3);
  double prev = res.records.front().lyapunov.sum();
  for (const SimRecord& r : res.records) {
    if (r.t > res.summary.sliding_reach_time) break;
    CHECK(r.lyapunov.sum() <= prev + 1e-12);
    CHECK(r.lyapunov_rate.sum() <= 1e-12);
    prev = r.lyapunov.sum();
  }
}

TEST_CASE("speed-loop helpers") {
  FirstOrderLoop loop;
  loop.k_u = design_ku_unity_dc(loop.numerator, loop.pole);
  const auto y = simulate_speed_loop(loop, 6.0, 1e-3);
  CHECK(y.back().y == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(first_order_time_constant(y, 1.0) == doctest::Approx(1.0 / loop.rate()).epsilon(1e-3));
  CHECK(first_order_time_constant(y, 5.0) == -1.0);
}

TEST_CASE("CSV header lists the fixed columns") {
  const std::string h = csv_header();
  CHECK(h.rfind("t,u,v,w", 0) == 0);
  CHECK(h.find("servo_yaw_deg") != std::string::npos);
  CHECK(h.find("flags") != std::string::npos);
}
