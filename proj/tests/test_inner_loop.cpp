#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "pubsim/error.hpp"
#include "pubsim/harness/simulation.hpp"
#include "pubsim/inner_loop.hpp"

using namespace pubsim;

namespace {

AirshipParams prototype_params() {
  AirshipParams p = AirshipParams::prototype();
  p.mass = 0.2978;
  p.air_density = 1.205;
  p.drag_coefficient = 0.0071;
  return p;
}

bool hurwitz(const Eigen::Matrix2d& a) {
  const auto ev = a.eigenvalues();
  return ev[0].real() < 0.0 && ev[1].real() < 0.0;
}

}  // namespace

TEST_CASE("linearize with the prototype numbers") {
  const AirshipParams p = prototype_params();
  const LinearModel m = linearize(p, 1.0, 0.0114);
  CHECK(m.B(0, 0) == doctest::Approx(3.3580).epsilon(1e-4));
  CHECK(m.A(0, 0) == doctest::Approx(-0.02873).epsilon(1e-3));
  CHECK(m.A(1, 3) == -1.0);
  CHECK(m.A(3, 3) == doctest::Approx(-p.yaw_damping_C2 / p.Iz));
  CHECK(m.A(1, 1) == doctest::Approx(p.air_density * p.lift_slope / (2 * p.mass)));
  CHECK(m.A(2, 2) == m.A(1, 1));
  CHECK(m.A(3, 1) ==
        doctest::Approx(p.air_density * p.reference_chord * p.moment_slope / (2 * p.mass)));
  CHECK(m.B(1, 1) == doctest::Approx(0.0114 / p.mass));
  CHECK(m.B(2, 2) == doctest::Approx(-0.0114 / p.mass));
  CHECK(m.B(3, 1) == doctest::Approx(p.thruster_sx * 0.0114 / p.Iz));
  int nonzero = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) nonzero += m.B(i, j) != 0.0;
  CHECK(nonzero == 4);

  const LinearModel idle = linearize(p, 1.0, 0.0);
  CHECK(idle.B.col(1).norm() == 0.0);
  CHECK(idle.B.col(2).norm() == 0.0);
  CHECK_THROWS_AS(linearize(p, 0.0, 0.01), Error);
}

TEST_CASE("finite-difference Jacobian of the full model at trim") {
  AirshipParams p = prototype_params();
  p.Ixz = 0.0;
  const double V = 0.5, T = 0.0114, eps = 1e-5;
  const LinearModel lin = linearize(p, V, T);
  BodyState trim;
  trim.u = V;
  trim.h = 1.8;
  const ThrusterCommand cmd0{T, 0.0, 0.0};
  const int rows[4] = {0, 1, 2, 5};  // u, v, w, r in the state vector

  auto deriv = [&](const BodyState& s, const ThrusterCommand& c) {
    return full_derivatives(p, s, c).to_vector();
  };
  Eigen::Matrix4d A_fd;
  for (int j = 0; j < 4; ++j) {
    BodyState plus = trim, minus = trim;
    auto xp = plus.to_vector(), xm = minus.to_vector();
    xp[rows[j]] += eps;
    xm[rows[j]] -= eps;
    const auto d = (deriv(BodyState::from_vector(xp), cmd0) - deriv(BodyState::from_vector(xm), cmd0)) / (2 * eps);
    for (int i = 0; i < 4; ++i) A_fd(i, j) = d[rows[i]];
  }
  Eigen::Matrix<double, 4, 3> B_fd;
  for (int j = 0; j < 3; ++j) {
    ThrusterCommand cp = cmd0, cm = cmd0;
    (j == 0 ? cp.thrust : j == 1 ? cp.delta_y : cp.delta_p) += eps;
    (j == 0 ? cm.thrust : j == 1 ? cm.delta_y : cm.delta_p) -= eps;
    const auto d = (deriv(trim, cp) - deriv(trim, cm)) / (2 * eps);
    for (int i = 0; i < 4; ++i) B_fd(i, j) = d[rows[i]];
  }

  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  CHECK(rel(A_fd(0, 0), lin.A(0, 0)) < 1e-3);
  CHECK(rel(A_fd(1, 3), lin.A(1, 3)) < 1e-3);
  CHECK(rel(A_fd(3, 3), lin.A(3, 3)) < 1e-3);
  CHECK(rel(B_fd(0, 0), lin.B(0, 0)) < 1e-3);
  CHECK(rel(B_fd(1, 1), lin.B(1, 1)) < 1e-3);
  CHECK(rel(B_fd(2, 2), lin.B(2, 2)) < 1e-3);
  CHECK(rel(B_fd(3, 1), lin.B(3, 1)) < 1e-3);

  // Structural zeros of the linear model stay zero.
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 3}, {3, 0},
                      {3, 2}}) {
    CAPTURE(i);
    CAPTURE(j);
    CHECK(std::abs(A_fd(i, j)) < 1e-9);
  }
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {3, 0}, {3, 2}}) {
    CAPTURE(i);
    CAPTURE(j);
    CHECK(std::abs(B_fd(i, j)) < 1e-9);
  }

  // The lift channels follow the closures of the nonlinear model itself.
  const double q_slope = p.air_density * V / (2 * p.mass);
  CHECK(A_fd(2, 2) == doctest::Approx(q_slope * (p.drag_coefficient - p.lift_slope)).epsilon(1e-3));
  CHECK(std::abs(A_fd(1, 1)) < 1e-9);
  CHECK(std::abs(A_fd(3, 1)) < 1e-9);
}

TEST_CASE("unity-DC speed gain") {
  CHECK(design_ku_unity_dc(3.3580, 0.0575) == doctest::Approx(0.98288).epsilon(1e-5));
  CHECK(design_ku_unity_dc(3.3580, 0.0) == 1.0);
  CHECK(design_ku_unity_dc(3.3580, 3.3580) == 0.0);
  CHECK_THROWS_AS(design_ku_unity_dc(0.0, 0.1), Error);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> num(0.1, 10.0), pole(0.0, 0.1);
  for (int i = 0; i < 100; ++i) {
    FirstOrderLoop loop{num(rng), pole(rng), 0.0};
    loop.k_u = design_ku_unity_dc(loop.numerator, loop.pole);
    CHECK(std::abs(loop.dc_gain() - 1.0) < 1e-12);
    CHECK(loop.rate() > 0.0);
  }
}

TEST_CASE("k_w lower bound") {
  AirshipParams p = prototype_params();
  p.lift_slope = 0.0;
  CHECK(kw_lower_bound(p, 1.0, 0.05) == 0.0);
  p.lift_slope = 0.1;
  CHECK(kw_lower_bound(p, 1.0, 0.05) == doctest::Approx(1.205));
  CHECK(kw_lower_bound(p, 1.0, 0.10) == doctest::Approx(kw_lower_bound(p, 1.0, 0.05) / 2));
  try {
    kw_lower_bound(p, 1.0, 0.0);
    FAIL("expected DivisionByZeroThrust");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZeroThrust);
  }
}

TEST_CASE("closed v-r loop") {
  const LinearModel m = linearize(prototype_params(), 0.5, 0.0114);
  CHECK(closed_loop_vr(m, 0, 0) == m.vr_block());
  const double k1 = 0.7, k2 = -1.3;
  const Eigen::Matrix2d a = closed_loop_vr(m, k1, k2);
  const double b2 = m.B(1, 1), b4 = m.B(3, 1);
  CHECK(a(0, 0) == doctest::Approx(m.A(1, 1) - b2 * k1));
  CHECK(a(0, 1) == doctest::Approx(m.A(1, 3) - b2 * k2));
  CHECK(a(1, 0) == doctest::Approx(m.A(3, 1) - b4 * k1));
  CHECK(a(1, 1) == doctest::Approx(m.A(3, 3) - b4 * k2));
}

TEST_CASE("Lyapunov certificate examples") {
  const LyapunovCertificate neg_i = lyapunov_certify(-Eigen::Matrix2d::Identity());
  CHECK(neg_i.M.isApprox(0.5 * Eigen::Matrix2d::Identity()));
  CHECK(neg_i.residual == 0.0);
  CHECK(neg_i.valid());

  Eigen::Matrix2d d;
  d << -1, 0, 0, -2;
  const LyapunovCertificate diag = lyapunov_certify(d);
  CHECK(diag.M(0, 0) == doctest::Approx(0.5));
  CHECK(diag.M(1, 1) == doctest::Approx(0.25));
  CHECK(diag.M(0, 1) == doctest::Approx(0.0));

  Eigen::Matrix2d unstable;
  unstable << 1, 0, 0, -2;
  const LyapunovCertificate bad = lyapunov_certify(unstable);
  CHECK(bad.M(0, 0) == doctest::Approx(-0.5));
  CHECK_FALSE(bad.valid());

  Eigen::Matrix2d center;
  center << 0, 1, -1, 0;
  try {
    lyapunov_certify(center);
    FAIL("expected SingularLyapunov");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularLyapunov);
  }
}

TEST_CASE("Lyapunov certification is sound on random matrices") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  int certified = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    Eigen::Matrix2d a;
    a << entry(rng), entry(rng), entry(rng), entry(rng);
    LyapunovCertificate cert;
    try {
      cert = lyapunov_certify(a);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularLyapunov);
      CHECK_FALSE(hurwitz(a));
      continue;
    }
    if (hurwitz(a)) {
      CHECK(cert.residual < 1e-10);
      CHECK(cert.min_eigenvalue > 0.0);
      CHECK((cert.M - cert.M.transpose()).norm() == 0.0);
      ++certified;
    } else {
      CHECK_FALSE(cert.valid());
      ++rejected;
    }
  }
  CHECK(certified > 100);
  CHECK(rejected > 100);
}

TEST_CASE("gain grid search returns the first certified pair") {
  const LinearModel m = linearize(prototype_params(), 0.5, 0.0114);
  const GainGrid grid{-2.0, 2.0, 9, -2.0, 2.0, 9};
  const auto found = search_vr_gains(m, grid);
  REQUIRE(found.has_value());
  CHECK(found->certificate.valid());
  CHECK(hurwitz(found->a_cl));
  // No earlier grid node certifies.
  std::size_t idx = 0;
  for (std::size_t i = 0; i < 9 && idx + 1 < found->candidates_tried; ++i) {
    for (std::size_t j = 0; j < 9 && idx + 1 < found->candidates_tried; ++j, ++idx) {
      const Eigen::Matrix2d a = closed_loop_vr(m, -2.0 + 0.5 * i, -2.0 + 0.5 * j);
      CHECK_FALSE(hurwitz(a));
    }
  }
  const GainGrid hopeless{5.0, 5.0, 1, 5.0, 5.0, 1};
  // No thrust, so no yaw authority; the open v-r block is made unstable.
  LinearModel idle = linearize(prototype_params(), 0.5, 0.0);
  idle.A(1, 1) = 1.0;
  CHECK_FALSE(search_vr_gains(idle, hopeless).has_value());
}

TEST_CASE("inner-loop feedback laws") {
  const GainSet g{0.98, 2.0, 0.5, 0.25};
  const TrimPoint trim{0.5, 0.0114, 0.01, -0.02};
  InnerLoopInput in;
  in.du = 0.1;
  in.dv = 0.2;
  in.dw = -0.05;
  in.dr = 0.4;
  in.thrust_feedforward = 0.001;
  in.pitch_feedforward = 0.003;
  const ThrusterCommand c = inner_loop_command(g, trim, in);
  CHECK(c.thrust == doctest::Approx(0.0114 - 0.098 + 0.001));
  CHECK(c.delta_p == doctest::Approx(-0.02 - 0.1 + 0.003));
  CHECK(c.delta_y == doctest::Approx(0.01 - 0.1 - 0.1));
}

TEST_CASE("speed-loop step response") {
  const double ku = design_ku_unity_dc(3.3580, 0.0575);
  const FirstOrderLoop loop{3.3580, 0.0575, ku};
  const auto analytic = step_response(loop, 5.0, 1e-3);
  CHECK(analytic.size() == 5001);
  CHECK(analytic.back().y == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(first_order_time_constant(analytic, loop.dc_gain()) ==
        doctest::Approx(0.2978).epsilon(1e-3));

  const FirstOrderLoop open{3.3580, 0.0575, 0.0};
  CHECK(open.dc_gain() == doctest::Approx(58.4).epsilon(1e-3));

  const auto sim = simulate_speed_loop(loop, 5.0, 1e-3);
  REQUIRE(sim.size() == analytic.size());
  for (std::size_t i = 0; i < sim.size(); i += 97) {
    CHECK(std::abs(sim[i].y - analytic[i].y) < 1e-10);
  }
  CHECK_THROWS_AS(step_response(loop, 1.0, 0.0), Error);
}

TEST_CASE("reports are key=value lines") {
  const LinearModel m = linearize(prototype_params(), 1.0, 0.0114);
  const std::string r = format_report(m);
  CHECK(r.find("A11=") != std::string::npos);
  CHECK(r.find("B42=") != std::string::npos);
  const std::string c = format_report(lyapunov_certify(-Eigen::Matrix2d::Identity()), 1, 2);
  CHECK(c.find("certified=true") != std::string::npos);
  CHECK(c.find("m1=0.5\n") != std::string::npos);
}
