#include "pubsim/airframe.hpp"

#include "pubsim/error.hpp"

namespace pubsim {

namespace {

void validate(const EnvelopeGeometry& g) {
  if (!(g.semi_axis_a > 0.0 && g.semi_axis_b > 0.0 && g.semi_axis_c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "envelope semi-axes must be positive");
  }
  if (!(g.envelope_mass >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "envelope mass must be non-negative");
  }
}

}  // namespace

EnvelopeGeometry EnvelopeGeometry::from_length_and_diameter(double length, double diameter,
                                                            double envelope_mass) {
  return EnvelopeGeometry{length / 2.0, diameter / 2.0, diameter / 2.0, envelope_mass};
}

EnvelopeGeometry prototype_envelope() {
  return EnvelopeGeometry::from_length_and_diameter(1.97, 0.51, 0.07936);
}

double ellipsoid_volume(const EnvelopeGeometry& geom) {
  validate(geom);
  return 4.0 / 3.0 * kPi * geom.semi_axis_a * geom.semi_axis_b * geom.semi_axis_c;
}

LiftBudget lift_budget(const EnvelopeGeometry& geom, double lift_per_liter) {
  if (!(lift_per_liter > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lift per litre must be positive");
  }
  LiftBudget out;
  out.volume = ellipsoid_volume(geom);
  out.gross_lift_mass = out.volume * 1e3 * lift_per_liter;
  out.net_lift_mass = out.gross_lift_mass - geom.envelope_mass;
  out.negative_net_lift = out.net_lift_mass < 0.0;
  return out;
}

Wrench buoyancy_wrench(const BuoyancyConfig& cfg, const AttitudeAngles& att) {
  const Vec3 force = ground_to_body(att) * Vec3{0.0, 0.0, -cfg.weight_G};
  const Vec3 arm{0.0, 0.0, -cfg.cb_to_cm_distance_d};
  return Wrench{force, arm.cross(force), Frame::Body};
}

}  // namespace pubsim
