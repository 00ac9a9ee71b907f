#pragma once

#include "pubsim/frames.hpp"
#include "pubsim/types.hpp"

namespace pubsim {

/// Ellipsoidal envelope. Semi-axes in m, envelope mass in kg.
struct EnvelopeGeometry {
  double semi_axis_a = 0.0;
  double semi_axis_b = 0.0;
  double semi_axis_c = 0.0;
  double envelope_mass = 0.0;

  /// Prolate envelope from overall length and maximum diameter.
  static EnvelopeGeometry from_length_and_diameter(double length, double diameter,
                                                   double envelope_mass);
};

/// Aluminium-film prototype envelope: 1.97 m long, 51 cm diameter, 79.36 g.
EnvelopeGeometry prototype_envelope();

struct LiftBudget {
  double volume = 0.0;           // m^3
  double gross_lift_mass = 0.0;  // kg
  double net_lift_mass = 0.0;    // kg, gross minus envelope
  bool negative_net_lift = false;
};

/// Helium lift per litre at room conditions, kg/L.
inline constexpr double kDefaultLiftPerLiter = 1.11e-3;

/// Static buoyancy load. weight_G is the magnitude of the vertical static
/// force (N); the buoyancy centre sits a distance d above the mass centre,
/// i.e. at (0, 0, -d) in body axes (z down).
struct BuoyancyConfig {
  double weight_G = 0.0;
  double cb_to_cm_distance_d = 0.0;
};

/// V = 4/3 pi a b c.
double ellipsoid_volume(const EnvelopeGeometry& geom);

/// Gross and net lift. A heavy envelope is flagged, not rejected.
LiftBudget lift_budget(const EnvelopeGeometry& geom,
                       double lift_per_liter = kDefaultLiftPerLiter);

/// F = L_bg (0, 0, -G), M = (0, 0, -d) x F, body frame.
Wrench buoyancy_wrench(const BuoyancyConfig& cfg, const AttitudeAngles& att);

}  // namespace pubsim
