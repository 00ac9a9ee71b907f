#pragma once

#include <Eigen/Dense>

namespace pubsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Orthonormal, det = +1.
using RotationMatrix = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kStandardGravity = 9.80665;  // m/s^2, also gram-force conversion
inline constexpr double kBoltzmann = 1.380649e-23;   // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

constexpr double grams_force_to_newtons(double grams) {
  return grams * 1e-3 * kStandardGravity;
}
constexpr double newtons_to_grams_force(double newtons) {
  return newtons / kStandardGravity * 1e3;
}

enum class Frame { Body, Airflow, Ground };

/// Force/moment pair expressed in a single frame. Adding wrenches from
/// different frames is a contract violation and throws.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  Frame frame = Frame::Body;

  static Wrench zero(Frame frame = Frame::Body) {
    return Wrench{Vec3::Zero(), Vec3::Zero(), frame};
  }
};

Wrench operator+(const Wrench& a, const Wrench& b);

}  // namespace pubsim
