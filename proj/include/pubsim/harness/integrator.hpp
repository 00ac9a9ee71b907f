#pragma once

#include <cmath>
#include <string>

#include "pubsim/error.hpp"

namespace pubsim {

/// Throws NonFiniteState naming the first non-finite component. `names`, if
/// given, must have one entry per component.
template <typename Vector>
void require_finite(const Vector& x, const char* const* names = nullptr) {
  for (decltype(x.size()) i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      const std::string name = names ? names[i] : "x[" + std::to_string(i) + "]";
      throw Error(ErrorCode::NonFiniteState, "non-finite state component " + name);
    }
  }
}

/// One classic fourth-order Runge-Kutta step of x_dot = f(x).
template <typename Vector, typename Derivative>
Vector integrate_step(Derivative&& f, const Vector& x, double dt,
                      const char* const* names = nullptr) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "integrate_step: dt must be > 0");
  const Vector k1 = f(x);
  const Vector k2 = f(Vector(x + 0.5 * dt * k1));
  const Vector k3 = f(Vector(x + 0.5 * dt * k2));
  const Vector k4 = f(Vector(x + dt * k3));
  Vector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(next, names);
  return next;
}

}  // namespace pubsim
