#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace pubsim::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend backend) noexcept;

/// Whether this binary was built with, and the CPU supports, `backend`.
bool backend_available(Backend backend) noexcept;

/// Widest available backend. PUBSIM_SIMD=scalar|avx2|neon forces a choice.
Backend best_backend() noexcept;

/// One block of sampled velocity deviations (air about the slip velocity,
/// ions about zero). All six spans share a length.
struct VelocityBlock {
  std::span<const double> air_x, air_y, air_z;
  std::span<const double> ion_x, ion_y, ion_z;

  std::size_t size() const noexcept { return air_x.size(); }
};

/// Running sums of the antithetic integrand h = (|g+|g+ + |g-|g-)/2 with
/// g+- = u +- (w_air - w_ion), and of h^2 per component.
struct MomentSums {
  double sum[3] = {0.0, 0.0, 0.0};
  double sum_sq[3] = {0.0, 0.0, 0.0};
  std::size_t count = 0;
};

void accumulate_collision_moments(Backend backend, const VelocityBlock& block,
                                  const double slip[3], MomentSums& sums);

namespace detail {
void accumulate_scalar(const VelocityBlock& block, const double slip[3], MomentSums& sums);
void accumulate_avx2(const VelocityBlock& block, const double slip[3], MomentSums& sums);
void accumulate_neon(const VelocityBlock& block, const double slip[3], MomentSums& sums);
}  // namespace detail

}  // namespace pubsim::simd
