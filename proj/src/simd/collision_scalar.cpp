#include <cmath>

#include "pubsim/simd/collision_kernels.hpp"

namespace pubsim::simd::detail {

// Reference kernel. The vector kernels must agree with it up to summation order.
void accumulate_scalar(const VelocityBlock& block, const double slip[3], MomentSums& sums) {
  const std::size_t n = block.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = block.air_x[i] - block.ion_x[i];
    const double dy = block.air_y[i] - block.ion_y[i];
    const double dz = block.air_z[i] - block.ion_z[i];
    const double px = slip[0] + dx, py = slip[1] + dy, pz = slip[2] + dz;
    const double mx = slip[0] - dx, my = slip[1] - dy, mz = slip[2] - dz;
    const double np = std::sqrt(px * px + py * py + pz * pz);
    const double nm = std::sqrt(mx * mx + my * my + mz * mz);
    const double h[3] = {0.5 * (np * px + nm * mx), 0.5 * (np * py + nm * my),
                         0.5 * (np * pz + nm * mz)};
    for (int c = 0; c < 3; ++c) {
      sums.sum[c] += h[c];
      sums.sum_sq[c] += h[c] * h[c];
    }
  }
  sums.count += n;
}

}  // namespace pubsim::simd::detail
