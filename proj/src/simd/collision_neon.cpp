#include "pubsim/error.hpp"
#include "pubsim/simd/collision_kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace pubsim::simd::detail {

void accumulate_neon(const VelocityBlock& block, const double slip[3], MomentSums& sums) {
  const std::size_t n = block.size();
  const std::size_t vec_end = n - n % 2;

  const float64x2_t ux = vdupq_n_f64(slip[0]);
  const float64x2_t uy = vdupq_n_f64(slip[1]);
  const float64x2_t uz = vdupq_n_f64(slip[2]);
  const float64x2_t half = vdupq_n_f64(0.5);
  float64x2_t sx = vdupq_n_f64(0.0), sy = vdupq_n_f64(0.0), sz = vdupq_n_f64(0.0);
  float64x2_t qx = vdupq_n_f64(0.0), qy = vdupq_n_f64(0.0), qz = vdupq_n_f64(0.0);

  for (std::size_t i = 0; i < vec_end; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(&block.air_x[i]), vld1q_f64(&block.ion_x[i]));
    const float64x2_t dy = vsubq_f64(vld1q_f64(&block.air_y[i]), vld1q_f64(&block.ion_y[i]));
    const float64x2_t dz = vsubq_f64(vld1q_f64(&block.air_z[i]), vld1q_f64(&block.ion_z[i]));
    const float64x2_t px = vaddq_f64(ux, dx), py = vaddq_f64(uy, dy), pz = vaddq_f64(uz, dz);
    const float64x2_t mx = vsubq_f64(ux, dx), my = vsubq_f64(uy, dy), mz = vsubq_f64(uz, dz);
    const float64x2_t np = vsqrtq_f64(vfmaq_f64(vfmaq_f64(vmulq_f64(pz, pz), py, py), px, px));
    const float64x2_t nm = vsqrtq_f64(vfmaq_f64(vfmaq_f64(vmulq_f64(mz, mz), my, my), mx, mx));
    const float64x2_t hx = vmulq_f64(half, vfmaq_f64(vmulq_f64(nm, mx), np, px));
    const float64x2_t hy = vmulq_f64(half, vfmaq_f64(vmulq_f64(nm, my), np, py));
    const float64x2_t hz = vmulq_f64(half, vfmaq_f64(vmulq_f64(nm, mz), np, pz));
    sx = vaddq_f64(sx, hx);
    sy = vaddq_f64(sy, hy);
    sz = vaddq_f64(sz, hz);
    qx = vfmaq_f64(qx, hx, hx);
    qy = vfmaq_f64(qy, hy, hy);
    qz = vfmaq_f64(qz, hz, hz);
  }

  sums.sum[0] += vaddvq_f64(sx);
  sums.sum[1] += vaddvq_f64(sy);
  sums.sum[2] += vaddvq_f64(sz);
  sums.sum_sq[0] += vaddvq_f64(qx);
  sums.sum_sq[1] += vaddvq_f64(qy);
  sums.sum_sq[2] += vaddvq_f64(qz);
  sums.count += vec_end;

  if (vec_end < n) {
    const std::size_t rest = n - vec_end;
    const VelocityBlock tail{block.air_x.subspan(vec_end, rest), block.air_y.subspan(vec_end, rest),
                             block.air_z.subspan(vec_end, rest), block.ion_x.subspan(vec_end, rest),
                             block.ion_y.subspan(vec_end, rest), block.ion_z.subspan(vec_end, rest)};
    accumulate_scalar(tail, slip, sums);
  }
}

}  // namespace pubsim::simd::detail

#else

namespace pubsim::simd::detail {

void accumulate_neon(const VelocityBlock&, const double[3], MomentSums&) {
  throw Error(ErrorCode::InvalidArgument, "NEON kernel not compiled into this build");
}

}  // namespace pubsim::simd::detail

#endif
