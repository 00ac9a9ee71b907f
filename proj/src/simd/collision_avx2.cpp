#include "pubsim/error.hpp"
#include "pubsim/simd/collision_kernels.hpp"

#if defined(PUBSIM_HAVE_AVX2) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace pubsim::simd::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void accumulate_avx2(const VelocityBlock& block, const double slip[3], MomentSums& sums) {
  const std::size_t n = block.size();
  const std::size_t vec_end = n - n % 4;

  const __m256d ux = _mm256_set1_pd(slip[0]);
  const __m256d uy = _mm256_set1_pd(slip[1]);
  const __m256d uz = _mm256_set1_pd(slip[2]);
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd(), sz = _mm256_setzero_pd();
  __m256d qx = _mm256_setzero_pd(), qy = _mm256_setzero_pd(), qz = _mm256_setzero_pd();

  for (std::size_t i = 0; i < vec_end; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&block.air_x[i]), _mm256_loadu_pd(&block.ion_x[i]));
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&block.air_y[i]), _mm256_loadu_pd(&block.ion_y[i]));
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&block.air_z[i]), _mm256_loadu_pd(&block.ion_z[i]));
    const __m256d px = _mm256_add_pd(ux, dx), py = _mm256_add_pd(uy, dy), pz = _mm256_add_pd(uz, dz);
    const __m256d mx = _mm256_sub_pd(ux, dx), my = _mm256_sub_pd(uy, dy), mz = _mm256_sub_pd(uz, dz);
    const __m256d np = _mm256_sqrt_pd(
        _mm256_fmadd_pd(px, px, _mm256_fmadd_pd(py, py, _mm256_mul_pd(pz, pz))));
    const __m256d nm = _mm256_sqrt_pd(
        _mm256_fmadd_pd(mx, mx, _mm256_fmadd_pd(my, my, _mm256_mul_pd(mz, mz))));
    const __m256d hx = _mm256_mul_pd(half, _mm256_fmadd_pd(np, px, _mm256_mul_pd(nm, mx)));
    const __m256d hy = _mm256_mul_pd(half, _mm256_fmadd_pd(np, py, _mm256_mul_pd(nm, my)));
    const __m256d hz = _mm256_mul_pd(half, _mm256_fmadd_pd(np, pz, _mm256_mul_pd(nm, mz)));
    sx = _mm256_add_pd(sx, hx);
    sy = _mm256_add_pd(sy, hy);
    sz = _mm256_add_pd(sz, hz);
    qx = _mm256_fmadd_pd(hx, hx, qx);
    qy = _mm256_fmadd_pd(hy, hy, qy);
    qz = _mm256_fmadd_pd(hz, hz, qz);
  }

  sums.sum[0] += hsum(sx);
  sums.sum[1] += hsum(sy);
  sums.sum[2] += hsum(sz);
  sums.sum_sq[0] += hsum(qx);
  sums.sum_sq[1] += hsum(qy);
  sums.sum_sq[2] += hsum(qz);
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

void accumulate_avx2(const VelocityBlock&, const double[3], MomentSums&) {
  throw Error(ErrorCode::InvalidArgument, "AVX2 kernel not compiled into this build");
}

}  // namespace pubsim::simd::detail

#endif
