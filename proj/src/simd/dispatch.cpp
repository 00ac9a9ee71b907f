#include <cstdlib>
#include <string>

#include "pubsim/error.hpp"
#include "pubsim/simd/collision_kernels.hpp"

namespace pubsim::simd {

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(PUBSIM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend best_backend() noexcept {
  if (const char* forced = std::getenv("PUBSIM_SIMD")) {
    const std::string name(forced);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (name == to_string(b) && backend_available(b)) return b;
    }
  }
  if (backend_available(Backend::Avx2)) return Backend::Avx2;
  if (backend_available(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

void accumulate_collision_moments(Backend backend, const VelocityBlock& block,
                                  const double slip[3], MomentSums& sums) {
  const std::size_t n = block.size();
  if (block.air_y.size() != n || block.air_z.size() != n || block.ion_x.size() != n ||
      block.ion_y.size() != n || block.ion_z.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "velocity block spans differ in length");
  }
  if (!backend_available(backend)) {
    throw Error(ErrorCode::InvalidArgument,
                "SIMD backend " + std::string(to_string(backend)) + " not available");
  }
  switch (backend) {
    case Backend::Scalar: detail::accumulate_scalar(block, slip, sums); break;
    case Backend::Avx2: detail::accumulate_avx2(block, slip, sums); break;
    case Backend::Neon: detail::accumulate_neon(block, slip, sums); break;
  }
}

}  // namespace pubsim::simd
