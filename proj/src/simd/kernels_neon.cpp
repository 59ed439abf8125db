#include "cpsa/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace cpsa::simd::neon {

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  const std::size_t n = row.size();
  const float64x2_t v_via = vdupq_n_f64(via);
  std::size_t improved = 0;
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t cur = vld1q_f64(row.data() + j);
    const float64x2_t cand = vaddq_f64(v_via, vld1q_f64(pivot.data() + j));
    const uint64x2_t lt = vcltq_f64(cand, cur);
    vst1q_f64(row.data() + j, vbslq_f64(lt, cand, cur));
    improved += static_cast<std::size_t>((vgetq_lane_u64(lt, 0) & 1U) + (vgetq_lane_u64(lt, 1) & 1U));
  }
  for (; j < n; ++j) {
    const double cand = via + pivot[j];
    if (cand < row[j]) {
      row[j] = cand;
      ++improved;
    }
  }
  return improved;
}

std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold) {
  const std::size_t n = xs.size();
  const float64x2_t vx = vdupq_n_f64(cx);
  const float64x2_t vy = vdupq_n_f64(cy);
  const float64x2_t vz = vdupq_n_f64(cz);
  const float64x2_t vt = vdupq_n_f64(threshold);
  std::size_t inside = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // vmulq + vaddq, never vfmaq: must round like the scalar reference.
    float64x2_t dot = vmulq_f64(vld1q_f64(xs.data() + i), vx);
    dot = vaddq_f64(dot, vmulq_f64(vld1q_f64(ys.data() + i), vy));
    dot = vaddq_f64(dot, vmulq_f64(vld1q_f64(zs.data() + i), vz));
    const uint64x2_t ge = vcgeq_f64(dot, vt);
    inside += static_cast<std::size_t>((vgetq_lane_u64(ge, 0) & 1U) + (vgetq_lane_u64(ge, 1) & 1U));
  }
  for (; i < n; ++i) {
    double dot = xs[i] * cx;
    dot = dot + ys[i] * cy;
    dot = dot + zs[i] * cz;
    inside += dot >= threshold ? 1 : 0;
  }
  return inside;
}

}  // namespace cpsa::simd::neon

#else

namespace cpsa::simd::neon {

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  return scalar::min_plus_relax(row, via, pivot);
}

std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold) {
  return scalar::count_in_cap(xs, ys, zs, cx, cy, cz, threshold);
}

}  // namespace cpsa::simd::neon

#endif
