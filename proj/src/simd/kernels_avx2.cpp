#include "cpsa/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <bit>

namespace cpsa::simd::avx2 {

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  const std::size_t n = row.size();
  const __m256d v_via = _mm256_set1_pd(via);
  std::size_t improved = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d cur = _mm256_loadu_pd(row.data() + j);
    const __m256d cand = _mm256_add_pd(v_via, _mm256_loadu_pd(pivot.data() + j));
    const __m256d lt = _mm256_cmp_pd(cand, cur, _CMP_LT_OQ);
    _mm256_storeu_pd(row.data() + j, _mm256_blendv_pd(cur, cand, lt));
    improved += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(lt))));
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
  const __m256d vx = _mm256_set1_pd(cx);
  const __m256d vy = _mm256_set1_pd(cy);
  const __m256d vz = _mm256_set1_pd(cz);
  const __m256d vt = _mm256_set1_pd(threshold);
  std::size_t inside = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dot = _mm256_mul_pd(_mm256_loadu_pd(xs.data() + i), vx);
    dot = _mm256_add_pd(dot, _mm256_mul_pd(_mm256_loadu_pd(ys.data() + i), vy));
    dot = _mm256_add_pd(dot, _mm256_mul_pd(_mm256_loadu_pd(zs.data() + i), vz));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(dot, vt, _CMP_GE_OQ));
    inside += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
    double dot = xs[i] * cx;
    dot = dot + ys[i] * cy;
    dot = dot + zs[i] * cz;
    inside += dot >= threshold ? 1 : 0;
  }
  return inside;
}

}  // namespace cpsa::simd::avx2

#else

namespace cpsa::simd::avx2 {

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  return scalar::min_plus_relax(row, via, pivot);
}

std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold) {
  return scalar::count_in_cap(xs, ys, zs, cx, cy, cz, threshold);
}

}  // namespace cpsa::simd::avx2

#endif
