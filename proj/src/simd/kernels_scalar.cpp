#include "cpsa/simd/kernels.hpp"

namespace cpsa::simd::scalar {

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  std::size_t improved = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
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
  std::size_t inside = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dot = xs[i] * cx;
    dot = dot + ys[i] * cy;
    dot = dot + zs[i] * cz;
    inside += dot >= threshold ? 1 : 0;
  }
  return inside;
}

}  // namespace cpsa::simd::scalar
