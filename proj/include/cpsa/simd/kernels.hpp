#pragma once

// Data-parallel inner loops used by the geometry stage.
//
// Every kernel has a scalar reference implementation plus vectorised
// variants (AVX2 on x86-64, NEON on AArch64). The variant is chosen once at
// startup from the host CPU and can be pinned with set_active_isa() or the
// CPSA_SIMD environment variable ("scalar", "avx2", "neon").
//
// All variants are bit-identical to the scalar reference: min-plus relaxation
// uses only correctly rounded add/min, and the cap test evaluates the dot
// product with the same mul/add order and no fused multiply-add.

#include <cstddef>
#include <span>
#include <string_view>

namespace cpsa::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// Best variant the running CPU supports.
Isa detected_isa();

bool isa_supported(Isa isa);

Isa active_isa();

// Throws std::invalid_argument when the CPU (or build) lacks the variant.
void set_active_isa(Isa isa);

// row[j] = min(row[j], via + pivot[j]) for every j. Returns the number of
// entries that strictly decreased.
std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot);

// Number of points (xs[i], ys[i], zs[i]) whose dot product with
// (cx, cy, cz) is >= threshold.
std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold);

// Per-ISA entry points, exposed for equivalence testing.
namespace scalar {
std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot);
std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold);
}  // namespace scalar

namespace avx2 {
std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot);
std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold);
}  // namespace avx2

namespace neon {
std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot);
std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold);
}  // namespace neon

}  // namespace cpsa::simd
