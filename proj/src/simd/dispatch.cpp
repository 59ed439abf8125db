#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cpsa/simd/kernels.hpp"

namespace cpsa::simd {

namespace {

Isa initial_isa() {
  if (const char* forced = std::getenv("CPSA_SIMD")) {
    const std::string name = forced;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (name == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__) && defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("SIMD variant not supported on this CPU: " + std::string(isa_name(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

std::size_t min_plus_relax(std::span<double> row, double via, std::span<const double> pivot) {
  switch (active_isa()) {
    case Isa::avx2: return avx2::min_plus_relax(row, via, pivot);
    case Isa::neon: return neon::min_plus_relax(row, via, pivot);
    case Isa::scalar: break;
  }
  return scalar::min_plus_relax(row, via, pivot);
}

std::size_t count_in_cap(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> zs, double cx, double cy, double cz,
                         double threshold) {
  switch (active_isa()) {
    case Isa::avx2: return avx2::count_in_cap(xs, ys, zs, cx, cy, cz, threshold);
    case Isa::neon: return neon::count_in_cap(xs, ys, zs, cx, cy, cz, threshold);
    case Isa::scalar: break;
  }
  return scalar::count_in_cap(xs, ys, zs, cx, cy, cz, threshold);
}

}  // namespace cpsa::simd
