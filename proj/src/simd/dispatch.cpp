#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nlslab/simd/kernels.hpp"

namespace nlslab::simd {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(NLSLAB_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("requested SIMD variant is not available");
  switch (isa) {
#if defined(NLSLAB_HAVE_AVX2)
    case Isa::avx2:
      return detail::avx2_table;
#endif
    default:
      return detail::scalar_table;
  }
}

namespace {
const KernelTable& select() {
  if (const char* forced = std::getenv("NLSLAB_SIMD")) {
    if (std::string(forced) == "scalar") return detail::scalar_table;
  }
  if (isa_available(Isa::avx2)) return kernels(Isa::avx2);
  return detail::scalar_table;
}
}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

}  // namespace nlslab::simd
