#include <cstdlib>
#include <cstring>

#include "oplab/simd/kernels.hpp"

namespace oplab::simd {

#ifdef OPLAB_HAVE_AVX2
namespace detail {
const KernelTable& avx2_table();
}

namespace {
bool avx2_supported() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = avx2_supported();
  return supported ? &detail::avx2_table() : nullptr;
}
#else
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

const KernelTable& select_kernels() {
  const char* forced = std::getenv("OPLAB_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_kernels();
  if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace oplab::simd
