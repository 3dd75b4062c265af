#include "pbec/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pbec::kernels {
namespace {

const Table* select() {
  const char* force = std::getenv("PBEC_KERNELS");
  if (force && std::strcmp(force, "scalar") == 0) return &scalar_table();
#if defined(PBEC_BUILD_AVX2)
  const bool cpu_ok = __builtin_cpu_supports("avx2") &&
                      __builtin_cpu_supports("fma");
  if (force && std::strcmp(force, "avx2") == 0 && cpu_ok) return &avx2_table();
  if (!force && cpu_ok) return &avx2_table();
#endif
  return &scalar_table();
}

}  // namespace

const Table& active() {
  static const Table* t = select();
  return *t;
}

const char* backend_name() { return active().name; }

}  // namespace pbec::kernels
