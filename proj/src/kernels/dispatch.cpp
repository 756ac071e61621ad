#include "fsm/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace fsm::kernels {

#if defined(FSM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(FSM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("FSM_KERNELS");
  const std::string_view wanted = env ? env : "";
  if (wanted == "scalar") return scalar_kernels();
  if (const KernelTable* fast = avx2_kernels()) return *fast;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace fsm::kernels
