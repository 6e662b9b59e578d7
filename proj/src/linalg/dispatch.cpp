#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fom/kernels.hpp"

namespace fom::kernels {

#ifdef FOM_WITH_AVX2
const KernelTable& avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(FOM_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("FOM_KERNELS");
  const std::string_view choice = env ? env : "auto";
  if (choice == "scalar") return &scalar_table();
  if (const KernelTable* avx = avx2_table()) return avx;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#ifdef FOM_WITH_AVX2
  static const bool available = cpu_has_avx2();
  if (available) return &avx2_table_unchecked();
#endif
  return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Backend backend) {
  const KernelTable* table = backend == Backend::Scalar ? &scalar_table() : avx2_table();
  if (!table) return false;
  current().store(table, std::memory_order_release);
  return true;
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Scalar ? "scalar" : "avx2";
}

}  // namespace fom::kernels
