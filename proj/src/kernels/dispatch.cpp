#include <cstdlib>
#include <string>

#include "latfact/kernels.hpp"

namespace latfact::kernels {

const KernelTable* avx2_table() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? detail::avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() { return detail::neon_table_impl(); }

namespace {

const KernelTable& select() {
  const char* env = std::getenv("LATFACT_SIMD");
  const std::string want = env != nullptr ? env : "";
  if (want == "scalar") return scalar_table();
  if (want.empty() || want == "avx2") {
    if (const auto* t = avx2_table()) return *t;
  }
  if (want.empty() || want == "neon") {
    if (const auto* t = neon_table()) return *t;
  }
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

}  // namespace latfact::kernels
