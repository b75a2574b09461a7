#include <atomic>
#include <cstdlib>
#include <string_view>

#include "eqgym/simd/kernels.hpp"

namespace eqgym::simd {

namespace {

const Kernels* available(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return &scalar_kernels();
    case Isa::kAvx2: return avx2_kernels();
    case Isa::kNeon: return neon_kernels();
  }
  return nullptr;
}

const Kernels* detect() {
  if (const char* env = std::getenv("EQGYM_SIMD")) {
    std::string_view want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa)) {
        if (const Kernels* k = available(isa)) return k;
      }
    }
  }
  if (const Kernels* k = avx2_kernels()) return k;
  if (const Kernels* k = neon_kernels()) return k;
  return &scalar_kernels();
}

std::atomic<const Kernels*> g_override{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const Kernels& active_kernels() {
  if (const Kernels* k = g_override.load(std::memory_order_acquire)) return *k;
  static const Kernels* detected = detect();
  return *detected;
}

bool force_isa(Isa isa) {
  const Kernels* k = available(isa);
  if (!k) return false;
  g_override.store(k, std::memory_order_release);
  return true;
}

void reset_isa() { g_override.store(nullptr, std::memory_order_release); }

}  // namespace eqgym::simd
