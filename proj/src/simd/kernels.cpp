#include "isw/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "isw/error.hpp"

namespace isw::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() noexcept {
  if (const char* env = std::getenv("ISW_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
    if (want == "neon" && backend_available(Backend::neon)) return Backend::neon;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&kernels_for(detect())};
  return table;
}

std::atomic<Backend>& active_id() {
  static std::atomic<Backend> id{detect()};
  return id;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Backend::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& kernels_for(Backend b) {
  switch (b) {
    case Backend::scalar: return detail::scalar_table();
    case Backend::avx2:
      if (backend_available(b)) return *detail::avx2_table();
      break;
    case Backend::neon:
      if (backend_available(b)) return *detail::neon_table();
      break;
  }
  throw InvalidArgument("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
}

Backend active_backend() noexcept { return active_id().load(); }

void set_backend(Backend b) {
  const KernelTable& t = kernels_for(b);
  active_table().store(&t);
  active_id().store(b);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  return active_table().load()->dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("squared_distance: length mismatch");
  return active_table().load()->squared_distance(a.data(), b.data(), a.size());
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  if (acc.size() != x.size()) throw InvalidArgument("accumulate: length mismatch");
  active_table().load()->accumulate(acc.data(), x.data(), x.size());
}

}  // namespace isw::simd
