#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace isw::detail {

// FNV-1a, fed with fixed-width little-endian encodings so fingerprints are
// stable across runs and platforms.
class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) noexcept {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= c[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) noexcept {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) noexcept {
    if (v == 0.0) v = 0.0;  // fold -0.0
    u64(std::bit_cast<std::uint64_t>(v));
  }
  void f64s(std::span<const double> vs) noexcept {
    u64(vs.size());
    for (double v : vs) f64(v);
  }
  void str(std::string_view s) noexcept {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace isw::detail
