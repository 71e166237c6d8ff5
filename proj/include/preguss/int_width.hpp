#pragma once

#include <cstdint>
#include <string>

namespace preguss {

// Two's complement width of the MiniC `int` type. Every overflow threshold in
// the analyzer, the verifier and the concrete oracle is derived from here.
class IntWidth {
 public:
  constexpr IntWidth() = default;

  /// Throws std::invalid_argument unless bits is 8, 16 or 32.
  static IntWidth from_bits(int bits);

  constexpr int bits() const { return bits_; }
  constexpr std::int64_t min() const { return -(std::int64_t{1} << (bits_ - 1)); }
  constexpr std::int64_t max() const { return (std::int64_t{1} << (bits_ - 1)) - 1; }
  constexpr bool contains(std::int64_t v) const { return v >= min() && v <= max(); }
  constexpr std::uint64_t cardinality() const { return std::uint64_t{1} << bits_; }

  friend constexpr bool operator==(IntWidth, IntWidth) = default;

 private:
  constexpr explicit IntWidth(int bits) : bits_(bits) {}
  int bits_ = 32;
};

}  // namespace preguss
