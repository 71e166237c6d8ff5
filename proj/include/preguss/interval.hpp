#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "preguss/int_width.hpp"

namespace preguss {

// Integer interval over the extended integers. The int64 extremes stand for
// -inf/+inf and absorb every arithmetic result beyond them, so all operations
// saturate instead of wrapping.
class Interval {
 public:
  static constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kPosInf = std::numeric_limits<std::int64_t>::max();

  Interval() = default;  // bottom
  Interval(std::int64_t lo, std::int64_t hi);

  static Interval bottom() { return Interval(); }
  static Interval top() { return Interval(kNegInf, kPosInf); }
  static Interval point(std::int64_t v) { return Interval(v, v); }
  static Interval full(IntWidth w) { return Interval(w.min(), w.max()); }

  bool is_bottom() const { return bottom_; }
  bool is_point() const { return !bottom_ && lo_ == hi_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }

  bool contains(std::int64_t v) const { return !bottom_ && lo_ <= v && v <= hi_; }
  bool contains(const Interval& other) const;
  bool within(IntWidth w) const { return bottom_ || (lo_ >= w.min() && hi_ <= w.max()); }
  /// Number of points, saturated at uint64 max.
  std::uint64_t size() const;

  Interval join(const Interval& other) const;
  Interval meet(const Interval& other) const;

  friend bool operator==(const Interval&, const Interval&) = default;

  std::string str() const;

 private:
  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;
  bool bottom_ = true;
};

namespace interval_ops {

std::int64_t sat_add(std::int64_t a, std::int64_t b);
std::int64_t sat_mul(std::int64_t a, std::int64_t b);
std::int64_t sat_neg(std::int64_t a);

Interval neg(const Interval& a);
Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
/// Truncating division, with x / 0 == 0 (the total semantics of predicates).
Interval div(const Interval& a, const Interval& b);
/// Truncating remainder, with x % 0 == x.
Interval mod(const Interval& a, const Interval& b);

}  // namespace interval_ops

/// Clamp-to-width widening: an unstable bound jumps to MIN or MAX.
Interval widen(const Interval& prev, const Interval& next, IntWidth w);
/// Standard narrowing: refine only the bounds that widening pushed to the width limits.
Interval narrow(const Interval& prev, const Interval& next, IntWidth w);

}  // namespace preguss
