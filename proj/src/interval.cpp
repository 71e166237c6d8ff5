#include "preguss/interval.hpp"

#include <algorithm>
#include <initializer_list>

namespace preguss {

Interval::Interval(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi), bottom_(lo > hi) {
  if (bottom_) {
    lo_ = 0;
    hi_ = -1;
  }
}

bool Interval::contains(const Interval& other) const {
  if (other.bottom_) return true;
  if (bottom_) return false;
  return lo_ <= other.lo_ && other.hi_ <= hi_;
}

std::uint64_t Interval::size() const {
  if (bottom_) return 0;
  if (lo_ == kNegInf || hi_ == kPosInf) return UINT64_MAX;
  unsigned __int128 n = static_cast<unsigned __int128>(static_cast<__int128>(hi_) - lo_ + 1);
  return n > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(n);
}

Interval Interval::join(const Interval& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  return Interval(std::min(lo_, o.lo_), std::max(hi_, o.hi_));
}

Interval Interval::meet(const Interval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return Interval(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
}

std::string Interval::str() const {
  if (bottom_) return "bottom";
  auto b = [](std::int64_t v) -> std::string {
    if (v == kNegInf) return "-inf";
    if (v == kPosInf) return "+inf";
    return std::to_string(v);
  };
  return "[" + b(lo_) + ", " + b(hi_) + "]";
}

namespace interval_ops {

namespace {

std::int64_t clamp128(__int128 v) {
  if (v <= Interval::kNegInf) return Interval::kNegInf;
  if (v >= Interval::kPosInf) return Interval::kPosInf;
  return static_cast<std::int64_t>(v);
}

bool is_inf(std::int64_t v) { return v == Interval::kNegInf || v == Interval::kPosInf; }

Interval hull(std::initializer_list<std::int64_t> vs) {
  return Interval(std::min(vs), std::max(vs));
}

// Truncating division of bounds where the divisor is non-zero.
std::int64_t bound_div(std::int64_t a, std::int64_t b) {
  if (is_inf(a)) {
    bool neg = (a < 0) != (b < 0);
    if (is_inf(b)) return neg ? -1 : 1;  // only its sign matters for hulls
    return neg ? Interval::kNegInf : Interval::kPosInf;
  }
  if (is_inf(b)) return 0;
  if (a == Interval::kNegInf + 1 && b == -1) return Interval::kPosInf;
  return a / b;
}

// a / b for b within a sign-definite interval (not containing 0).
Interval div_nonzero(const Interval& a, const Interval& b) {
  return hull({bound_div(a.lo(), b.lo()), bound_div(a.lo(), b.hi()), bound_div(a.hi(), b.lo()),
               bound_div(a.hi(), b.hi())});
}

}  // namespace

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a == Interval::kNegInf || b == Interval::kNegInf) {
    return (a == Interval::kPosInf || b == Interval::kPosInf) ? 0 : Interval::kNegInf;
  }
  if (a == Interval::kPosInf || b == Interval::kPosInf) return Interval::kPosInf;
  return clamp128(static_cast<__int128>(a) + b);
}

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (is_inf(a) || is_inf(b)) return ((a < 0) != (b < 0)) ? Interval::kNegInf : Interval::kPosInf;
  __int128 r = static_cast<__int128>(a) * b;
  return clamp128(r);
}

std::int64_t sat_neg(std::int64_t a) {
  if (a == Interval::kNegInf) return Interval::kPosInf;
  if (a == Interval::kPosInf) return Interval::kNegInf;
  return -a;
}

Interval neg(const Interval& a) {
  if (a.is_bottom()) return a;
  return Interval(sat_neg(a.hi()), sat_neg(a.lo()));
}

Interval add(const Interval& a, const Interval& b) {
  if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
  std::int64_t lo = (a.lo() == Interval::kNegInf || b.lo() == Interval::kNegInf) ? Interval::kNegInf
                                                                                  : sat_add(a.lo(), b.lo());
  std::int64_t hi = (a.hi() == Interval::kPosInf || b.hi() == Interval::kPosInf) ? Interval::kPosInf
                                                                                  : sat_add(a.hi(), b.hi());
  return Interval(lo, hi);
}

Interval sub(const Interval& a, const Interval& b) { return add(a, neg(b)); }

Interval mul(const Interval& a, const Interval& b) {
  if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
  return hull({sat_mul(a.lo(), b.lo()), sat_mul(a.lo(), b.hi()), sat_mul(a.hi(), b.lo()), sat_mul(a.hi(), b.hi())});
}

Interval div(const Interval& a, const Interval& b) {
  if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
  Interval out;
  Interval neg_part = b.meet(Interval(Interval::kNegInf, -1));
  Interval pos_part = b.meet(Interval(1, Interval::kPosInf));
  if (!neg_part.is_bottom()) out = out.join(div_nonzero(a, neg_part));
  if (!pos_part.is_bottom()) out = out.join(div_nonzero(a, pos_part));
  if (b.contains(0)) out = out.join(Interval::point(0));
  return out;
}

Interval mod(const Interval& a, const Interval& b) {
  if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
  Interval out;
  Interval nonzero = b.meet(Interval(Interval::kNegInf, -1)).join(b.meet(Interval(1, Interval::kPosInf)));
  if (!nonzero.is_bottom()) {
    // |a % b| < |b| and |a % b| <= |a|; the sign follows a.
    auto abs_sat = [](std::int64_t v) { return v < 0 ? sat_neg(v) : v; };
    std::int64_t babs = std::max(abs_sat(nonzero.lo()), abs_sat(nonzero.hi()));
    std::int64_t mbound = babs == Interval::kPosInf ? Interval::kPosInf : babs - 1;
    std::int64_t lo = a.lo() >= 0 ? 0 : std::max(a.lo(), sat_neg(mbound));
    std::int64_t hi = a.hi() <= 0 ? 0 : std::min(a.hi(), mbound);
    if (a.is_point() && nonzero.is_point() && !is_inf(a.lo())) {
      lo = hi = a.lo() % nonzero.lo();
    }
    out = Interval(lo, hi);
  }
  if (b.contains(0)) out = out.join(a);
  return out;
}

}  // namespace interval_ops

Interval widen(const Interval& prev, const Interval& next, IntWidth w) {
  if (prev.is_bottom()) return next;
  if (next.is_bottom()) return prev;
  std::int64_t lo = next.lo() < prev.lo() ? std::min(w.min(), next.lo()) : prev.lo();
  std::int64_t hi = next.hi() > prev.hi() ? std::max(w.max(), next.hi()) : prev.hi();
  return Interval(lo, hi);
}

Interval narrow(const Interval& prev, const Interval& next, IntWidth w) {
  if (prev.is_bottom() || next.is_bottom()) return next;
  std::int64_t lo = prev.lo() <= w.min() ? next.lo() : prev.lo();
  std::int64_t hi = prev.hi() >= w.max() ? next.hi() : prev.hi();
  return Interval(lo, hi).meet(prev);
}

}  // namespace preguss
