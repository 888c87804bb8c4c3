// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FAIRCHK_WEIGHT_HPP
#define FAIRCHK_WEIGHT_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

namespace fairchk {

/// A natural number extended with infinity. Arithmetic saturates at infinity.
class Weight {
 public:
  constexpr Weight() = default;
  constexpr explicit Weight(std::uint64_t n) : value_(n < kInf ? n : kInf) {}

  static constexpr Weight infinity() { return Weight(kInf); }

  constexpr bool finite() const { return value_ != kInf; }
  constexpr bool is_infinite() const { return value_ == kInf; }

  /// Only meaningful when finite().
  constexpr std::uint64_t value() const { return value_; }

  constexpr auto operator<=>(const Weight&) const = default;

  friend constexpr Weight operator+(Weight a, Weight b) {
    if (!a.finite() || !b.finite()) return infinity();
    std::uint64_t s = a.value_ + b.value_;
    return s < a.value_ ? infinity() : Weight(s);
  }
  Weight& operator+=(Weight o) { return *this = *this + o; }

  std::string str() const { return finite() ? std::to_string(value_) : "inf"; }

  friend std::ostream& operator<<(std::ostream& os, Weight w) { return os << w.str(); }

 private:
  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t value_ = 0;
};

inline constexpr Weight wmin(Weight a, Weight b) { return std::min(a, b); }
inline constexpr Weight wmax(Weight a, Weight b) { return std::max(a, b); }

}  // namespace fairchk

#endif  // FAIRCHK_WEIGHT_HPP
