#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace fairlicit {

// Nonnegative ratio of two counts, kept in lowest terms. Rates are compared
// and subtracted exactly; conversion to double happens only for rendering.
class Ratio {
 public:
  constexpr Ratio() = default;

  constexpr Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ <= 0) throw std::invalid_argument("Ratio: denominator must be positive");
    if (num_ < 0) throw std::invalid_argument("Ratio: numerator must be nonnegative");
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // |a - b|
  friend constexpr Ratio abs_diff(const Ratio& a, const Ratio& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    const __int128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
    const __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return reduce(diff, den);
  }

  friend constexpr std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }
  friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

  // True when this ratio does not exceed the tolerance. Evaluated as
  // num <= eps * den so that exact decimal tolerances like 0.25 compare
  // exactly against 1/4.
  constexpr bool within(double eps) const noexcept {
    return static_cast<long double>(num_) <=
           static_cast<long double>(eps) * static_cast<long double>(den_);
  }

 private:
  static constexpr Ratio reduce(__int128 num, __int128 den) {
    __int128 a = num, b = den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    return Ratio(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Rate with an explicit "undefined" state (empty denominator).
using Rate = std::optional<Ratio>;

inline Rate make_rate(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return Ratio(num, den);
}

}  // namespace fairlicit
