#pragma once

#include <complex>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace qrw {

using Rational = boost::multiprecision::cpp_rational;

/// Exact element of Q(i, sqrt2):
///   (re_rat + re_sqrt2 * sqrt2) + i * (im_rat + im_sqrt2 * sqrt2)
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(long long value) : re_rat_(value) {}  // NOLINT: implicit on purpose
  Coefficient(Rational re_rat, Rational re_sqrt2, Rational im_rat,
              Rational im_sqrt2)
      : re_rat_(std::move(re_rat)),
        re_sqrt2_(std::move(re_sqrt2)),
        im_rat_(std::move(im_rat)),
        im_sqrt2_(std::move(im_sqrt2)) {}

  static Coefficient rational(const Rational& r) { return {r, 0, 0, 0}; }
  static Coefficient sqrt2() { return {0, 1, 0, 0}; }
  /// 1/sqrt2 == sqrt2/2.
  static Coefficient invSqrt2() { return {0, Rational(1, 2), 0, 0}; }
  static Coefficient imaginaryUnit() { return {0, 0, 1, 0}; }

  const Rational& reRat() const { return re_rat_; }
  const Rational& reSqrt2() const { return re_sqrt2_; }
  const Rational& imRat() const { return im_rat_; }
  const Rational& imSqrt2() const { return im_sqrt2_; }

  bool isZero() const;
  bool isOne() const;

  Coefficient operator-() const;
  Coefficient conj() const;
  /// Throws std::domain_error for zero.
  Coefficient inverse() const;

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b);
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b);
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
  friend Coefficient operator/(const Coefficient& a, const Coefficient& b);
  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }

  friend bool operator==(const Coefficient& a, const Coefficient& b) = default;
  /// Arbitrary but fixed total order (component-wise lexicographic).
  friend bool operator<(const Coefficient& a, const Coefficient& b);

  std::complex<double> toComplex() const;

  /// Literal text accepted by the term parser, e.g. `-1`, `1/2`, `1/sqrt2`,
  /// `i`, `1+3/2*i`. `unicode` swaps `sqrt2` for the radical sign.
  std::string toString(bool unicode = false) const;

  /// Parses the literal grammar produced by toString(false). Returns nullopt
  /// on malformed input.
  static std::optional<Coefficient> parse(const std::string& text);

 private:
  Rational re_rat_{0};
  Rational re_sqrt2_{0};
  Rational im_rat_{0};
  Rational im_sqrt2_{0};
};

}  // namespace qrw
