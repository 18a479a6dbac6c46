#include "qrw/coefficient.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace qrw {

namespace {

// (x + y sqrt2) for rationals x, y: the real subfield Q(sqrt2).
struct Real2 {
  Rational r;
  Rational s;
};

Real2 mul(const Real2& a, const Real2& b) {
  return {a.r * b.r + 2 * a.s * b.s, a.r * b.s + a.s * b.r};
}
Real2 add(const Real2& a, const Real2& b) { return {a.r + b.r, a.s + b.s}; }
Real2 sub(const Real2& a, const Real2& b) { return {a.r - b.r, a.s - b.s}; }

std::string rationalText(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  std::string out = numerator(q).str();
  if (denominator(q) != 1) out += "/" + denominator(q).str();
  return out;
}

}  // namespace

bool Coefficient::isZero() const {
  return re_rat_ == 0 && re_sqrt2_ == 0 && im_rat_ == 0 && im_sqrt2_ == 0;
}

bool Coefficient::isOne() const {
  return re_rat_ == 1 && re_sqrt2_ == 0 && im_rat_ == 0 && im_sqrt2_ == 0;
}

Coefficient Coefficient::operator-() const {
  return {-re_rat_, -re_sqrt2_, -im_rat_, -im_sqrt2_};
}

Coefficient Coefficient::conj() const {
  return {re_rat_, re_sqrt2_, -im_rat_, -im_sqrt2_};
}

Coefficient operator+(const Coefficient& a, const Coefficient& b) {
  return {a.re_rat_ + b.re_rat_, a.re_sqrt2_ + b.re_sqrt2_,
          a.im_rat_ + b.im_rat_, a.im_sqrt2_ + b.im_sqrt2_};
}

Coefficient operator-(const Coefficient& a, const Coefficient& b) {
  return a + (-b);
}

Coefficient operator*(const Coefficient& a, const Coefficient& b) {
  const Real2 ar{a.re_rat_, a.re_sqrt2_}, ai{a.im_rat_, a.im_sqrt2_};
  const Real2 br{b.re_rat_, b.re_sqrt2_}, bi{b.im_rat_, b.im_sqrt2_};
  const Real2 re = sub(mul(ar, br), mul(ai, bi));
  const Real2 im = add(mul(ar, bi), mul(ai, br));
  return {re.r, re.s, im.r, im.s};
}

Coefficient Coefficient::inverse() const {
  if (isZero()) throw std::domain_error("inverse of zero coefficient");
  // 1/z = conj(z) / |z|^2 with |z|^2 = n in Q(sqrt2); 1/n = n' / (n n')
  // where n' is the sqrt2-conjugate, and n n' is rational.
  const Real2 re{re_rat_, re_sqrt2_}, im{im_rat_, im_sqrt2_};
  const Real2 norm = add(mul(re, re), mul(im, im));
  const Real2 norm_conj{norm.r, -norm.s};
  const Rational denom = norm.r * norm.r - 2 * norm.s * norm.s;
  const Coefficient scale{norm_conj.r / denom, norm_conj.s / denom, 0, 0};
  return conj() * scale;
}

Coefficient operator/(const Coefficient& a, const Coefficient& b) {
  return a * b.inverse();
}

bool operator<(const Coefficient& a, const Coefficient& b) {
  return std::tie(a.re_rat_, a.re_sqrt2_, a.im_rat_, a.im_sqrt2_) <
         std::tie(b.re_rat_, b.re_sqrt2_, b.im_rat_, b.im_sqrt2_);
}

std::complex<double> Coefficient::toComplex() const {
  const double s2 = std::sqrt(2.0);
  return {re_rat_.convert_to<double>() + re_sqrt2_.convert_to<double>() * s2,
          im_rat_.convert_to<double>() + im_sqrt2_.convert_to<double>() * s2};
}

std::string Coefficient::toString(bool unicode) const {
  if (isZero()) return "0";
  const std::string root = unicode ? "√2" : "sqrt2";
  // Each part renders as an unsigned magnitude; signs are joined outside.
  struct Part {
    Rational value;
    bool radical;
    bool imaginary;
  };
  const Part parts[] = {{re_rat_, false, false},
                        {re_sqrt2_, true, false},
                        {im_rat_, false, true},
                        {im_sqrt2_, true, true}};
  std::string out;
  bool first = true;
  for (const Part& p : parts) {
    if (p.value == 0) continue;
    const bool negative = p.value < 0;
    const Rational mag = negative ? Rational(-p.value) : p.value;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? "-" : "+";
    }
    first = false;
    std::string body;
    if (p.radical) {
      // r*sqrt2 == (2r)/sqrt2
      body = rationalText(mag * 2) + "/" + root;
    } else if (p.imaginary && mag == 1) {
      body.clear();
    } else {
      body = rationalText(mag);
    }
    if (p.imaginary) {
      body = body.empty() ? "i" : body + (unicode ? "i" : "*i");
    }
    out += body;
  }
  return out;
}

std::optional<Coefficient> Coefficient::parse(const std::string& text) {
  // part := ( 'i' | 'sqrt2' | int ['/' int] ['/' 'sqrt2' | '*' 'sqrt2'] )
  //         ['*' 'i']
  // literal := ['-'] part { ('+'|'-') part }
  std::size_t pos = 0;
  const auto peek = [&](const char* word) {
    return text.compare(pos, std::char_traits<char>::length(word), word) == 0;
  };
  const auto readInt = [&]() -> std::optional<Rational> {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) return std::nullopt;
    return Rational(boost::multiprecision::cpp_int(text.substr(start, pos - start)));
  };
  Coefficient total;
  bool negative = false;
  if (pos < text.size() && text[pos] == '-') {
    negative = true;
    ++pos;
  }
  while (true) {
    Coefficient part;
    if (peek("sqrt2")) {
      pos += 5;
      part = sqrt2();
    } else if (peek("i")) {
      pos += 1;
      part = imaginaryUnit();
    } else {
      auto num = readInt();
      if (!num) return std::nullopt;
      Rational value = *num;
      if (pos < text.size() && text[pos] == '/' && !peek("/sqrt2")) {
        ++pos;
        auto den = readInt();
        if (!den || *den == 0) return std::nullopt;
        value /= *den;
      }
      part = rational(value);
      if (peek("/sqrt2")) {
        pos += 6;
        part = part * invSqrt2();
      } else if (peek("*sqrt2")) {
        pos += 6;
        part = part * sqrt2();
      }
      if (peek("*i")) {
        pos += 2;
        part = part * imaginaryUnit();
      }
    }
    total += negative ? -part : part;
    if (pos == text.size()) break;
    if (text[pos] == '+') {
      negative = false;
    } else if (text[pos] == '-') {
      negative = true;
    } else {
      return std::nullopt;
    }
    ++pos;
  }
  return total;
}

}  // namespace qrw
