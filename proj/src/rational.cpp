#include "expamoeba/rational.hpp"

#include "expamoeba/errors.hpp"

#include <cctype>
#include <cmath>
#include <ostream>

namespace expamoeba {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr __int128 kMax = std::numeric_limits<long long>::max();

}  // namespace

long long gcd_ll(long long a, long long b) { return static_cast<long long>(gcd128(a, b)); }

long long lcm_ll(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  __int128 l = static_cast<__int128>(a / gcd_ll(a, b)) * b;
  if (l < 0) l = -l;
  if (l > kMax) throw OverflowError("lcm exceeds 64 bits");
  return static_cast<long long>(l);
}

Rational::Rational(long long n, long long d) {
  if (d == 0) throw Error("rational with zero denominator");
  *this = normalized(n, d);
}

Rational Rational::normalized(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > kMax || n < -kMax || d > kMax) throw OverflowError("rational exceeds 64 bits");
  Rational r;
  r.num_ = static_cast<long long>(n);
  r.den_ = static_cast<long long>(d);
  return r;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw OverflowError("non-finite value has no rational form");
  if (x == 0.0) return Rational();
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, 0.5 <= |m| < 1
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  while (e < 0 && (mant % 2) == 0) {
    mant /= 2;
    ++e;
  }
  if (e >= 0) {
    if (e > 62) throw OverflowError("binary64 value too large for a 64-bit rational");
    __int128 n = static_cast<__int128>(mant) << e;
    return normalized(n, 1);
  }
  if (-e > 62) throw OverflowError("binary64 value needs a denominator above 2^62");
  return normalized(mant, static_cast<__int128>(1) << (-e));
}

Rational Rational::parse(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ParseError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational p = parse(s.substr(0, slash));
    Rational q = parse(s.substr(slash + 1));
    if (q.is_zero()) throw ParseError("zero denominator in '" + text + "'");
    return p / q;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  __int128 n = 0;
  int frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '.') {
      if (seen_dot) throw ParseError("malformed number '" + text + "'");
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      n = n * 10 + (ch - '0');
      if (n > kMax) throw OverflowError("literal exceeds 64 bits: '" + text + "'");
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ParseError("malformed number '" + text + "'");
  int exponent = -frac_digits;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw ParseError("malformed number '" + text + "'");
    try {
      size_t used = 0;
      exponent += std::stoi(s.substr(i + 1), &used);
      if (i + 1 + used != s.size()) throw ParseError("malformed exponent in '" + text + "'");
    } catch (const std::logic_error&) {
      throw ParseError("malformed exponent in '" + text + "'");
    }
  }
  __int128 d = 1;
  for (; exponent > 0; --exponent) {
    n *= 10;
    if (n > kMax) throw OverflowError("literal exceeds 64 bits: '" + text + "'");
  }
  for (; exponent < 0; ++exponent) {
    d *= 10;
    if (d > kMax) throw OverflowError("literal exceeds 64 bits: '" + text + "'");
  }
  return normalized(neg ? -n : n, d);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return normalized(-static_cast<__int128>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_;
  __int128 d = static_cast<__int128>(den_) * o.den_;
  *this = normalized(n, d);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  __int128 n = static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_;
  __int128 d = static_cast<__int128>(den_) * o.den_;
  *this = normalized(n, d);
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  // cross-reduce first so products of reduced fractions stay small
  long long g1 = gcd_ll(num_, o.den_), g2 = gcd_ll(o.num_, den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  __int128 n = static_cast<__int128>(num_ / g1) * (o.num_ / g2);
  __int128 d = static_cast<__int128>(den_ / g2) * (o.den_ / g1);
  *this = normalized(n, d);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw Error("rational division by zero");
  Rational inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  if (inv.den_ < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return *this *= inv;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }

std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.str(); }

}  // namespace expamoeba
