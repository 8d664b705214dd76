#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>

namespace expamoeba {

/// Exact rational with 64-bit numerator and denominator.
///
/// Intermediate products use 128-bit integers; a result that does not fit
/// after reduction throws OverflowError instead of wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n) {}  // NOLINT: implicit from integers
  Rational(int n) : num_(n) {}        // NOLINT
  Rational(long long n, long long d);

  /// Exact value of a binary64 number; throws OverflowError when the dyadic
  /// denominator or the numerator exceeds 63 bits.
  static Rational from_double(double x);
  /// Parses "p", "p/q", or a finite decimal such as "-0.125".
  static Rational parse(const std::string& text);

  long long num() const { return num_; }
  long long den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  static Rational normalized(__int128 n, __int128 d);
  long long num_ = 0;
  long long den_ = 1;
};

Rational abs(const Rational& x);
std::ostream& operator<<(std::ostream& os, const Rational& x);

long long gcd_ll(long long a, long long b);
long long lcm_ll(long long a, long long b);

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

}  // namespace expamoeba

namespace Eigen {
template <>
struct NumTraits<expamoeba::Rational> : GenericNumTraits<expamoeba::Rational> {
  typedef expamoeba::Rational Real;
  typedef expamoeba::Rational NonInteger;
  typedef expamoeba::Rational Nested;
  typedef expamoeba::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 8
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 18; }
  static inline Real highest() { return Real(std::numeric_limits<long long>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<long long>::min() + 1); }
};
}  // namespace Eigen
