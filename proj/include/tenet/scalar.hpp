#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstddef>
#include <string>

namespace tenet {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex number over arbitrary-precision rationals.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long long v) : re_(v) {}
  Scalar(Rational re) : re_(std::move(re)) {}
  Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}
  static Scalar ratio(long long num, long long den) { return Scalar(Rational(num, den)); }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_one() const { return re_ == 1 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  Scalar operator-() const { return Scalar(-re_, -im_); }
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar conj() const { return Scalar(re_, -im_); }
  std::complex<double> to_complex() const;
  double to_double() const;

  std::size_t hash() const;
  /// "3/4", "-2", or "(1/2,-3)" when the imaginary part is nonzero.
  std::string str() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

std::string rational_str(const Rational& r);

}  // namespace tenet
