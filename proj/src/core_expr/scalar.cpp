#include "tenet/scalar.hpp"

#include <boost/container_hash/hash.hpp>

namespace tenet {

Scalar& Scalar::operator+=(const Scalar& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (o.im_ == 0 && im_ == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.im_ == 0) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  Rational den = o.re_ * o.re_ + o.im_ * o.im_;
  Rational re = (re_ * o.re_ + im_ * o.im_) / den;
  Rational im = (im_ * o.re_ - re_ * o.im_) / den;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::complex<double> Scalar::to_complex() const {
  return {re_.convert_to<double>(), im_.convert_to<double>()};
}

double Scalar::to_double() const { return re_.convert_to<double>(); }

std::string rational_str(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

std::size_t Scalar::hash() const {
  std::size_t seed = 0x5ca1a7;
  boost::hash_combine(seed, rational_str(re_));
  boost::hash_combine(seed, rational_str(im_));
  return seed;
}

std::string Scalar::str() const {
  if (im_ == 0) return rational_str(re_);
  return "(" + rational_str(re_) + "," + rational_str(im_) + ")";
}

}  // namespace tenet
