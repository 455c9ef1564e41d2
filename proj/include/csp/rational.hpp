#pragma once

#include <cstdint>
#include <string>

namespace csp {

using Wide = __int128;

std::string wide_to_string(Wide v);

// Exact fraction over 128-bit integers, always normalized with den > 0.
class Rational {
 public:
  Rational() = default;
  Rational(Wide num, Wide den = 1);  // NOLINT(google-explicit-constructor)

  Wide num() const { return num_; }
  Wide den() const { return den_; }

  Wide floor() const;
  Wide ceil() const;
  double to_double() const;
  std::string to_string() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  Wide num_ = 0;
  Wide den_ = 1;
};

}  // namespace csp
