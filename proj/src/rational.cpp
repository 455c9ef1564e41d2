#include "csp/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace csp {

namespace {

Wide abs_wide(Wide v) { return v < 0 ? -v : v; }

Wide gcd_wide(Wide a, Wide b) {
  a = abs_wide(a);
  b = abs_wide(b);
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Compares a/b with c/d for b, d > 0 without overflow, by continued fractions.
bool less_frac(Wide a, Wide b, Wide c, Wide d) {
  for (;;) {
    Wide qa = a / b, ra = a % b;
    if (ra < 0) { ra += b; --qa; }
    Wide qc = c / d, rc = c % d;
    if (rc < 0) { rc += d; --qc; }
    if (qa != qc) return qa < qc;
    if (ra == 0) return rc != 0;
    if (rc == 0) return false;
    // a/b < c/d  <=>  d/rc < b/ra
    Wide na = d, nb = rc, nc = b, nd = ra;
    a = na; b = nb; c = nc; d = nd;
  }
}

}  // namespace

std::string wide_to_string(Wide v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

Rational::Rational(Wide num, Wide den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Wide Rational::floor() const {
  Wide q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Wide Rational::ceil() const {
  Wide q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

double Rational::to_double() const {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::to_string() const {
  if (den_ == 1) return wide_to_string(num_);
  return wide_to_string(num_) + "/" + wide_to_string(den_);
}

bool operator<(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return a.num_ < b.num_;
  return less_frac(a.num_, a.den_, b.num_, b.den_);
}

}  // namespace csp
