#pragma once

#include <complex>
#include <cmath>

#include "gridbesov/rational.hpp"

namespace gb {

using Cplx = std::complex<double>;

// The two scalar backends: exact rationals (default) and complex doubles
// for performance runs. Real == the type measures are consumed as.
template <class F>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  using Real = Rational;
  static Rational abs(const Rational& x) { return x >= 0 ? x : Rational(-x); }
  static double abs_d(const Rational& x) { return std::fabs(x.get_d()); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static Rational from_rational(const Rational& q) { return q; }
  static Cplx view(const Rational& x) { return Cplx(x.get_d(), 0.0); }
  static const char* mode_name() { return "rational"; }
};

template <>
struct ScalarOps<Cplx> {
  using Real = double;
  static double abs(const Cplx& x) { return std::abs(x); }
  static double abs_d(const Cplx& x) { return std::abs(x); }
  static bool is_zero(const Cplx& x) { return x.real() == 0.0 && x.imag() == 0.0; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static Cplx view(const Cplx& x) { return x; }
  static const char* mode_name() { return "float"; }
};

enum class NumericMode { rational, floating };

}  // namespace gb
