#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace gb {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Renders as "p" or "p/q".
std::string rat_str(const Rational& q);

/// Parses "p/q", integers, and plain decimals ("0.25", "-1.5e-2"). Exact.
Rational rat_parse(std::string_view text);

}  // namespace gb
