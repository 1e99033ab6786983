#include "gridbesov/rational.hpp"

#include <cctype>

#include "gridbesov/errors.hpp"

namespace gb {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::leaf_cell: return "leaf-cell";
    case Errc::level_out_of_range: return "level-out-of-range";
    case Errc::depth_insufficient: return "depth-insufficient";
    case Errc::grid_mismatch: return "grid-mismatch";
    case Errc::smoothness_mismatch: return "smoothness-mismatch";
    case Errc::wrong_convention: return "wrong-convention";
    case Errc::identical_address: return "identical-address";
    case Errc::undefined_ratio: return "undefined-ratio";
    case Errc::infeasible_constraints: return "infeasible-constraints";
    case Errc::parse_error: return "parse-error";
    case Errc::invalid_argument: return "invalid-argument";
  }
  return "error";
}

std::string rat_str(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rat_parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) fail(Errc::parse_error, "empty rational");

  if (s.find('/') != std::string::npos) {
    Rational q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
      fail(Errc::parse_error, "bad rational '" + s + "'");
    if (sgn(Rational(q.get_den())) == 0) fail(Errc::parse_error, "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }

  // Decimal form: [+-]digits[.digits][(e|E)[+-]digits]
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long frac_digits = 0, exponent = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      exponent = std::stol(s.substr(i + 1));
      break;
    } else {
      fail(Errc::parse_error, "bad number '" + s + "'");
    }
  }
  if (!seen_digit) fail(Errc::parse_error, "bad number '" + s + "'");

  Rational q(mpz_class(digits.empty() ? "0" : digits));
  long ten_pow = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(ten_pow < 0 ? -ten_pow : ten_pow));
  if (ten_pow >= 0)
    q *= Rational(scale);
  else
    q /= Rational(scale);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace gb
