#include "gridbesov/particles.hpp"

namespace gb {

DipoleNormBounds dipole_norm_bounds(const GoodGrid& g, const Address& x, const Address& y,
                                    double s) {
  CellRef sep{0, 0};
  bool separated = false;
  for (int k = 1; k <= g.depth(); ++k) {
    if (g.cell_at(x, k) != g.cell_at(y, k)) {
      separated = true;
      break;
    }
    sep = g.cell_at(x, k);
  }
  if (!separated) fail(Errc::identical_address, "addresses agree down to the grid depth");

  const int n = g.depth();
  const TruncatedDist<Rational> t = dipole_coeffs<Rational>(g, x, y, s, n);
  const double norm = norm_minus(t.coeffs);
  const double ps = std::pow(g.measure_d(sep), s);

  DipoleNormBounds b;
  b.separation = sep;
  b.truncated_norm = norm;
  b.ratio = norm / ps;
  // The splitting pair of the separation cell carries plain coefficient
  // exactly 1, so |P|^s is itself a certified lower bound.
  b.lower = std::max(norm - t.tail, ps);
  b.upper = norm + t.tail;

  const double c = dipole_equiv_constant(g, s);
  if (b.lower < ps / c * (1.0 - 1e-9) || b.upper > c * ps * (1.0 + 1e-9))
    fail(Errc::invalid_argument, "certified dipole interval escaped the equivalence bound");
  return b;
}

Rational closed_form_increment_weight(const GoodGrid& g, CellRef owner, const HaarPair& p,
                                      CellRef next) {
  const uint32_t cidx = static_cast<uint32_t>(next.index - g.cell(owner).child_begin);
  if (cidx < p.begin || cidx >= p.end) return Rational(0);
  const Rational inter = g.measure(next);
  const Rational num =
      cidx < p.mid ? Rational(inter * p.mu1) : Rational(inter * p.mu2);
  return num / (p.mu1 + p.mu2);
}

}  // namespace gb
