#pragma once

#include <algorithm>
#include <cmath>

#include "gridbesov/coeffs.hpp"
#include "gridbesov/parallel.hpp"
#include "gridbesov/step.hpp"

namespace gb {

/// |c_I| + sup |c| over the support. Requires the besov_plus tag.
template <class F>
double norm_plus(const DistCoeffs<F>& coeffs) {
  if (coeffs.conv != Convention::besov_plus)
    fail(Errc::wrong_convention, "norm_plus needs besov_plus coefficients");
  double sup = 0;
  for (const auto& [w, v] : coeffs.terms)
    sup = std::max(sup, std::abs(coeffs.view(w, v)));
  return ScalarOps<F>::abs_d(coeffs.constant) + sup;
}

/// |d_I| + sum |d| over the support. Requires the besov_minus tag.
template <class F>
double norm_minus(const DistCoeffs<F>& coeffs) {
  if (coeffs.conv != Convention::besov_minus)
    fail(Errc::wrong_convention, "norm_minus needs besov_minus coefficients");
  double sum = 0;
  for (const auto& [w, v] : coeffs.terms) sum += std::abs(coeffs.view(w, v));
  return ScalarOps<F>::abs_d(coeffs.constant) + sum;
}

/// sup over owners at level >= k of |c| (besov_plus view).
template <class F>
double vanishing_modulus(const DistCoeffs<F>& coeffs, int k) {
  if (coeffs.conv != Convention::besov_plus)
    fail(Errc::wrong_convention, "vanishing_modulus needs besov_plus coefficients");
  double sup = 0;
  for (auto it = coeffs.terms.lower_bound(WaveletKey{k, 0, 0}); it != coeffs.terms.end(); ++it)
    sup = std::max(sup, std::abs(coeffs.view(it->first, it->second)));
  return sup;
}

struct HolderReport {
  double sup{0};
  double seminorm{0};
  std::vector<uint32_t> witness_path;  // internal cell achieving the seminorm
  double norm() const { return sup + seminorm; }
};

// Exact for step functions: d(x,y) is constant (= |P|) over pairs of points
// lying in distinct children of P, so the essential sup is a finite scan of
// per-child value ranges. Real-valued input only.
template <class F>
HolderReport holder_norm(const StepFunction<F>& psi, double s);

/// <phi, psi> through the coefficient families: d_I c_I + sum d c K. With
/// plain storage this is sum a_phi a_psi (1/mu1 + 1/mu2), exact in rational
/// mode, and equals inner_product of the truncated expansions.
template <class F>
F pairing(const DistCoeffs<F>& phi, const DistCoeffs<F>& psi) {
  if (phi.conv != Convention::besov_minus || psi.conv != Convention::besov_plus)
    fail(Errc::wrong_convention, "pairing needs (besov_minus, besov_plus)");
  if (phi.grid->id() != psi.grid->id()) fail(Errc::grid_mismatch, "pairing across grids");
  if (phi.s != psi.s) fail(Errc::smoothness_mismatch, "pairing across smoothness");
  F acc = phi.constant * psi.constant;
  auto a = phi.terms.begin();
  auto b = psi.terms.begin();
  while (a != phi.terms.end() && b != psi.terms.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      acc += a->second * b->second * MeasureAs<F>::phi_sq(phi.grid->pair(a->first));
      ++a;
      ++b;
    }
  }
  return acc;
}

/// |pairing| / (norm_minus * norm_plus); always <= max(1, 2/lambda_star).
template <class F>
double duality_gap(const DistCoeffs<F>& phi, const DistCoeffs<F>& psi) {
  const double nm = norm_minus(phi);
  const double np = norm_plus(psi);
  if (nm == 0.0 || np == 0.0) fail(Errc::undefined_ratio, "duality gap of a zero element");
  return ScalarOps<F>::abs_d(pairing(phi, psi)) / (nm * np);
}

// --- implementation ---

namespace detail {

inline double holder_value(const Rational& q) { return q.get_d(); }
inline double holder_value(const Cplx& z) {
  if (z.imag() != 0.0)
    fail(Errc::invalid_argument, "holder_norm is defined for real-valued functions");
  return z.real();
}

}  // namespace detail

template <class F>
HolderReport holder_norm(const StepFunction<F>& psi, double s) {
  const GoodGrid& g = *psi.grid;
  const int n = psi.level;
  HolderReport rep;

  std::vector<double> lo(psi.values.size()), hi(psi.values.size());
  for (size_t i = 0; i < psi.values.size(); ++i) {
    lo[i] = hi[i] = detail::holder_value(psi.values[i]);
    rep.sup = std::max(rep.sup, std::fabs(lo[i]));
  }

  // Per-level sweep: for every internal cell, the oscillation across
  // distinct children is max over child pairs (hi_i - lo_j), i != j.
  for (int k = n - 1; k >= 0; --k) {
    std::vector<double> plo(static_cast<size_t>(g.cell_count(k)));
    std::vector<double> phi_(static_cast<size_t>(g.cell_count(k)));
    for (int64_t i = 0; i < g.cell_count(k); ++i) {
      const CellRec& c = g.cell({k, i});
      const size_t nc = static_cast<size_t>(c.child_end - c.child_begin);
      double cell_lo = lo[static_cast<size_t>(c.child_begin)];
      double cell_hi = hi[static_cast<size_t>(c.child_begin)];
      double best = 0;
      for (size_t a = 0; a < nc; ++a) {
        const size_t ia = static_cast<size_t>(c.child_begin) + a;
        cell_lo = std::min(cell_lo, lo[ia]);
        cell_hi = std::max(cell_hi, hi[ia]);
        for (size_t b = 0; b < nc; ++b) {
          if (a == b) continue;
          const size_t ib = static_cast<size_t>(c.child_begin) + b;
          best = std::max(best, hi[ia] - lo[ib]);
        }
      }
      plo[static_cast<size_t>(i)] = cell_lo;
      phi_[static_cast<size_t>(i)] = cell_hi;
      const double ratio = best / std::pow(g.measure_d({k, i}), s);
      if (ratio > rep.seminorm) {
        rep.seminorm = ratio;
        rep.witness_path = g.path_of({k, i});
      }
    }
    lo.swap(plo);
    hi.swap(phi_);
  }
  return rep;
}

}  // namespace gb
