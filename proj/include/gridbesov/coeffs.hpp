#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "gridbesov/grid.hpp"
#include "gridbesov/scalar.hpp"

namespace gb {

// The same wavelet family carries three coefficient scalings. With the plain
// expansion coefficient a of psi = a_I 1_I + sum a phi:
//   besov_plus   c = a |Q|^{-(1+s)}      (sup-norm convention)
//   besov_minus  d = a |Q|^{s}           (l1-norm convention)
// Storage is always the plain a, exact in rational mode; the tag selects the
// view used by norms and dumps. Conversions therefore never touch values.
enum class Convention { plain, besov_plus, besov_minus };

const char* convention_name(Convention c);
Convention convention_parse(const std::string& name);

inline double view_scale(Convention conv, double cell_measure, double s) {
  switch (conv) {
    case Convention::plain: return 1.0;
    case Convention::besov_plus: return std::pow(cell_measure, -(1.0 + s));
    case Convention::besov_minus: return std::pow(cell_measure, s);
  }
  return 1.0;
}

/// Sparse coefficient family for one grid and smoothness.
template <class F>
struct DistCoeffs {
  const GoodGrid* grid{nullptr};
  double s{0};
  Convention conv{Convention::plain};
  F constant{0};  // c_I = d_I = a_I: the 1_I term carries no scaling
  std::map<WaveletKey, F> terms;  // plain values, exact zeros dropped

  void add(WaveletKey w, const F& plain_value) {
    if (ScalarOps<F>::is_zero(plain_value)) return;
    auto [it, fresh] = terms.emplace(w, plain_value);
    if (!fresh) {
      it->second += plain_value;
      if (ScalarOps<F>::is_zero(it->second)) terms.erase(it);
    }
  }

  /// Value of one term in the tagged convention (complex view).
  Cplx view(WaveletKey w, const F& plain_value) const {
    return ScalarOps<F>::view(plain_value) *
           view_scale(conv, grid->measure_d({w.level, w.cell}), s);
  }
};

template <class F>
DistCoeffs<F> convert(DistCoeffs<F> coeffs, Convention to) {
  coeffs.conv = to;
  return coeffs;
}

template <class F>
DistCoeffs<F> scaled(DistCoeffs<F> coeffs, const F& factor) {
  coeffs.constant *= factor;
  for (auto it = coeffs.terms.begin(); it != coeffs.terms.end();) {
    it->second *= factor;
    it = ScalarOps<F>::is_zero(it->second) ? coeffs.terms.erase(it) : std::next(it);
  }
  return coeffs;
}

/// coefficient-wise a + b (plain storage makes this exact).
template <class F>
DistCoeffs<F> plus(const DistCoeffs<F>& a, const DistCoeffs<F>& b) {
  if (a.grid->id() != b.grid->id()) fail(Errc::grid_mismatch, "coefficient sum across grids");
  if (a.s != b.s) fail(Errc::smoothness_mismatch, "coefficient sum across smoothness");
  DistCoeffs<F> out = a;
  out.constant += b.constant;
  for (const auto& [w, v] : b.terms) out.add(w, v);
  return out;
}

/// Dense per-level coefficient layout for the transform kernels. Slot order
/// within a level is the grid's pair order (cell-major, recursion order).
template <class F>
struct CoeffFrame {
  const GoodGrid* grid{nullptr};
  int level{0};  // owners live at levels < level
  double s{0};
  F constant{0};
  std::vector<std::vector<F>> a;  // a[k][slot]

  static CoeffFrame zero(const GoodGrid& g, int level, double s) {
    CoeffFrame f{&g, level, s, F(0), {}};
    f.a.resize(static_cast<size_t>(level));
    for (int k = 0; k < level; ++k)
      f.a[static_cast<size_t>(k)].assign(static_cast<size_t>(g.pair_count(k)), F(0));
    return f;
  }
};

template <class F>
DistCoeffs<F> sparsify(const CoeffFrame<F>& f, Convention conv) {
  DistCoeffs<F> out{f.grid, f.s, conv, f.constant, {}};
  for (int k = 0; k < f.level; ++k) {
    const auto& row = f.a[static_cast<size_t>(k)];
    for (int64_t slot = 0; slot < static_cast<int64_t>(row.size()); ++slot) {
      const F& v = row[static_cast<size_t>(slot)];
      if (ScalarOps<F>::is_zero(v)) continue;
      const CellRef owner = f.grid->pair_owner(k, slot);
      const int32_t pair = static_cast<int32_t>(slot - f.grid->pair_slot({k, owner.index, 0}));
      out.terms.emplace(WaveletKey{k, owner.index, pair}, v);
    }
  }
  return out;
}

template <class F>
CoeffFrame<F> densify(const DistCoeffs<F>& c, int level) {
  if (!c.terms.empty() && c.terms.rbegin()->first.level >= level)
    fail(Errc::depth_insufficient, "coefficient owner at or beyond target level");
  CoeffFrame<F> f = CoeffFrame<F>::zero(*c.grid, level, c.s);
  f.constant = c.constant;
  for (const auto& [w, v] : c.terms)
    f.a[static_cast<size_t>(w.level)][static_cast<size_t>(c.grid->pair_slot(w))] = v;
  return f;
}

}  // namespace gb
