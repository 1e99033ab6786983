#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "gridbesov/particles.hpp"

namespace gb {

enum class AnchorRule { leftmost, seeded_random };

const char* anchor_rule_name(AnchorRule r);

/// An element of the family F: either a cell, or one group (child range) of
/// a Haar pair of `owner`. Groups of size one are identified with the child
/// cell and never appear with is_group set.
struct FSet {
  CellRef owner;
  uint32_t begin{0}, end{0};
  bool is_group{false};

  static FSet cell(CellRef r) { return {r, 0, 0, false}; }
  static FSet group(CellRef owner, uint32_t b, uint32_t e) { return {owner, b, e, true}; }
  /// Reference level k0: the owner's level in both cases.
  int k0() const { return owner.level; }
};

// A compatible anchor choice: one point per element of F, such that (A) the
// anchor lies in its set and (B) nested sets sharing the coarse anchor share
// it exactly. Built top-down: the side of each split containing the anchor
// inherits it, the other side draws a fresh one (leftmost descendant, or
// uniform over the group's leaves for the seeded rule). Anchors are stored
// as leaf indices at the grid depth.
class DipoleBasis {
 public:
  const GoodGrid& grid() const { return *grid_; }
  AnchorRule rule() const { return rule_; }
  uint64_t seed() const { return seed_; }

  int64_t cell_anchor(CellRef r) const {
    return cell_[static_cast<size_t>(r.level)][static_cast<size_t>(r.index)];
  }
  /// side 0 = S1, side 1 = S2, side 2 = the group the pair splits.
  int64_t group_anchor(WaveletKey w, int side) const {
    return pair_[static_cast<size_t>(w.level)][static_cast<size_t>(grid_->pair_slot(w))]
                [static_cast<size_t>(side)];
  }
  int64_t anchor_of(const FSet& f) const;
  Address address(int64_t leaf) const { return grid_->address_of_leaf(leaf); }

 private:
  friend DipoleBasis build_dipole_basis(const GoodGrid&, AnchorRule, uint64_t);
  const GoodGrid* grid_{nullptr};
  AnchorRule rule_{AnchorRule::leftmost};
  uint64_t seed_{0};
  std::vector<std::vector<int64_t>> cell_;
  std::vector<std::vector<std::array<int64_t, 3>>> pair_;  // {S1, S2, union}
};

DipoleBasis build_dipole_basis(const GoodGrid& g, AnchorRule rule, uint64_t seed = 0);

/// Exhaustive check of invariant (B) over all nested pairs of F.
bool check_anchor_compatibility(const GoodGrid& g, const DipoleBasis& basis);

/// All cells plus all pair groups of size >= 2 (singletons are cells).
std::vector<FSet> all_fsets(const GoodGrid& g);

/// Leaf interval of an F-set at the grid depth.
std::pair<int64_t, int64_t> leaf_interval(const GoodGrid& g, const FSet& f);

Rational fset_measure(const GoodGrid& g, const FSet& f);

/// Coefficients over one dipole basis: m0 on delta_{x_I} plus one scalar per
/// basis dipole (indexed by the pair it comes from).
template <class F>
struct DCCoeffs {
  const GoodGrid* grid{nullptr};
  const DipoleBasis* basis{nullptr};
  double s{0};
  F m0{0};
  std::map<WaveletKey, F> terms;
  double tail{0};  // DC-norm bound on refinement terms beyond the truncation

  void add(WaveletKey w, const F& v) {
    if (ScalarOps<F>::is_zero(v)) return;
    auto [it, fresh] = terms.emplace(w, v);
    if (!fresh) {
      it->second += v;
      if (ScalarOps<F>::is_zero(it->second)) terms.erase(it);
    }
  }
};

/// |m0| + sum_P |P|^s sum |m| with P the owner cell of each dipole.
template <class F>
double dc_norm(const DCCoeffs<F>& c) {
  double sum = 0;
  for (const auto& [w, v] : c.terms)
    sum += ScalarOps<F>::abs_d(v) * std::pow(c.grid->measure_d({w.level, w.cell}), c.s);
  return ScalarOps<F>::abs_d(c.m0) + sum;
}

template <class F>
struct DipoleTerm {
  F m{0};
  WaveletKey pair;
};

/// A^i_J: the Riemann configuration of J at refinement step i. A^0 is the
/// single particle |J| delta_{x_J}; for i >= 1 the particles sit at the
/// anchors of the level-(k0+i) cells inside J with their measures as masses.
template <class F>
ParticleConfig<F> riemann_config(const GoodGrid& g, const DipoleBasis& basis, const FSet& j,
                                 int i);

/// Basis-dipole increment with A^{i+1}_J = A^i_J + sum m (dx_{P1} - dx_{P2}).
/// m = +mu1 when the union anchor sits in S2, -mu2 when it sits in S1.
template <class F>
std::vector<DipoleTerm<F>> riemann_increment(const GoodGrid& g, const DipoleBasis& basis,
                                             const FSet& j, int i);

/// Dipole expansion of one wavelet, truncated at `depth`:
///   phi = (dx_{S1} - dx_{S2}) + (1/mu1) sum_i incr(S1, i) - (1/mu2) sum_i incr(S2, i).
template <class F>
DCCoeffs<F> wavelet_to_dc(const GoodGrid& g, const DipoleBasis& basis, WaveletKey w, double s,
                          int depth);

/// Maps a finite besov_minus family through wavelet_to_dc term by term; the
/// constant term goes through the refinement expansion of 1_I.
template <class F>
DCCoeffs<F> dc_decompose(const DistCoeffs<F>& phi, const DipoleBasis& basis, int depth);

/// Expands every basis dipole (and m0 delta_{x_I}) into truncated Dirac
/// coefficients at level N.
template <class F>
TruncatedDist<F> dc_to_dist(const DCCoeffs<F>& dc, int N);

/// gamma(1_S) for an F-set S, from the finite dipole representation.
template <class F>
F dc_evaluate_indicator(const DCCoeffs<F>& dc, const FSet& set);

/// Coarse-to-fine coefficient recovery from indicator evaluations; the
/// identity dc_recover(assembled) == assembled pins coefficient uniqueness.
template <class F>
DCCoeffs<F> dc_recover(const DCCoeffs<F>& dc);

template <class F>
struct DDRep {
  struct DiracAtom {
    F c{0};
    Address z;
  };
  struct DipoleAtom {
    F b{0};
    Address x, y;
  };
  const GoodGrid* grid{nullptr};
  double s{0};
  std::vector<DiracAtom> diracs;
  std::vector<DipoleAtom> dipoles;
};

/// sum |c_i| + sum |b_j| d(x_j, y_j)^s.
template <class F>
double dd_cost(const DDRep<F>& rep) {
  double cost = 0;
  for (const auto& a : rep.diracs) cost += ScalarOps<F>::abs_d(a.c);
  for (const auto& a : rep.dipoles) {
    const PseudoDistance d = pseudo_distance(*rep.grid, a.x, a.y);
    cost += ScalarOps<F>::abs_d(a.b) * std::pow(d.value.get_d(), rep.s);
  }
  return cost;
}

/// Atomic representation through a dipole basis: every basis dipole becomes
/// a dipole atom, m0 becomes a Dirac atom.
template <class F>
DDRep<F> dd_decompose(const DistCoeffs<F>& phi, const DipoleBasis& basis, int depth);

// Explicit constants backing the tail bounds (see the derivations at the
// implementation sites): every increment of an F-set J with owner Q obeys
// |A^{i+1}_J - A^i_J|_{DC^s} <= M lambda^{si} |Q|^s |J|.
inline double dc_increment_majorant(const GoodGrid& g, double s, double owner_measure,
                                    double set_measure, int i) {
  return g.max_pairs_per_cell() * std::pow(g.lambda_d(), s * i) * std::pow(owner_measure, s) *
         set_measure;
}

/// DC -> B^{-s}_{1,1} operator constant: max(C, |delta_{x_I}|) <= this.
inline double dc_to_minus_constant(const GoodGrid& g, double s) {
  return 1.0 + 2.0 * g.cgr() / (1.0 - std::pow(g.lambda_d(), s));
}

// --- template implementations ---

namespace detail {

/// Contiguous run of level-L cells contained in the F-set.
std::pair<int64_t, int64_t> cells_inside(const GoodGrid& g, const FSet& j, int level);

}  // namespace detail

template <class F>
ParticleConfig<F> riemann_config(const GoodGrid& g, const DipoleBasis& basis, const FSet& j,
                                 int i) {
  const int k0 = j.k0();
  if (k0 + i > g.depth()) fail(Errc::depth_insufficient, "riemann_config beyond grid depth");
  ParticleConfig<F> out;
  if (i == 0) {
    out.push_back({F(ScalarOps<F>::from_rational(fset_measure(g, j))),
                   basis.address(basis.anchor_of(j))});
    return out;
  }
  const auto [b, e] = detail::cells_inside(g, j, k0 + i);
  out.reserve(static_cast<size_t>(e - b));
  for (int64_t c = b; c < e; ++c)
    out.push_back({F(MeasureAs<F>::cell(g, {k0 + i, c})),
                   basis.address(basis.cell_anchor({k0 + i, c}))});
  return out;
}

template <class F>
std::vector<DipoleTerm<F>> riemann_increment(const GoodGrid& g, const DipoleBasis& basis,
                                             const FSet& j, int i) {
  const int k0 = j.k0();
  const int level = k0 + i;
  if (level + 1 > g.depth()) fail(Errc::depth_insufficient, "riemann_increment beyond grid depth");
  std::vector<DipoleTerm<F>> out;

  auto emit = [&](CellRef owner, size_t pair_idx) {
    const WaveletKey w{owner.level, owner.index, static_cast<int32_t>(pair_idx)};
    const HaarPair& p = g.pair(w);
    const int64_t u = basis.group_anchor(w, 2);
    if (u == basis.group_anchor(w, 1)) {
      out.push_back({F(MeasureAs<F>::mu1(p)), w});
    } else if (u == basis.group_anchor(w, 0)) {
      out.push_back({F(-MeasureAs<F>::mu2(p)), w});
    } else {
      fail(Errc::invalid_argument, "union anchor inherited by neither group");
    }
  };

  if (j.is_group && i == 0) {
    // The owner itself refines the group: only pairs inside [begin, end).
    const CellRef r = j.owner;
    const auto pairs = g.pairs(r);
    for (size_t p = 0; p < pairs.size(); ++p)
      if (pairs[p].begin >= j.begin && pairs[p].end <= j.end) emit(r, p);
    return out;
  }
  const auto [b, e] = detail::cells_inside(g, j, level);
  for (int64_t c = b; c < e; ++c) {
    const CellRef r{level, c};
    const auto pairs = g.pairs(r);
    for (size_t p = 0; p < pairs.size(); ++p) emit(r, p);
  }
  return out;
}

template <class F>
DCCoeffs<F> wavelet_to_dc(const GoodGrid& g, const DipoleBasis& basis, WaveletKey w, double s,
                          int depth) {
  if (depth > g.depth()) fail(Errc::depth_insufficient, "truncation beyond grid depth");
  if (depth <= w.level) fail(Errc::depth_insufficient, "truncation above the wavelet owner");
  const HaarPair& p = g.pair(w);
  DCCoeffs<F> out{&g, &basis, s, F(0), {}, 0.0};
  out.add(w, F(1));

  const CellRef owner{w.level, w.cell};
  const double lam_s = std::pow(g.lambda_d(), s);
  const std::array<FSet, 2> groups{FSet::group(owner, p.begin, p.mid),
                                   FSet::group(owner, p.mid, p.end)};
  const std::array<F, 2> scale{F(MeasureAs<F>::inv_mu1(p)), F(-MeasureAs<F>::inv_mu2(p))};
  for (int side = 0; side < 2; ++side) {
    const int k0 = groups[static_cast<size_t>(side)].k0();
    for (int i = 0; i + k0 + 1 <= depth; ++i) {
      for (const DipoleTerm<F>& t :
           riemann_increment<F>(g, basis, groups[static_cast<size_t>(side)], i))
        out.add(t.pair, scale[static_cast<size_t>(side)] * t.m);
    }
    // Dropped increments i >= depth - k0, each bounded by
    // (1/|G|) M lambda^{si} |Q|^s |G| = M lambda^{si} |Q|^s.
    out.tail += g.max_pairs_per_cell() * std::pow(g.measure_d(owner), s) *
                std::pow(g.lambda_d(), s * (depth - k0)) / (1.0 - lam_s);
  }
  return out;
}

template <class F>
DCCoeffs<F> dc_decompose(const DistCoeffs<F>& phi, const DipoleBasis& basis, int depth) {
  if (phi.conv != Convention::besov_minus)
    fail(Errc::wrong_convention, "dc_decompose needs besov_minus coefficients");
  if (depth > basis.grid().depth())
    fail(Errc::depth_insufficient, "truncation beyond grid depth");
  const GoodGrid& g = basis.grid();
  DCCoeffs<F> out{&g, &basis, phi.s, F(0), {}, 0.0};

  if (!ScalarOps<F>::is_zero(phi.constant)) {
    // 1_I = delta_{x_I} + sum_i increments of the root cell.
    out.m0 = phi.constant;
    const FSet root = FSet::cell({0, 0});
    for (int i = 0; i + 1 <= depth; ++i)
      for (const DipoleTerm<F>& t : riemann_increment<F>(g, basis, root, i))
        out.add(t.pair, phi.constant * t.m);
    out.tail += ScalarOps<F>::abs_d(phi.constant) * g.max_pairs_per_cell() *
                std::pow(g.lambda_d(), phi.s * depth) / (1.0 - std::pow(g.lambda_d(), phi.s));
  }
  for (const auto& [w, a] : phi.terms) {
    const DCCoeffs<F> wdc = wavelet_to_dc<F>(g, basis, w, phi.s, depth);
    for (const auto& [pw, m] : wdc.terms) out.add(pw, a * m);
    out.tail += ScalarOps<F>::abs_d(a) * wdc.tail;
  }
  return out;
}

template <class F>
TruncatedDist<F> dc_to_dist(const DCCoeffs<F>& dc, int N) {
  const GoodGrid& g = *dc.grid;
  if (N > g.depth()) fail(Errc::depth_insufficient, "expansion beyond grid depth");
  TruncatedDist<F> out;
  out.level = N;
  out.coeffs = DistCoeffs<F>{&g, dc.s, Convention::besov_minus, F(0), {}};

  if (!ScalarOps<F>::is_zero(dc.m0)) {
    const Address xi = dc.basis->address(dc.basis->cell_anchor({0, 0}));
    out.coeffs.constant += dc.m0;
    dirac_accumulate(g, xi, N, dc.m0, out.coeffs);
    out.tail += ScalarOps<F>::abs_d(dc.m0) * dirac_tail_bound(g, g.measure_d(g.cell_at(xi, N)), dc.s);
  }
  for (const auto& [w, m] : dc.terms) {
    const Address x = dc.basis->address(dc.basis->group_anchor(w, 0));
    const Address y = dc.basis->address(dc.basis->group_anchor(w, 1));
    const F neg(-m);
    dirac_accumulate(g, x, N, m, out.coeffs);
    dirac_accumulate(g, y, N, neg, out.coeffs);
    const double am = ScalarOps<F>::abs_d(m);
    out.tail += am * dirac_tail_bound(g, g.measure_d(g.cell_at(x, N)), dc.s);
    out.tail += am * dirac_tail_bound(g, g.measure_d(g.cell_at(y, N)), dc.s);
  }
  // Refinement terms missing from dc itself, pushed through the operator
  // norm of DC -> B^{-s}.
  out.tail += dc.tail * dc_to_minus_constant(g, dc.s);
  return out;
}

template <class F>
F dc_evaluate_indicator(const DCCoeffs<F>& dc, const FSet& set) {
  const GoodGrid& g = *dc.grid;
  const auto [lo, hi] = leaf_interval(g, set);
  auto inside = [&](int64_t leaf) { return leaf >= lo && leaf < hi; };
  F acc(0);
  if (inside(dc.basis->cell_anchor({0, 0}))) acc += dc.m0;
  for (const auto& [w, m] : dc.terms) {
    const bool in1 = inside(dc.basis->group_anchor(w, 0));
    const bool in2 = inside(dc.basis->group_anchor(w, 1));
    if (in1 && !in2) acc += m;
    if (in2 && !in1) acc -= m;
  }
  return acc;
}

template <class F>
DCCoeffs<F> dc_recover(const DCCoeffs<F>& dc) {
  const GoodGrid& g = *dc.grid;
  DCCoeffs<F> rec{&g, dc.basis, dc.s, F(0), {}, 0.0};
  rec.m0 = dc_evaluate_indicator(dc, FSet::cell({0, 0}));
  for (int k = 0; k < g.depth(); ++k) {
    for (int64_t c = 0; c < g.cell_count(k); ++c) {
      const auto pairs = g.pairs({k, c});
      for (size_t p = 0; p < pairs.size(); ++p) {
        const WaveletKey w{k, c, static_cast<int32_t>(p)};
        const FSet s1 = FSet::group({k, c}, pairs[p].begin, pairs[p].mid);
        const F val = dc_evaluate_indicator(dc, s1) - dc_evaluate_indicator(rec, s1);
        rec.add(w, val);
      }
    }
  }
  return rec;
}

template <class F>
DDRep<F> dd_decompose(const DistCoeffs<F>& phi, const DipoleBasis& basis, int depth) {
  const DCCoeffs<F> dc = dc_decompose(phi, basis, depth);
  DDRep<F> rep{&basis.grid(), phi.s, {}, {}};
  if (!ScalarOps<F>::is_zero(dc.m0))
    rep.diracs.push_back({dc.m0, basis.address(basis.cell_anchor({0, 0}))});
  for (const auto& [w, m] : dc.terms)
    rep.dipoles.push_back(
        {m, basis.address(basis.group_anchor(w, 0)), basis.address(basis.group_anchor(w, 1))});
  return rep;
}

}  // namespace gb
