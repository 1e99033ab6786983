#include <doctest.h>

#include <map>

#include "gridbesov/dipole.hpp"
#include "gridbesov/experiments.hpp"
#include "gridbesov/transform.hpp"
#include "helpers.hpp"

using namespace gb;

namespace {

std::vector<GoodGrid> small_grids() {
  std::vector<GoodGrid> gs;
  gs.push_back(build_dyadic(4));
  gs.push_back(build_uniform(3, 3));
  gs.push_back(build_random(13, 3, 4, rat_parse("0.6"), rat_parse("0.08")));
  return gs;
}

// multiset of (leaf, mass) with exact cancellation
std::map<int64_t, Rational> as_multiset(const GoodGrid& g, const ParticleConfig<Rational>& cfg) {
  std::map<int64_t, Rational> out;
  for (const auto& p : cfg) {
    out[g.leaf_of(p.location)] += p.mass;
    if (sgn(out[g.leaf_of(p.location)]) == 0) out.erase(g.leaf_of(p.location));
  }
  return out;
}

int max_valid_i(const GoodGrid& g, const FSet& j) { return g.depth() - j.k0() - 1; }

}  // namespace

TEST_SUITE_BEGIN("dipole");

TEST_CASE("anchor rules") {
  const GoodGrid g = build_dyadic(4);
  const DipoleBasis left = build_dipole_basis(g, AnchorRule::leftmost);
  SUBCASE("leftmost descends through first children") {
    CHECK(left.cell_anchor({0, 0}) == 0);
    CHECK(left.cell_anchor({1, 1}) == g.cell({1, 1}).leaf_begin);
    // a two-cell group anchors at the leftmost leaf of its first cell
    const GoodGrid q = build_uniform(2, 4);
    const DipoleBasis lb = build_dipole_basis(q, AnchorRule::leftmost);
    const WaveletKey top{0, 0, 0};  // groups {0,1} and {2,3}
    CHECK(lb.group_anchor(top, 0) == q.cell(q.child({0, 0}, 0)).leaf_begin);
    CHECK(lb.group_anchor(top, 1) == q.cell(q.child({0, 0}, 2)).leaf_begin);
  }
  SUBCASE("compatibility holds exhaustively on depth-4 grids, both rules") {
    for (const GoodGrid& grid : small_grids()) {
      CHECK(check_anchor_compatibility(grid, build_dipole_basis(grid, AnchorRule::leftmost)));
      CHECK(check_anchor_compatibility(grid,
                                       build_dipole_basis(grid, AnchorRule::seeded_random, 5)));
    }
  }
  SUBCASE("seeded rule is deterministic") {
    const DipoleBasis a = build_dipole_basis(g, AnchorRule::seeded_random, 9);
    const DipoleBasis b = build_dipole_basis(g, AnchorRule::seeded_random, 9);
    for (int k = 0; k <= g.depth(); ++k)
      for (int64_t i = 0; i < g.cell_count(k); ++i)
        CHECK(a.cell_anchor({k, i}) == b.cell_anchor({k, i}));
  }
}

TEST_CASE("riemann configurations") {
  const GoodGrid g = build_dyadic(4);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  SUBCASE("step 0 is the weighted anchor") {
    const auto a0 = riemann_config<Rational>(g, basis, FSet::cell({0, 0}), 0);
    REQUIRE(a0.size() == 1);
    CHECK(a0[0].mass == 1);
    CHECK(g.leaf_of(a0[0].location) == 0);
  }
  SUBCASE("step 1 on the dyadic root splits the mass in half") {
    const auto a1 = riemann_config<Rational>(g, basis, FSet::cell({0, 0}), 1);
    REQUIRE(a1.size() == 2);
    CHECK(a1[0].mass == rat(1, 2));
    CHECK(a1[1].mass == rat(1, 2));
    CHECK(g.leaf_of(a1[0].location) == 0);
    CHECK(g.leaf_of(a1[1].location) == g.cell({1, 1}).leaf_begin);
  }
  SUBCASE("total mass equals |J| for every F-set and step") {
    for (const GoodGrid& grid : small_grids()) {
      const DipoleBasis b = build_dipole_basis(grid, AnchorRule::seeded_random, 3);
      for (const FSet& j : all_fsets(grid)) {
        for (int i = 0; i <= max_valid_i(grid, j) + 1; ++i) {
          if (j.k0() + i > grid.depth()) continue;
          Rational total(0);
          for (const auto& p : riemann_config<Rational>(grid, b, j, i)) total += p.mass;
          CHECK(total == fset_measure(grid, j));
        }
      }
    }
  }
  SUBCASE("beyond the grid depth is an error") {
    CHECK(error_code_of([&] {
            (void)riemann_config<Rational>(g, basis, FSet::cell({0, 0}), 5);
          }) == Errc::depth_insufficient);
  }
}

TEST_CASE("riemann increments telescope exactly") {
  SUBCASE("dyadic root, leftmost: single term -1/2") {
    const GoodGrid g = build_dyadic(4);
    const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
    const auto inc = riemann_increment<Rational>(g, basis, FSet::cell({0, 0}), 0);
    REQUIRE(inc.size() == 1);
    CHECK(inc[0].m == rat(-1, 2));
    CHECK(inc[0].pair == WaveletKey{0, 0, 0});
  }
  SUBCASE("multiset identity for all F-sets, steps and rules") {
    for (const GoodGrid& grid : small_grids()) {
      for (const AnchorRule rule : {AnchorRule::leftmost, AnchorRule::seeded_random}) {
        const DipoleBasis basis = build_dipole_basis(grid, rule, 17);
        for (const FSet& j : all_fsets(grid)) {
          for (int i = 0; i <= max_valid_i(grid, j); ++i) {
            auto lhs = as_multiset(grid, riemann_config<Rational>(grid, basis, j, i + 1));
            auto rhs = as_multiset(grid, riemann_config<Rational>(grid, basis, j, i));
            for (const auto& t : riemann_increment<Rational>(grid, basis, j, i)) {
              const int64_t x1 = basis.group_anchor(t.pair, 0);
              const int64_t x2 = basis.group_anchor(t.pair, 1);
              rhs[x1] += t.m;
              if (sgn(rhs[x1]) == 0) rhs.erase(x1);
              rhs[x2] -= t.m;
              if (sgn(rhs[x2]) == 0) rhs.erase(x2);
            }
            CHECK(lhs == rhs);
          }
        }
      }
    }
  }
  SUBCASE("one coefficient per pair, pairs per owner = children - 1") {
    const GoodGrid g = build_uniform(3, 3);
    const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
    const auto inc = riemann_increment<Rational>(g, basis, FSet::cell({0, 0}), 1);
    // level-1 owners: 3 cells, 2 pairs each
    CHECK(inc.size() == 6);
    std::map<int64_t, int> per_owner;
    for (const auto& t : inc) per_owner[t.pair.cell]++;
    for (const auto& [cell, count] : per_owner) CHECK(count == 3 - 1);
  }
  SUBCASE("increment DC-norm obeys the geometric majorant") {
    const GoodGrid g = build_dyadic(6);
    const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
    const double s = 0.5;
    std::vector<double> norms;
    for (int i = 0; i <= 5; ++i) {
      DCCoeffs<Rational> inc{&g, &basis, s, Rational(0), {}, 0.0};
      for (const auto& t : riemann_increment<Rational>(g, basis, FSet::cell({0, 0}), i))
        inc.add(t.pair, t.m);
      const double norm = dc_norm(inc);
      norms.push_back(norm);
      CHECK(norm <= dc_increment_majorant(g, s, 1.0, 1.0, i) * (1 + 1e-12));
    }
    CHECK(log_slope(norms) == doctest::Approx(s * std::log(0.5)).epsilon(1e-9));
  }
}

TEST_CASE("wavelets expand into dipoles") {
  const GoodGrid g = build_dyadic(5);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  const double s = 0.5;
  SUBCASE("the leading coefficient is 1 on the wavelet's own dipole") {
    const WaveletKey w{1, 1, 0};
    const auto dc = wavelet_to_dc<Rational>(g, basis, w, s, 5);
    REQUIRE(dc.terms.count(w) == 1);
    CHECK(dc.terms.at(w) == 1);
  }
  SUBCASE("expansion evaluates back to the wavelet exactly at full depth") {
    for (const WaveletKey w : {WaveletKey{0, 0, 0}, WaveletKey{2, 3, 0}, WaveletKey{4, 7, 0}}) {
      const auto dc = wavelet_to_dc<Rational>(g, basis, w, s, 5);
      const auto dist = dc_to_dist(dc, 5);
      DistCoeffs<Rational> expect{&g, s, Convention::besov_minus, Rational(0), {}};
      expect.add(w, Rational(1));
      CHECK(dist.coeffs.terms == expect.terms);
      CHECK(dist.coeffs.constant == 0);
    }
  }
  SUBCASE("partial truncation stays within the tail bound") {
    const WaveletKey w{0, 0, 0};
    const auto dc = wavelet_to_dc<Rational>(g, basis, w, s, 3);
    const auto dist = dc_to_dist(dc, 5);
    DistCoeffs<Rational> expect{&g, s, Convention::besov_minus, Rational(0), {}};
    expect.add(w, Rational(1));
    const double err = norm_minus(plus(dist.coeffs, scaled(expect, Rational(-1))));
    CHECK(err > 0);
    CHECK(err <= dist.tail);
  }
  SUBCASE("DC-norm over |Q|^s is uniformly bounded") {
    for (const GoodGrid& grid :
         {build_dyadic(5), build_random(19, 4, 3, rat_parse("0.7"), rat_parse("0.1"))}) {
      const DipoleBasis b = build_dipole_basis(grid, AnchorRule::leftmost);
      const double c_explicit =
          1.0 + 2.0 * grid.max_pairs_per_cell() / (1.0 - std::pow(grid.lambda_d(), s));
      for (int k = 0; k < grid.depth(); ++k)
        for (int64_t i = 0; i < grid.cell_count(k); ++i)
          for (size_t p = 0; p < grid.pairs({k, i}).size(); ++p) {
            const WaveletKey w{k, i, static_cast<int32_t>(p)};
            const auto dc = wavelet_to_dc<Rational>(grid, b, w, s, grid.depth());
            const double ratio = dc_norm(dc) / std::pow(grid.measure_d({k, i}), s);
            CHECK(ratio <= c_explicit);
          }
    }
  }
}

TEST_CASE("dc norm") {
  const GoodGrid g = build_uniform(3, 3);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  SUBCASE("single basis dipole scores |Q|^s") {
    DCCoeffs<Rational> c{&g, &basis, 0.5, Rational(0), {}, 0.0};
    c.add({1, 2, 1}, Rational(1));
    CHECK(dc_norm(c) == doctest::Approx(std::pow(g.measure_d({1, 2}), 0.5)));
  }
  SUBCASE("m0 alone scores 1") {
    DCCoeffs<Rational> c{&g, &basis, 0.5, Rational(1), {}, 0.0};
    CHECK(dc_norm(c) == doctest::Approx(1.0));
  }
  SUBCASE("homogeneity") {
    Rng rng(3);
    DCCoeffs<Rational> c{&g, &basis, 0.5, rat(1, 3), {}, 0.0};
    for (int t = 0; t < 6; ++t) {
      const int level = static_cast<int>(rng.below(3));
      const int64_t slot = static_cast<int64_t>(rng.below(static_cast<uint64_t>(g.pair_count(level))));
      const CellRef owner = g.pair_owner(level, slot);
      c.add({level, owner.index, static_cast<int32_t>(slot - g.pair_slot({level, owner.index, 0}))},
            rng.signed_unit());
    }
    const double base = dc_norm(c);
    DCCoeffs<Rational> half = c;
    half.m0 *= rat(-1, 2);
    for (auto& [w, v] : half.terms) v *= rat(-1, 2);
    CHECK(dc_norm(half) == doctest::Approx(0.5 * base));
  }
}

TEST_CASE("dc decomposition") {
  const GoodGrid g = build_dyadic(4);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  const double s = 0.5;
  SUBCASE("a single wavelet matches wavelet_to_dc") {
    const WaveletKey w{1, 0, 0};
    DistCoeffs<Rational> phi{&g, s, Convention::besov_minus, Rational(0), {}};
    phi.add(w, Rational(1));
    const auto dc = dc_decompose(phi, basis, 4);
    const auto direct = wavelet_to_dc<Rational>(g, basis, w, s, 4);
    CHECK(dc.terms == direct.terms);
    CHECK(dc.m0 == 0);
  }
  SUBCASE("dipole of basis anchors recovers coefficient 1 on that dipole") {
    const WaveletKey w{0, 0, 0};
    const Address x = basis.address(basis.group_anchor(w, 0));
    const Address y = basis.address(basis.group_anchor(w, 1));
    const auto phi = dipole_coeffs<Rational>(g, x, y, s, 4);
    const auto dc = dc_decompose(phi.coeffs, basis, 4);
    REQUIRE(dc.terms.count(w) == 1);
    CHECK(dc.terms.at(w) == 1);  // exact on the dyadic grid (one pair per cell)
  }
  SUBCASE("wrong convention is rejected") {
    DistCoeffs<Rational> phi{&g, s, Convention::besov_plus, Rational(1), {}};
    CHECK(error_code_of([&] { (void)dc_decompose(phi, basis, 4); }) == Errc::wrong_convention);
  }
  SUBCASE("roundtrip is exact at full depth and bounded at partial depth") {
    for (const AnchorRule rule : {AnchorRule::leftmost, AnchorRule::seeded_random}) {
      const DipoleBasis b = build_dipole_basis(g, rule, 23);
      for (int t = 0; t < 8; ++t) {
        Rng rng(stream_seed(67, static_cast<uint64_t>(t)));
        const auto phi = random_sparse_minus<Rational>(g, s, 3, 8, rng);
        const auto dc = dc_decompose(phi, b, 4);
        const auto rt = dc_to_dist(dc, 4);
        CHECK(rt.coeffs.terms == phi.terms);
        CHECK(rt.coeffs.constant == phi.constant);

        const auto dc3 = dc_decompose(phi, b, 3);
        const auto rt3 = dc_to_dist(dc3, 3);
        const double err = norm_minus(plus(rt3.coeffs, scaled(phi, Rational(-1))));
        CHECK(err <= rt3.tail);
      }
    }
  }
  SUBCASE("norm contract against norm_minus") {
    Rng rng(91);
    const double c_upper = 1.0 + 2.0 * g.max_pairs_per_cell() / (1.0 - std::pow(0.5, s));
    const double c_lower = dc_to_minus_constant(g, s);
    for (int t = 0; t < 15; ++t) {
      const auto phi = random_sparse_minus<Rational>(g, s, 4, 10, rng);
      const double ratio = dc_norm(dc_decompose(phi, basis, 4)) / norm_minus(phi);
      CHECK(ratio <= c_upper * (1 + 1e-12));
      CHECK(ratio >= 1.0 / c_lower * (1 - 1e-12));
    }
  }
}

TEST_CASE("dc expansion norm bound") {
  const GoodGrid g = build_uniform(3, 3);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::seeded_random, 29);
  const double s = 0.6;
  Rng rng(37);
  for (int t = 0; t < 10; ++t) {
    DCCoeffs<Rational> c{&g, &basis, s, rng.signed_unit(), {}, 0.0};
    for (int k = 0; k < 8; ++k) {
      const int level = static_cast<int>(rng.below(3));
      const int64_t slot = static_cast<int64_t>(rng.below(static_cast<uint64_t>(g.pair_count(level))));
      const CellRef owner = g.pair_owner(level, slot);
      c.add({level, owner.index, static_cast<int32_t>(slot - g.pair_slot({level, owner.index, 0}))},
            rng.signed_unit());
    }
    const auto dist = dc_to_dist(c, 3);
    CHECK(norm_minus(dist.coeffs) <= dc_to_minus_constant(g, s) * dc_norm(c) * (1 + 1e-12));
  }
}

TEST_CASE("dc coefficient recovery is the identity") {
  for (const GoodGrid& g : small_grids()) {
    for (const AnchorRule rule : {AnchorRule::leftmost, AnchorRule::seeded_random}) {
      const DipoleBasis basis = build_dipole_basis(g, rule, 43);
      Rng rng(stream_seed(47, static_cast<uint64_t>(rule == AnchorRule::leftmost)));
      DCCoeffs<Rational> c{&g, &basis, 0.5, rng.signed_unit(), {}, 0.0};
      for (int k = 0; k < 10; ++k) {
        const int level = static_cast<int>(rng.below(static_cast<uint64_t>(g.depth())));
        if (g.pair_count(level) == 0) continue;
        const int64_t slot =
            static_cast<int64_t>(rng.below(static_cast<uint64_t>(g.pair_count(level))));
        const CellRef owner = g.pair_owner(level, slot);
        c.add({level, owner.index,
               static_cast<int32_t>(slot - g.pair_slot({level, owner.index, 0}))},
              rng.signed_unit());
      }
      const auto rec = dc_recover(c);
      CHECK(rec.m0 == c.m0);
      CHECK(rec.terms == c.terms);
    }
  }
}

TEST_CASE("recovery shortcut agrees only without the dirac term") {
  const GoodGrid g = build_dyadic(3);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  const WaveletKey w{1, 0, 0};
  SUBCASE("m0 = 0: the plain indicator evaluation already recovers m") {
    DCCoeffs<Rational> c{&g, &basis, 0.5, Rational(0), {}, 0.0};
    c.add(w, rat(2, 3));
    const HaarPair& p = g.pair(w);
    const Rational direct =
        dc_evaluate_indicator(c, FSet::group({w.level, w.cell}, p.begin, p.mid));
    CHECK(direct == rat(2, 3));
  }
  SUBCASE("m0 != 0 shifts the shortcut exactly by the dirac membership") {
    DCCoeffs<Rational> c{&g, &basis, 0.5, Rational(1), {}, 0.0};
    c.add(w, rat(2, 3));
    const HaarPair& p = g.pair(w);
    // leftmost anchor of I sits inside this S1, so the shortcut overshoots
    const Rational direct =
        dc_evaluate_indicator(c, FSet::group({w.level, w.cell}, p.begin, p.mid));
    CHECK(direct == rat(2, 3) + 1);
    CHECK(dc_recover(c).terms.at(w) == rat(2, 3));
  }
}

TEST_CASE("dirac-dipole atomic representations") {
  const GoodGrid g = build_dyadic(5);
  const DipoleBasis basis = build_dipole_basis(g, AnchorRule::leftmost);
  const double s = 0.5;
  SUBCASE("costs of single atoms") {
    DDRep<Rational> rep{&g, s, {}, {}};
    rep.diracs.push_back({Rational(1), Address{{0}}});
    CHECK(dd_cost(rep) == doctest::Approx(1.0));
    rep.diracs.clear();
    rep.dipoles.push_back({Rational(1), Address{{0}}, Address{{1}}});
    CHECK(dd_cost(rep) == doctest::Approx(1.0));  // root separation, d = 1
    rep.dipoles.push_back({rat(1, 2), Address{{0, 0}}, Address{{0, 1}}});
    const double two = dd_cost(rep);
    std::swap(rep.dipoles[0], rep.dipoles[1]);
    CHECK(dd_cost(rep) == doctest::Approx(two));  // order invariant
  }
  SUBCASE("decomposition cost equals the dc norm") {
    Rng rng(59);
    for (int t = 0; t < 10; ++t) {
      const auto phi = random_sparse_minus<Rational>(g, s, 4, 10, rng);
      const auto rep = dd_decompose(phi, basis, 5);
      const auto dc = dc_decompose(phi, basis, 5);
      // every basis dipole separates exactly at its owner cell
      CHECK(dd_cost(rep) == doctest::Approx(dc_norm(dc)).epsilon(1e-12));
    }
  }
  SUBCASE("wavelet cost is comparable to |Q|^s") {
    const WaveletKey w{2, 2, 0};
    DistCoeffs<Rational> phi{&g, s, Convention::besov_minus, Rational(0), {}};
    phi.add(w, Rational(1));
    const double cost = dd_cost(dd_decompose(phi, basis, 5));
    const double qs = std::pow(g.measure_d({2, 2}), s);
    CHECK(cost >= qs);
    CHECK(cost <= (1.0 + 2.0 / (1.0 - std::pow(0.5, s))) * qs);
  }
  SUBCASE("a truncated dirac yields one dominant dirac atom") {
    const auto d = dirac_coeffs<Rational>(g, Address{{0, 0, 0, 0, 0}}, s, 5);
    const auto rep = dd_decompose(d.coeffs, basis, 5);
    REQUIRE(rep.diracs.size() == 1);
    CHECK(rep.diracs[0].c == 1);
    CHECK(g.leaf_of(rep.diracs[0].z) == 0);
  }
  SUBCASE("two-sided cost ratio on random inputs") {
    Rng rng(61);
    double lo = 1e300, hi = 0;
    for (int t = 0; t < 20; ++t) {
      const auto phi = random_sparse_minus<Rational>(g, s, 4, 8, rng);
      const double r = dd_cost(dd_decompose(phi, basis, 5)) / norm_minus(phi);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(lo >= 1.0 / dc_to_minus_constant(g, s) * (1 - 1e-12));
    CHECK(hi <= (1.0 + 2.0 / (1.0 - std::pow(0.5, s))) * (1 + 1e-12));
  }
}

TEST_SUITE_END();
