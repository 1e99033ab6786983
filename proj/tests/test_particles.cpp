#include <doctest.h>

#include "gridbesov/experiments.hpp"
#include "gridbesov/particles.hpp"
#include "gridbesov/transform.hpp"
#include "helpers.hpp"

using namespace gb;

TEST_SUITE_BEGIN("particles");

TEST_CASE("dirac truncations") {
  const GoodGrid g = build_dyadic(4);
  const Address x{{0, 0, 0, 0}};
  SUBCASE("level 0 is the constant 1") {
    const auto f = dirac_truncate<Rational>(g, x, 0);
    CHECK(f.values == std::vector<Rational>{rat(1)});
  }
  SUBCASE("level 2 leftmost is 4 on [0,1/4]") {
    const auto f = dirac_truncate<Rational>(g, x, 2);
    CHECK(f.values == std::vector<Rational>{rat(4), rat(0), rat(0), rat(0)});
  }
  SUBCASE("unit mass at every level") {
    for (int j = 0; j <= 4; ++j) CHECK(integral(dirac_truncate<Rational>(g, x, j)) == 1);
  }
  SUBCASE("beyond depth is an error") {
    CHECK(error_code_of([&] { (void)dirac_truncate<Rational>(g, x, 5); }) ==
          Errc::level_out_of_range);
  }
}

TEST_CASE("dirac coefficients on the dyadic grid") {
  const GoodGrid g = build_dyadic(10);
  const Address x{{0, 1, 0, 1, 1, 0, 0, 1, 0, 1}};
  const double s = 0.5;
  const int n = 8;
  const auto d = dirac_coeffs<Rational>(g, x, s, n);
  CHECK(d.coeffs.constant == 1);
  REQUIRE(d.coeffs.terms.size() == 8);  // one wavelet per level
  for (const auto& [w, a] : d.coeffs.terms) CHECK(ScalarOps<Rational>::abs(a) == rat(1, 2));

  SUBCASE("norm matches the geometric series") {
    double oracle = 1.0;
    for (int j = 0; j < n; ++j) oracle += 0.5 * std::pow(2.0, -s * j);
    CHECK(norm_minus(d.coeffs) == doctest::Approx(oracle).epsilon(1e-14));
  }
  SUBCASE("synthesizing the coefficients reproduces the truncated dirac exactly") {
    const auto back = synthesize(convert(d.coeffs, Convention::plain), s, n);
    CHECK(back.values == dirac_truncate<Rational>(g, x, n).values);
  }
  SUBCASE("tail bound covers the actual remainder") {
    const auto deep = dirac_coeffs<Rational>(g, x, s, 10);
    const auto diff = plus(deep.coeffs, scaled(d.coeffs, Rational(-1)));
    CHECK(norm_minus(diff) <= d.tail);
    CHECK(d.observed_tail <= d.tail);
  }
  SUBCASE("successive truncations shrink geometrically") {
    std::vector<double> diffs;
    for (int m = 2; m < 10; ++m) {
      const auto a = dirac_coeffs<Rational>(g, x, s, m);
      const auto b = dirac_coeffs<Rational>(g, x, s, m + 1);
      diffs.push_back(norm_minus(plus(b.coeffs, scaled(a.coeffs, Rational(-1)))));
    }
    CHECK(std::exp(log_slope(diffs)) == doctest::Approx(std::pow(0.5, s)).epsilon(1e-9));
  }
}

TEST_CASE("increment projection on general grids is exact") {
  const GoodGrid g = build_random(21, 5, 4, rat_parse("0.6"), rat_parse("0.08"));
  Rng rng(9);
  const Address x = random_address(g, rng);
  for (int n : {1, 3, 5}) {
    const auto d = dirac_coeffs<Rational>(g, x, 0.3, n);
    const auto back = synthesize(convert(d.coeffs, Convention::plain), 0.3, n);
    CHECK(back.values == dirac_truncate<Rational>(g, x, n).values);
  }
}

TEST_CASE("closed-form weight disagrees with the projection on the dyadic grid") {
  const GoodGrid g = build_dyadic(2);
  const CellRef root{0, 0};
  const HaarPair& p = g.pairs(root)[0];
  const Rational w = closed_form_increment_weight(g, root, p, g.child(root, 0));
  CHECK(w == rat(1, 4));  // the exact projection coefficient is 1/2
  const auto d = dirac_coeffs<Rational>(g, Address{{0, 0}}, 0.5, 1);
  CHECK(d.coeffs.terms.begin()->second == rat(1, 2));
}

TEST_CASE("dipole coefficients") {
  const GoodGrid g = build_dyadic(10);
  const double s = 0.5;
  const Address x{{0, 0, 0, 0, 0, 0, 0, 0, 0, 0}};
  const Address y{{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}};
  SUBCASE("root-separated norm approaches 1 + r/(1-r)") {
    const double limit = 1.0 + std::pow(2.0, -s) / (1.0 - std::pow(2.0, -s));
    const auto t = dipole_coeffs<Rational>(g, x, y, s, 10);
    CHECK(t.coeffs.constant == 0);
    CHECK(norm_minus(t.coeffs) <= limit);
    CHECK(norm_minus(t.coeffs) + t.tail >= limit);
    double oracle = 1.0;
    for (int j = 1; j < 10; ++j) oracle += std::pow(2.0, -s * j);
    CHECK(norm_minus(t.coeffs) == doctest::Approx(oracle).epsilon(1e-13));
  }
  SUBCASE("coefficients above the separation level cancel exactly") {
    Rng rng(55);
    for (int n : {2, 4, 6}) {
      const auto [a, b] = random_separated_pair(g, n, rng);
      const auto t = dipole_coeffs<Rational>(g, a, b, s, 10);
      CHECK(t.coeffs.constant == 0);
      REQUIRE(!t.coeffs.terms.empty());
      CHECK(t.coeffs.terms.begin()->first.level == n);
    }
  }
  SUBCASE("antisymmetry") {
    const auto xy = dipole_coeffs<Rational>(g, x, y, s, 6);
    const auto yx = dipole_coeffs<Rational>(g, y, x, s, 6);
    CHECK(plus(xy.coeffs, yx.coeffs).terms.empty());
  }
  SUBCASE("identical addresses are rejected") {
    CHECK(error_code_of([&] { (void)dipole_coeffs<Rational>(g, x, x, s, 10); }) ==
          Errc::identical_address);
    // equal within the truncation depth counts as identical
    const Address close{{0, 0, 0, 1}, ExtensionRule::first_child};
    const Address close2{{0, 0, 0, 1, 1}, ExtensionRule::first_child};
    CHECK(error_code_of([&] { (void)dipole_coeffs<Rational>(g, close, close2, s, 4); }) ==
          Errc::identical_address);
  }
}

TEST_CASE("particle configurations") {
  const GoodGrid g = build_uniform(4, 3);
  const double s = 0.4;
  Rng rng(71);
  const Address x = random_address(g, rng);
  const Address y = random_address(g, rng);
  SUBCASE("single unit particle is the dirac") {
    const auto c = config_coeffs<Rational>(g, {{Rational(1), x}}, s, 4);
    const auto d = dirac_coeffs<Rational>(g, x, s, 4);
    CHECK(c.coeffs.terms == d.coeffs.terms);
    CHECK(c.coeffs.constant == d.coeffs.constant);
    CHECK(c.tail == doctest::Approx(d.tail));
  }
  SUBCASE("masses (1,-1) make the dipole") {
    const auto c = config_coeffs<Rational>(g, {{Rational(1), x}, {Rational(-1), y}}, s, 4);
    const auto d = dipole_coeffs<Rational>(g, x, y, s, 4);
    CHECK(c.coeffs.terms == d.coeffs.terms);
  }
  SUBCASE("pairs against 1_I to the total mass") {
    const ParticleConfig<Rational> cfg{{rat(2, 3), x}, {rat(-1, 5), y}};
    const auto c = config_coeffs<Rational>(g, cfg, s, 4);
    const auto one = analyze(constant_function<Rational>(g, Rational(1)), s);
    CHECK(pairing(c.coeffs, one) == rat(2, 3) + rat(-1, 5));
  }
  SUBCASE("linear in the masses") {
    const auto a = config_coeffs<Rational>(g, {{rat(1, 2), x}}, s, 4);
    const auto b = config_coeffs<Rational>(g, {{rat(1, 3), y}}, s, 4);
    const auto both = config_coeffs<Rational>(g, {{rat(1, 2), x}, {rat(1, 3), y}}, s, 4);
    CHECK(plus(a.coeffs, b.coeffs).terms == both.coeffs.terms);
  }
  SUBCASE("empty configuration is the zero distribution") {
    const auto c = config_coeffs<Rational>(g, {}, s, 4);
    CHECK(c.coeffs.terms.empty());
    CHECK(c.coeffs.constant == 0);
    CHECK(c.tail == 0.0);
  }
}

TEST_CASE("dipole norm bounds") {
  const GoodGrid g = build_dyadic(10);
  const double s = 0.5;
  SUBCASE("root separated pair brackets the limit value") {
    const auto b = dipole_norm_bounds(g, Address{{0}}, Address{{1}}, s);
    const double limit = 1.0 + std::pow(2.0, -s) / (1.0 - std::pow(2.0, -s));
    CHECK(b.lower <= limit);
    CHECK(b.upper >= limit);
    CHECK(b.separation == CellRef{0, 0});
    CHECK(b.ratio > 1.0);
  }
  SUBCASE("self-similarity: fixed relative truncation keeps the ratio constant") {
    std::vector<double> ratios;
    for (int n = 0; n <= 6; ++n) {
      Address a{std::vector<uint32_t>(static_cast<size_t>(n), 0)};
      Address b = a;
      a.path.push_back(0);
      b.path.push_back(1);
      const auto t = dipole_coeffs<Rational>(g, a, b, s, n + 4);
      ratios.push_back(norm_minus(t.coeffs) / std::pow(g.measure_d({n, 0}), s));
    }
    for (double r : ratios) CHECK(std::fabs(r - ratios[0]) <= 1e-9);
  }
  SUBCASE("norm scales by 2^{-ns} with the separation level") {
    Rng rng(83);
    for (int n : {1, 3, 5}) {
      const auto [a, b] = random_separated_pair(g, n, rng);
      const auto t = dipole_coeffs<Rational>(g, a, b, s, n + 4);
      const auto [a0, b0] = random_separated_pair(g, 0, rng);
      const auto t0 = dipole_coeffs<Rational>(g, a0, b0, s, 4);
      CHECK(norm_minus(t.coeffs) ==
            doctest::Approx(norm_minus(t0.coeffs) * std::pow(2.0, -n * s)).epsilon(1e-12));
    }
  }
  SUBCASE("certified interval respects the equivalence constant on random grids") {
    const GoodGrid rnd = build_random(31, 6, 3, rat_parse("0.7"), rat_parse("0.1"));
    Rng rng(101);
    for (int t = 0; t < 25; ++t) {
      const int n = static_cast<int>(rng.below(5));
      const auto [a, b] = random_separated_pair(rnd, n, rng);
      CHECK_NOTHROW((void)dipole_norm_bounds(rnd, a, b, 0.5));
    }
  }
}

TEST_SUITE_END();
