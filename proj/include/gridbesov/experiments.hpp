#pragma once

#include <string>

#include <json.hpp>

#include "gridbesov/dipole.hpp"
#include "gridbesov/random.hpp"
#include "gridbesov/transform.hpp"

namespace gb {

// Batch probes of the norm-equivalence contracts. Each runner draws
// `trials` seeded samples, records per-trial data, and grades itself
// against the explicit constants of the grid (2/lambda_star for duality,
// the geometric-series constants elsewhere). Reports are JSON with a
// stable schema; fixed (seed, spec) gives byte-identical files in
// rational mode.
struct ExperimentSpec {
  std::string kind;  // holder-equiv | duality | dirac-decay | dipole-ratio |
                     // riemann-convergence | dc-equiv | dd-equiv
  double s{0.5};
  int depth{6};
  int trials{100};
  uint64_t seed{1};
  NumericMode mode{NumericMode::rational};
};

nlohmann::json run_experiment(const GoodGrid& g, const ExperimentSpec& spec);

nlohmann::json grid_summary_json(const GoodGrid& g);

/// Least-squares slope of ln(y) against x, ignoring non-positive y.
double log_slope(const std::vector<double>& y);

// Seeded sample builders shared with the test suites.
template <class F>
StepFunction<F> random_step(const GoodGrid& g, int level, Rng& rng) {
  StepFunction<F> f{&g, level, {}};
  const int64_t n = g.cell_count(level);
  f.values.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<F, Rational>) {
      f.values.push_back(rng.signed_unit());
    } else {
      f.values.push_back(Cplx(2.0 * rng.unit_d() - 1.0, 0.0));
    }
  }
  return f;
}

template <class F>
F random_scalar(Rng& rng) {
  if constexpr (std::is_same_v<F, Rational>) {
    Rational v = rng.signed_unit();
    while (sgn(v) == 0) v = rng.signed_unit();
    return v;
  } else {
    return Cplx(2.0 * rng.unit_d() - 1.0, 2.0 * rng.unit_d() - 1.0);
  }
}

/// Sparse besov_minus family with owners below `max_level`.
template <class F>
DistCoeffs<F> random_sparse_minus(const GoodGrid& g, double s, int max_level, int terms,
                                  Rng& rng) {
  DistCoeffs<F> out{&g, s, Convention::besov_minus, random_scalar<F>(rng), {}};
  for (int t = 0; t < terms; ++t) {
    const int level = static_cast<int>(rng.below(static_cast<uint64_t>(max_level)));
    if (g.pair_count(level) == 0) continue;
    const int64_t slot = static_cast<int64_t>(rng.below(static_cast<uint64_t>(g.pair_count(level))));
    const CellRef owner = g.pair_owner(level, slot);
    const int32_t pair = static_cast<int32_t>(slot - g.pair_slot({level, owner.index, 0}));
    out.add(WaveletKey{level, owner.index, pair}, random_scalar<F>(rng));
  }
  return out;
}

inline Address random_address(const GoodGrid& g, Rng& rng) {
  Address a;
  CellRef r{0, 0};
  for (int k = 0; k < g.depth(); ++k) {
    const uint32_t i = static_cast<uint32_t>(rng.below(static_cast<uint64_t>(g.child_count(r))));
    a.path.push_back(i);
    r = g.child(r, static_cast<int>(i));
  }
  return a;
}

/// Two addresses whose deepest common cell sits exactly at level n.
std::pair<Address, Address> random_separated_pair(const GoodGrid& g, int n, Rng& rng);

}  // namespace gb
