#pragma once

#include "gridbesov/coeffs.hpp"
#include "gridbesov/parallel.hpp"
#include "gridbesov/step.hpp"

namespace gb {

// Analysis: cell integrals are pulled up level by level, then every pair of
// every owner projects exactly:
//   <psi, phi> = (sum_{S1} I_child)/mu1 - (sum_{S2} I_child)/mu2
//   a = <psi, phi> / (1/mu1 + 1/mu2)
// Cells are independent within a level, so both phases parallelize over
// cells with bit-identical results to the serial path.
template <class F>
CoeffFrame<F> analyze_frame(const StepFunction<F>& psi, double s, Exec exec = Exec::serial) {
  const GoodGrid& g = *psi.grid;
  const int n = psi.level;
  CoeffFrame<F> out = CoeffFrame<F>::zero(g, n, s);

  std::vector<F> integ(psi.values.size());
  parallel_for(exec, g.cell_count(n), [&](int64_t i) {
    integ[static_cast<size_t>(i)] =
        psi.values[static_cast<size_t>(i)] * MeasureAs<F>::cell(g, {n, i});
  });

  for (int k = n - 1; k >= 0; --k) {
    std::vector<F> up(static_cast<size_t>(g.cell_count(k)));
    auto& row = out.a[static_cast<size_t>(k)];
    parallel_for(exec, g.cell_count(k), [&](int64_t i) {
      const CellRec& c = g.cell({k, i});
      F total(0);
      for (int64_t j = c.child_begin; j < c.child_end; ++j)
        total += integ[static_cast<size_t>(j)];
      up[static_cast<size_t>(i)] = total;

      const auto pairs = g.pairs({k, i});
      const int64_t slot0 = g.pair_slot({k, i, 0});
      for (size_t p = 0; p < pairs.size(); ++p) {
        const HaarPair& hp = pairs[p];
        F s1(0), s2(0);
        for (uint32_t t = hp.begin; t < hp.mid; ++t)
          s1 += integ[static_cast<size_t>(c.child_begin + t)];
        for (uint32_t t = hp.mid; t < hp.end; ++t)
          s2 += integ[static_cast<size_t>(c.child_begin + t)];
        const F dot = s1 * MeasureAs<F>::inv_mu1(hp) - s2 * MeasureAs<F>::inv_mu2(hp);
        row[static_cast<size_t>(slot0) + p] = dot * MeasureAs<F>::inv_phi_sq(hp);
      }
    });
    integ.swap(up);
  }
  out.constant = integ[0];
  return out;
}

/// Evaluates constant + sum a_w phi_w as a level-N step function (top-down).
template <class F>
StepFunction<F> synthesize_frame(const CoeffFrame<F>& f, int level, Exec exec = Exec::serial) {
  const GoodGrid& g = *f.grid;
  if (level > g.depth()) fail(Errc::depth_insufficient, "synthesis level beyond grid depth");
  if (level < f.level) fail(Errc::depth_insufficient, "synthesis level below coefficient owners");

  std::vector<F> cur{f.constant};
  for (int k = 0; k < level; ++k) {
    std::vector<F> next(static_cast<size_t>(g.cell_count(k + 1)));
    const bool have_row = k < f.level;
    parallel_for(exec, g.cell_count(k), [&](int64_t i) {
      const CellRec& c = g.cell({k, i});
      for (int64_t j = c.child_begin; j < c.child_end; ++j)
        next[static_cast<size_t>(j)] = cur[static_cast<size_t>(i)];
      if (!have_row) return;
      const auto pairs = g.pairs({k, i});
      const int64_t slot0 = g.pair_slot({k, i, 0});
      const auto& row = f.a[static_cast<size_t>(k)];
      for (size_t p = 0; p < pairs.size(); ++p) {
        const F& a = row[static_cast<size_t>(slot0) + p];
        if (ScalarOps<F>::is_zero(a)) continue;
        const HaarPair& hp = pairs[p];
        const F add1 = a * MeasureAs<F>::inv_mu1(hp);
        const F add2 = a * MeasureAs<F>::inv_mu2(hp);
        for (uint32_t t = hp.begin; t < hp.mid; ++t)
          next[static_cast<size_t>(c.child_begin + t)] += add1;
        for (uint32_t t = hp.mid; t < hp.end; ++t)
          next[static_cast<size_t>(c.child_begin + t)] -= add2;
      }
    });
    cur.swap(next);
  }
  return {&g, level, std::move(cur)};
}

/// Analysis into the sparse form, tagged besov_plus as the transforms'
/// native convention.
template <class F>
DistCoeffs<F> analyze(const StepFunction<F>& psi, double s, Exec exec = Exec::serial) {
  return sparsify(analyze_frame(psi, s, exec), Convention::besov_plus);
}

template <class F>
StepFunction<F> synthesize(const DistCoeffs<F>& coeffs, double s, int level,
                           Exec exec = Exec::serial) {
  if (coeffs.s != s) fail(Errc::smoothness_mismatch, "synthesize with different s");
  // A besov_minus family is a functional, not a function; retag explicitly
  // via convert() if that is really intended.
  if (coeffs.conv == Convention::besov_minus)
    fail(Errc::wrong_convention, "synthesize expects besov_plus (or plain) coefficients");
  return synthesize_frame(densify(coeffs, level), level, exec);
}

}  // namespace gb
