#pragma once

#include <vector>

#include "gridbesov/grid.hpp"
#include "gridbesov/scalar.hpp"

namespace gb {

/// A function constant on the cells of one level.
template <class F>
struct StepFunction {
  const GoodGrid* grid{nullptr};
  int level{0};
  std::vector<F> values;

  F value(int64_t cell) const { return values[static_cast<size_t>(cell)]; }
};

template <class F>
StepFunction<F> constant_function(const GoodGrid& g, F value) {
  return {&g, 0, {value}};
}

template <class F>
StepFunction<F> refine(const StepFunction<F>& f, int level) {
  if (level < f.level) fail(Errc::invalid_argument, "refine to coarser level");
  if (level > f.grid->depth()) fail(Errc::depth_insufficient, "refine past grid depth");
  StepFunction<F> out{f.grid, level, {}};
  out.values = f.values;
  for (int k = f.level; k < level; ++k) {
    std::vector<F> next(static_cast<size_t>(f.grid->cell_count(k + 1)));
    for (int64_t i = 0; i < f.grid->cell_count(k); ++i) {
      const CellRec& c = f.grid->cell({k, i});
      for (int64_t j = c.child_begin; j < c.child_end; ++j)
        next[static_cast<size_t>(j)] = out.values[static_cast<size_t>(i)];
    }
    out.values.swap(next);
  }
  return out;
}

/// Indicator of a cell.
template <class F>
StepFunction<F> indicator(const GoodGrid& g, CellRef r) {
  StepFunction<F> out{&g, r.level, std::vector<F>(static_cast<size_t>(g.cell_count(r.level)), F(0))};
  out.values[static_cast<size_t>(r.index)] = F(1);
  return out;
}

template <class F>
F integral(const StepFunction<F>& f) {
  F acc(0);
  for (int64_t i = 0; i < f.grid->cell_count(f.level); ++i)
    acc += f.values[static_cast<size_t>(i)] * MeasureAs<F>::cell(*f.grid, {f.level, i});
  return acc;
}

/// sum_cells f * g * |cell| after refining both to the finer level.
template <class F>
F inner_product(const StepFunction<F>& f, const StepFunction<F>& g) {
  if (f.grid->id() != g.grid->id()) fail(Errc::grid_mismatch, "inner_product across grids");
  const int level = f.level > g.level ? f.level : g.level;
  StepFunction<F> ftmp, gtmp;
  const StepFunction<F>* fa = &f;
  const StepFunction<F>* ga = &g;
  if (f.level != level) {
    ftmp = refine(f, level);
    fa = &ftmp;
  }
  if (g.level != level) {
    gtmp = refine(g, level);
    ga = &gtmp;
  }
  F acc(0);
  for (int64_t i = 0; i < f.grid->cell_count(level); ++i)
    acc += fa->values[static_cast<size_t>(i)] * ga->values[static_cast<size_t>(i)] *
           MeasureAs<F>::cell(*f.grid, {level, i});
  return acc;
}

template <class F>
StepFunction<F> wavelet_values(const GoodGrid& g, WaveletKey w) {
  const HaarPair& p = g.pair(w);
  const CellRec& owner = g.cell({w.level, w.cell});
  StepFunction<F> out{&g, w.level + 1,
                      std::vector<F>(static_cast<size_t>(g.cell_count(w.level + 1)), F(0))};
  const F pos(MeasureAs<F>::inv_mu1(p));
  const F neg(-MeasureAs<F>::inv_mu2(p));
  for (uint32_t i = p.begin; i < p.mid; ++i)
    out.values[static_cast<size_t>(owner.child_begin + i)] = pos;
  for (uint32_t i = p.mid; i < p.end; ++i)
    out.values[static_cast<size_t>(owner.child_begin + i)] = neg;
  return out;
}

}  // namespace gb
