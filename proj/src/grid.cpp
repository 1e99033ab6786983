#include "gridbesov/grid.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <functional>
#include <utility>

#include "gridbesov/random.hpp"

namespace gb {

namespace {

int spec_depth(const CellSpec& c) {
  if (c.children.empty()) return 0;
  int d = -1;
  for (const CellSpec& ch : c.children) {
    int cd = spec_depth(ch);
    if (d == -1) d = cd;
    if (cd != d) fail(Errc::parse_error, "non-uniform leaf depth");
  }
  return d + 1;
}

}  // namespace

void GoodGrid::finish() {
  const int d = depth();

  // Leaf ranges bottom-up.
  for (int64_t i = 0; i < cell_count(d); ++i) {
    CellRec& c = levels_[static_cast<size_t>(d)].cells[static_cast<size_t>(i)];
    c.leaf_begin = i;
    c.leaf_end = i + 1;
  }
  for (int k = d - 1; k >= 0; --k) {
    LevelRec& lv = levels_[static_cast<size_t>(k)];
    const LevelRec& nx = levels_[static_cast<size_t>(k + 1)];
    for (CellRec& c : lv.cells) {
      c.leaf_begin = nx.cells[static_cast<size_t>(c.child_begin)].leaf_begin;
      c.leaf_end = nx.cells[static_cast<size_t>(c.child_end - 1)].leaf_end;
    }
  }

  // Pair recursion per internal cell: split the ordered children at
  // floor(n/2), then keep splitting each group of size >= 2, breadth first.
  cgr_ = 0;
  max_pairs_ = 0;
  for (int k = 0; k < d; ++k) {
    LevelRec& lv = levels_[static_cast<size_t>(k)];
    const LevelRec& nx = levels_[static_cast<size_t>(k + 1)];
    lv.cell_pair_begin.assign(lv.cells.size() + 1, 0);
    for (size_t ci = 0; ci < lv.cells.size(); ++ci) {
      const CellRec& c = lv.cells[ci];
      const int n = static_cast<int>(c.child_end - c.child_begin);
      if (n > cgr_) cgr_ = n;
      lv.cell_pair_begin[ci] = static_cast<int64_t>(lv.pairs.size());

      std::deque<std::array<uint32_t, 3>> queue;  // {begin, end, gen}
      if (n >= 2) queue.push_back({0, static_cast<uint32_t>(n), 0});
      int emitted = 0;
      while (!queue.empty()) {
        auto [b, e, j] = queue.front();
        queue.pop_front();
        if (e - b < 2) continue;
        const uint32_t m = b + (e - b) / 2;
        HaarPair p;
        p.begin = b;
        p.mid = m;
        p.end = e;
        p.gen = j;
        p.mu1 = 0;
        p.mu2 = 0;
        for (uint32_t i = b; i < m; ++i)
          p.mu1 += nx.cells[static_cast<size_t>(c.child_begin + i)].measure;
        for (uint32_t i = m; i < e; ++i)
          p.mu2 += nx.cells[static_cast<size_t>(c.child_begin + i)].measure;
        if (sgn(p.mu1) <= 0 || sgn(p.mu2) <= 0)
          fail(Errc::invalid_argument, "zero-measure wavelet group");
        p.phi_sq = 1 / p.mu1 + 1 / p.mu2;
        p.mu1_d = p.mu1.get_d();
        p.mu2_d = p.mu2.get_d();
        p.phi_sq_d = p.phi_sq.get_d();
        lv.pairs.push_back(std::move(p));
        lv.pair_owner.push_back(static_cast<int64_t>(ci));
        ++emitted;
        queue.push_back({b, m, j + 1});
        queue.push_back({m, e, j + 1});
      }
      if (n >= 2 && emitted != n - 1) fail(Errc::invalid_argument, "pair recursion miscount");
      if (emitted > max_pairs_) max_pairs_ = emitted;
    }
    lv.cell_pair_begin[lv.cells.size()] = static_cast<int64_t>(lv.pairs.size());
  }
  lambda_d_ = lambda_.get_d();
  lambda_star_d_ = lambda_star_.get_d();
}

GoodGrid make_grid(const CellSpec& root, Rational lambda, Rational lambda_star) {
  const int depth = spec_depth(root);
  GoodGrid g;
  g.lambda_ = std::move(lambda);
  g.lambda_star_ = std::move(lambda_star);
  g.levels_.resize(static_cast<size_t>(depth) + 1);

  // Breadth-first copy of the spec tree into level arrays.
  std::vector<const CellSpec*> cur{&root}, next;
  {
    CellRec r;
    r.measure = root.measure;
    r.measure_d = root.measure.get_d();
    g.levels_[0].cells.push_back(std::move(r));
  }
  for (int k = 0; k < depth; ++k) {
    LevelRec& lv = g.levels_[static_cast<size_t>(k)];
    LevelRec& nx = g.levels_[static_cast<size_t>(k) + 1];
    next.clear();
    for (size_t ci = 0; ci < cur.size(); ++ci) {
      const CellSpec* spec = cur[ci];
      if (spec->children.size() == 1) fail(Errc::parse_error, "cell with a single child");
      CellRec& rec = lv.cells[ci];
      rec.child_begin = static_cast<int64_t>(nx.cells.size());
      for (const CellSpec& ch : spec->children) {
        if (sgn(ch.measure) <= 0) fail(Errc::invalid_argument, "cell with measure <= 0");
        CellRec r;
        r.parent = static_cast<int64_t>(ci);
        r.measure = ch.measure;
        r.measure_d = ch.measure.get_d();
        nx.cells.push_back(std::move(r));
        next.push_back(&ch);
      }
      rec.child_end = static_cast<int64_t>(nx.cells.size());
    }
    cur.swap(next);
  }
  g.finish();
  return g;
}

GoodGrid build_uniform(int depth, int arity) {
  if (depth < 0) fail(Errc::invalid_argument, "negative depth");
  if (arity < 2) fail(Errc::invalid_argument, "arity must be >= 2");
  GoodGrid g;
  g.lambda_ = rat(1, arity);
  g.lambda_star_ = rat(1, arity);
  g.levels_.resize(static_cast<size_t>(depth) + 1);
  int64_t count = 1;
  Rational meas(1);
  for (int k = 0; k <= depth; ++k) {
    LevelRec& lv = g.levels_[static_cast<size_t>(k)];
    lv.cells.resize(static_cast<size_t>(count));
    const double meas_d = meas.get_d();
    for (int64_t i = 0; i < count; ++i) {
      CellRec& c = lv.cells[static_cast<size_t>(i)];
      c.measure = meas;
      c.measure_d = meas_d;
      c.parent = k == 0 ? -1 : i / arity;
      if (k < depth) {
        c.child_begin = i * arity;
        c.child_end = (i + 1) * arity;
      }
    }
    count *= arity;
    meas /= arity;
  }
  g.finish();
  return g;
}

GoodGrid build_dyadic(int depth) { return build_uniform(depth, 2); }

GoodGrid build_random(uint64_t seed, int depth, int max_children, const Rational& lambda,
                      const Rational& lambda_star) {
  if (depth < 0) fail(Errc::invalid_argument, "negative depth");
  // Equal bounds are allowed: they force the split ratios outright.
  if (!(lambda_star > 0 && lambda_star <= lambda && lambda < 1))
    fail(Errc::infeasible_constraints, "need 0 < lambda_star <= lambda < 1");
  std::vector<int> feasible;
  for (int n = 2; n <= max_children; ++n)
    if (n * lambda_star <= 1 && 1 <= n * lambda) feasible.push_back(n);
  if (feasible.empty())
    fail(Errc::infeasible_constraints,
         "no child count in [2," + std::to_string(max_children) +
             "] admits ratios in [lambda_star, lambda]");

  Rng rng(seed);
  constexpr long kGrain = 4096;

  // Recursive split: child ratio r_i is clamped so that the remaining mass
  // stays splittable, last child takes the exact remainder.
  auto split = [&](const Rational& parent, std::vector<Rational>& out) {
    const int n = feasible[static_cast<size_t>(rng.below(feasible.size()))];
    out.clear();
    Rational rest(1);
    for (int i = 0; i < n - 1; ++i) {
      const int left = n - 1 - i;
      Rational lo = rest - left * lambda;
      if (lo < lambda_star) lo = lambda_star;
      Rational hi = rest - left * lambda_star;
      if (hi > lambda) hi = lambda;
      Rational r = lo + (hi - lo) * rng.unit(kGrain);
      out.push_back(r * parent);
      rest -= r;
    }
    out.push_back(rest * parent);
  };

  std::function<CellSpec(const Rational&, int)> gen = [&](const Rational& measure,
                                                          int level) -> CellSpec {
    CellSpec c;
    c.measure = measure;
    if (level < depth) {
      std::vector<Rational> parts;
      split(measure, parts);
      for (Rational& p : parts) c.children.push_back(gen(p, level + 1));
    }
    return c;
  };

  return make_grid(gen(Rational(1), 0), lambda, lambda_star);
}

CellRef GoodGrid::resolve(std::span<const uint32_t> path) const {
  if (static_cast<int>(path.size()) > depth())
    fail(Errc::level_out_of_range, "path deeper than grid");
  CellRef r{0, 0};
  for (uint32_t step : path) {
    if (static_cast<int>(step) >= child_count(r))
      fail(Errc::level_out_of_range, "child index out of range");
    r = child(r, static_cast<int>(step));
  }
  return r;
}

std::vector<uint32_t> GoodGrid::path_of(CellRef r) const {
  std::vector<uint32_t> path(static_cast<size_t>(r.level));
  CellRef cur = r;
  for (int k = r.level; k > 0; --k) {
    const CellRec& c = cell(cur);
    CellRef p{k - 1, c.parent};
    path[static_cast<size_t>(k - 1)] =
        static_cast<uint32_t>(cur.index - cell(p).child_begin);
    cur = p;
  }
  return path;
}

CellRef GoodGrid::cell_at(const Address& a, int level) const {
  if (level < 0 || level > depth()) fail(Errc::level_out_of_range, "address level");
  CellRef r{0, 0};
  for (int k = 0; k < level; ++k) {
    int i;
    if (static_cast<size_t>(k) < a.path.size()) {
      i = static_cast<int>(a.path[static_cast<size_t>(k)]);
      if (i >= child_count(r)) fail(Errc::level_out_of_range, "address child index");
    } else {
      i = a.ext == ExtensionRule::first_child ? 0 : child_count(r) - 1;
    }
    r = child(r, i);
  }
  return r;
}

Address GoodGrid::address_of_leaf(int64_t leaf) const {
  return Address{path_of(CellRef{depth(), leaf})};
}

std::string ValidationReport::summary() const {
  std::string s = pass ? "pass" : "fail";
  s += " ratio=[" + std::to_string(ratio_min) + "," + std::to_string(ratio_max) + "]";
  s += " cgr=" + std::to_string(cgr_emp);
  s += " K=[" + std::to_string(k_min) + "," + std::to_string(k_max) + "]";
  for (const ValidationIssue& i : issues) {
    s += "\n  issue: " + i.what + " at cell [";
    for (size_t j = 0; j < i.cell_path.size(); ++j)
      s += (j ? "," : "") + std::to_string(i.cell_path[j]);
    s += "]";
  }
  return s;
}

ValidationReport validate(const GoodGrid& g, NumericMode mode) {
  ValidationReport rep;
  rep.ratio_min = 1.0;
  rep.ratio_max = 0.0;
  rep.k_min = 0.0;
  rep.k_max = 0.0;
  const bool exact = mode == NumericMode::rational;
  constexpr double kTol = 1e-12;

  auto issue = [&](CellRef r, const std::string& what) {
    rep.issues.push_back({what, g.path_of(r)});
  };

  const CellRef root{0, 0};
  if (exact ? g.measure(root) != 1 : std::fabs(g.measure_d(root) - 1.0) > kTol)
    issue(root, "root measure != 1");

  for (int k = 0; k <= g.depth(); ++k) {
    for (int64_t i = 0; i < g.cell_count(k); ++i) {
      const CellRef r{k, i};
      const int n = g.child_count(r);
      if (k < g.depth() && n < 2) issue(r, "internal cell with < 2 children");
      if (n > rep.cgr_emp) rep.cgr_emp = n;
      if (sgn(g.measure(r)) <= 0) issue(r, "cell measure <= 0");
      if (n == 0) continue;

      Rational child_sum(0);
      for (int c = 0; c < n; ++c) {
        const CellRef q = g.child(r, c);
        child_sum += g.measure(q);
        const Rational ratio = g.measure(q) / g.measure(r);
        const double ratio_d = ratio.get_d();
        if (ratio_d < rep.ratio_min) rep.ratio_min = ratio_d;
        if (ratio_d > rep.ratio_max) rep.ratio_max = ratio_d;
        const bool low = exact ? ratio < g.lambda_star() : ratio_d < g.lambda_star_d() - kTol;
        const bool high = exact ? ratio > g.lambda() : ratio_d > g.lambda_d() + kTol;
        if (low) issue(q, "child ratio below lambda_star");
        if (high) issue(q, "child ratio above lambda");
      }
      const bool sum_bad =
          exact ? child_sum != g.measure(r)
                : std::fabs(child_sum.get_d() - g.measure_d(r)) > kTol * g.measure_d(r);
      if (sum_bad) issue(r, "children measures do not sum to parent");

      for (const HaarPair& p : g.pairs(r)) {
        const Rational k_const = g.measure(r) * p.phi_sq;
        const double kd = k_const.get_d();
        if (rep.k_min == 0.0 || kd < rep.k_min) rep.k_min = kd;
        if (kd > rep.k_max) rep.k_max = kd;
        if (k_const * g.lambda_star() > 2 || k_const < 2)
          issue(r, "wavelet K outside [2, 2/lambda_star]");
        if (k_const * g.lambda_star() > 1) ++rep.k_above_inverse_lambda_star;
      }
    }
  }
  rep.pass = rep.issues.empty();
  return rep;
}

PseudoDistance pseudo_distance(const GoodGrid& g, const Address& x, const Address& y) {
  CellRef cx{0, 0}, cy{0, 0};
  for (int k = 1; k <= g.depth(); ++k) {
    const CellRef nx = g.cell_at(x, k), ny = g.cell_at(y, k);
    if (nx.index != ny.index) return {g.measure(cx), true};
    cx = nx;
    cy = ny;
  }
  return {Rational(0), false};
}

std::vector<CellRef> cells_at_level(const GoodGrid& g, int k) {
  std::vector<CellRef> out;
  out.reserve(static_cast<size_t>(g.cell_count(k)));
  for (int64_t i = 0; i < g.cell_count(k); ++i) out.push_back({k, i});
  return out;
}

std::span<const HaarPair> haar_pairs(const GoodGrid& g, CellRef q) {
  if (q.level == g.depth()) fail(Errc::leaf_cell, "cell at grid depth has no wavelets");
  return g.pairs(q);
}

Rational k_constant(const GoodGrid& g, WaveletKey w) {
  const Rational k = g.measure({w.level, w.cell}) * g.pair(w).phi_sq;
  // Derivable bound; see validate() for the reporting of K > 1/lambda_star.
  if (k < 2 || k * g.lambda_star() > 2) fail(Errc::invalid_argument, "K outside [2, 2/lambda_star]");
  return k;
}

}  // namespace gb
