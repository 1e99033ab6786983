#include "gridbesov/dipole.hpp"

#include <algorithm>
#include <map>

#include "gridbesov/random.hpp"

namespace gb {

const char* anchor_rule_name(AnchorRule r) {
  return r == AnchorRule::leftmost ? "leftmost" : "seeded-random";
}

std::pair<int64_t, int64_t> leaf_interval(const GoodGrid& g, const FSet& f) {
  if (!f.is_group) {
    const CellRec& c = g.cell(f.owner);
    return {c.leaf_begin, c.leaf_end};
  }
  const CellRec& first = g.cell(g.child(f.owner, static_cast<int>(f.begin)));
  const CellRec& last = g.cell(g.child(f.owner, static_cast<int>(f.end) - 1));
  return {first.leaf_begin, last.leaf_end};
}

Rational fset_measure(const GoodGrid& g, const FSet& f) {
  if (!f.is_group) return g.measure(f.owner);
  Rational m(0);
  for (uint32_t i = f.begin; i < f.end; ++i)
    m += g.measure(g.child(f.owner, static_cast<int>(i)));
  return m;
}

int64_t DipoleBasis::anchor_of(const FSet& f) const {
  if (!f.is_group) return cell_anchor(f.owner);
  if (f.begin == 0 && f.end == static_cast<uint32_t>(grid_->child_count(f.owner)))
    return cell_anchor(f.owner);
  const auto pairs = grid_->pairs(f.owner);
  for (size_t p = 0; p < pairs.size(); ++p) {
    const WaveletKey w{f.owner.level, f.owner.index, static_cast<int32_t>(p)};
    if (pairs[p].begin == f.begin && pairs[p].mid == f.end) return group_anchor(w, 0);
    if (pairs[p].mid == f.begin && pairs[p].end == f.end) return group_anchor(w, 1);
  }
  fail(Errc::invalid_argument, "set is not an element of the grid family");
}

namespace detail {

std::pair<int64_t, int64_t> cells_inside(const GoodGrid& g, const FSet& j, int level) {
  const auto [lo, hi] = leaf_interval(g, j);
  const int64_t n = g.cell_count(level);
  int64_t b = 0, e = n;
  // first cell with leaf_begin >= lo
  {
    int64_t left = 0, right = n;
    while (left < right) {
      const int64_t mid = (left + right) / 2;
      if (g.cell({level, mid}).leaf_begin < lo)
        left = mid + 1;
      else
        right = mid;
    }
    b = left;
  }
  // first cell with leaf_end > hi
  {
    int64_t left = b, right = n;
    while (left < right) {
      const int64_t mid = (left + right) / 2;
      if (g.cell({level, mid}).leaf_end <= hi)
        left = mid + 1;
      else
        right = mid;
    }
    e = left;
  }
  return {b, e};
}

}  // namespace detail

DipoleBasis build_dipole_basis(const GoodGrid& g, AnchorRule rule, uint64_t seed) {
  DipoleBasis b;
  b.grid_ = &g;
  b.rule_ = rule;
  b.seed_ = seed;
  Rng rng(stream_seed(seed, 0, 0x0a));

  auto fresh = [&](int64_t lo, int64_t hi) {
    return rule == AnchorRule::leftmost
               ? lo
               : lo + static_cast<int64_t>(rng.below(static_cast<uint64_t>(hi - lo)));
  };

  b.cell_.resize(static_cast<size_t>(g.depth()) + 1);
  b.pair_.resize(static_cast<size_t>(g.depth()));
  for (int k = 0; k <= g.depth(); ++k)
    b.cell_[static_cast<size_t>(k)].assign(static_cast<size_t>(g.cell_count(k)), -1);
  for (int k = 0; k < g.depth(); ++k)
    b.pair_[static_cast<size_t>(k)].assign(static_cast<size_t>(g.pair_count(k)), {-1, -1, -1});

  const CellRec& root = g.cell({0, 0});
  b.cell_[0][0] = fresh(root.leaf_begin, root.leaf_end);

  for (int k = 0; k < g.depth(); ++k) {
    for (int64_t ci = 0; ci < g.cell_count(k); ++ci) {
      const CellRef ref{k, ci};
      const CellRec& cell = g.cell(ref);
      const auto pairs = g.pairs(ref);
      // anchors of the groups seen so far, keyed by child range; the full
      // range starts out with the cell's own anchor
      std::map<std::pair<uint32_t, uint32_t>, int64_t> range_anchor;
      range_anchor[{0, static_cast<uint32_t>(g.child_count(ref))}] =
          b.cell_[static_cast<size_t>(k)][static_cast<size_t>(ci)];

      const int64_t slot0 = g.pair_slot({k, ci, 0});
      for (size_t p = 0; p < pairs.size(); ++p) {
        const HaarPair& hp = pairs[p];
        const auto it = range_anchor.find({hp.begin, hp.end});
        if (it == range_anchor.end()) fail(Errc::invalid_argument, "pair order broke nesting");
        const int64_t u = it->second;

        const auto s1 = leaf_interval(g, FSet::group(ref, hp.begin, hp.mid));
        const auto s2 = leaf_interval(g, FSet::group(ref, hp.mid, hp.end));
        int64_t a1, a2;
        if (u >= s1.first && u < s1.second) {
          a1 = u;
          a2 = fresh(s2.first, s2.second);
        } else {
          a2 = u;
          a1 = fresh(s1.first, s1.second);
        }
        b.pair_[static_cast<size_t>(k)][static_cast<size_t>(slot0) + p] = {a1, a2, u};
        range_anchor[{hp.begin, hp.mid}] = a1;
        range_anchor[{hp.mid, hp.end}] = a2;
        if (hp.mid - hp.begin == 1)
          b.cell_[static_cast<size_t>(k) + 1]
                 [static_cast<size_t>(cell.child_begin + hp.begin)] = a1;
        if (hp.end - hp.mid == 1)
          b.cell_[static_cast<size_t>(k) + 1][static_cast<size_t>(cell.child_begin + hp.mid)] = a2;
      }
    }
  }
  return b;
}

std::vector<FSet> all_fsets(const GoodGrid& g) {
  std::vector<FSet> out;
  for (int k = 0; k <= g.depth(); ++k)
    for (int64_t i = 0; i < g.cell_count(k); ++i) out.push_back(FSet::cell({k, i}));
  for (int k = 0; k < g.depth(); ++k) {
    for (int64_t i = 0; i < g.cell_count(k); ++i) {
      for (const HaarPair& p : g.pairs({k, i})) {
        if (p.mid - p.begin >= 2) out.push_back(FSet::group({k, i}, p.begin, p.mid));
        if (p.end - p.mid >= 2) out.push_back(FSet::group({k, i}, p.mid, p.end));
      }
    }
  }
  return out;
}

bool check_anchor_compatibility(const GoodGrid& g, const DipoleBasis& basis) {
  struct Entry {
    int64_t lo, hi, anchor;
  };
  std::vector<Entry> entries;
  for (int k = 0; k <= g.depth(); ++k)
    for (int64_t i = 0; i < g.cell_count(k); ++i) {
      const CellRec& c = g.cell({k, i});
      entries.push_back({c.leaf_begin, c.leaf_end, basis.cell_anchor({k, i})});
    }
  for (int k = 0; k < g.depth(); ++k)
    for (int64_t i = 0; i < g.cell_count(k); ++i) {
      const auto pairs = g.pairs({k, i});
      for (size_t p = 0; p < pairs.size(); ++p) {
        const WaveletKey w{k, i, static_cast<int32_t>(p)};
        const auto r1 = leaf_interval(g, FSet::group({k, i}, pairs[p].begin, pairs[p].mid));
        const auto r2 = leaf_interval(g, FSet::group({k, i}, pairs[p].mid, pairs[p].end));
        entries.push_back({r1.first, r1.second, basis.group_anchor(w, 0)});
        entries.push_back({r2.first, r2.second, basis.group_anchor(w, 1)});
      }
    }

  for (const Entry& e : entries)
    if (e.anchor < e.lo || e.anchor >= e.hi) return false;  // invariant (A)
  for (const Entry& inner : entries)
    for (const Entry& outer : entries) {
      const bool nested = outer.lo <= inner.lo && inner.hi <= outer.hi;
      if (!nested) continue;
      if (outer.anchor >= inner.lo && outer.anchor < inner.hi && inner.anchor != outer.anchor)
        return false;  // invariant (B)
    }
  return true;
}

}  // namespace gb
