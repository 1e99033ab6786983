#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridbesov/errors.hpp"
#include "gridbesov/rational.hpp"
#include "gridbesov/scalar.hpp"

namespace gb {

/// Cell handle: level plus index within that level (index order is the
/// depth-first / construction order, which is part of the grid's identity).
struct CellRef {
  int32_t level{0};
  int64_t index{0};
  auto operator<=>(const CellRef&) const = default;
};

enum class ExtensionRule : uint8_t { first_child, last_child };

/// A point of the path space: a finite path extended beyond its length by
/// the extension rule. Paths longer than the grid depth are invalid.
struct Address {
  std::vector<uint32_t> path;
  ExtensionRule ext{ExtensionRule::first_child};
};

/// One unbalanced Haar wavelet on a cell: child groups S1 = [begin,mid),
/// S2 = [mid,end) in the fixed child order. phi_sq = 1/mu1 + 1/mu2 is the
/// squared L2 norm of the wavelet; K = |Q| * phi_sq.
struct HaarPair {
  uint32_t begin{}, mid{}, end{};
  uint32_t gen{};  // recursion generation j
  Rational mu1, mu2, phi_sq;
  double mu1_d{}, mu2_d{}, phi_sq_d{};
};

/// Identifies one wavelet: owner cell plus index into its pair list.
struct WaveletKey {
  int32_t level{0};
  int64_t cell{0};
  int32_t pair{0};
  auto operator<=>(const WaveletKey&) const = default;
};

struct CellRec {
  int64_t parent{-1};
  int64_t child_begin{0}, child_end{0};  // indices into the next level
  int64_t leaf_begin{0}, leaf_end{0};    // descendant range at the deepest level
  Rational measure;
  double measure_d{};
};

struct LevelRec {
  std::vector<CellRec> cells;
  std::vector<HaarPair> pairs;            // grouped by cell, recursion order within a cell
  std::vector<int64_t> pair_owner;        // pair slot -> cell index
  std::vector<int64_t> cell_pair_begin;   // size cells+1
};

/// Nested CellSpec trees are the exchange form used by the JSON loader,
/// the random generator and tests.
struct CellSpec {
  Rational measure;
  std::vector<CellSpec> children;
};

class GoodGrid {
 public:
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const Rational& lambda() const { return lambda_; }
  const Rational& lambda_star() const { return lambda_star_; }
  double lambda_d() const { return lambda_d_; }
  double lambda_star_d() const { return lambda_star_d_; }
  int cgr() const { return cgr_; }
  /// M = max number of Haar pairs on one cell (= cgr - 1).
  int max_pairs_per_cell() const { return max_pairs_; }

  int64_t cell_count(int level) const { return static_cast<int64_t>(at(level).cells.size()); }
  int64_t pair_count(int level) const { return static_cast<int64_t>(at(level).pairs.size()); }

  const CellRec& cell(CellRef r) const { return at(r.level).cells[static_cast<size_t>(r.index)]; }
  const Rational& measure(CellRef r) const { return cell(r).measure; }
  double measure_d(CellRef r) const { return cell(r).measure_d; }
  int child_count(CellRef r) const {
    const CellRec& c = cell(r);
    return static_cast<int>(c.child_end - c.child_begin);
  }
  CellRef child(CellRef r, int i) const { return {r.level + 1, cell(r).child_begin + i}; }
  CellRef parent(CellRef r) const {
    if (r.level == 0) fail(Errc::level_out_of_range, "root has no parent");
    return {r.level - 1, cell(r).parent};
  }

  std::span<const HaarPair> pairs(CellRef r) const {
    const LevelRec& lv = at(r.level);
    if (r.level == depth()) return {};
    const int64_t b = lv.cell_pair_begin[static_cast<size_t>(r.index)];
    const int64_t e = lv.cell_pair_begin[static_cast<size_t>(r.index) + 1];
    return {lv.pairs.data() + b, static_cast<size_t>(e - b)};
  }
  const HaarPair& pair(WaveletKey w) const {
    return at(w.level).pairs[static_cast<size_t>(pair_slot(w))];
  }
  int64_t pair_slot(WaveletKey w) const {
    return at(w.level).cell_pair_begin[static_cast<size_t>(w.cell)] + w.pair;
  }
  CellRef pair_owner(int level, int64_t slot) const {
    return {level, at(level).pair_owner[static_cast<size_t>(slot)]};
  }

  CellRef resolve(std::span<const uint32_t> path) const;
  std::vector<uint32_t> path_of(CellRef r) const;

  /// Cell containing the address at `level`, applying the extension rule
  /// past the end of the stored path.
  CellRef cell_at(const Address& a, int level) const;
  /// Descendant leaf index (cell index at grid depth) the address resolves to.
  int64_t leaf_of(const Address& a) const { return cell_at(a, depth()).index; }
  Address address_of_leaf(int64_t leaf) const;

  const LevelRec& at(int level) const {
    if (level < 0 || level > depth())
      fail(Errc::level_out_of_range, "level " + std::to_string(level));
    return levels_[static_cast<size_t>(level)];
  }

  const void* id() const { return this; }

 private:
  friend GoodGrid make_grid(const CellSpec&, Rational, Rational);
  friend GoodGrid build_uniform(int, int);

  void finish();  // leaf ranges, pairs, constants

  std::vector<LevelRec> levels_;
  Rational lambda_, lambda_star_;
  double lambda_d_{}, lambda_star_d_{};
  int cgr_{0};
  int max_pairs_{0};
};

/// Builds a grid from a spec tree. Structural requirements only (uniform
/// leaf depth, positive measures, child count != 1); the measure-ratio
/// axioms are checked by validate().
GoodGrid make_grid(const CellSpec& root, Rational lambda, Rational lambda_star);

GoodGrid build_dyadic(int depth);
GoodGrid build_uniform(int depth, int arity);
GoodGrid build_random(uint64_t seed, int depth, int max_children, const Rational& lambda,
                      const Rational& lambda_star);

struct ValidationIssue {
  std::string what;
  std::vector<uint32_t> cell_path;
};

struct ValidationReport {
  bool pass{false};
  double ratio_min{0}, ratio_max{0};  // empirical extremes of |Q|/|P|
  int cgr_emp{0};
  double k_min{0}, k_max{0};
  // Pairs whose K exceeds 1/lambda_star. Informational: the derivable bound
  // is 2/lambda_star and that one is enforced.
  int64_t k_above_inverse_lambda_star{0};
  std::vector<ValidationIssue> issues;
  std::string summary() const;
};

ValidationReport validate(const GoodGrid& g, NumericMode mode = NumericMode::rational);

struct PseudoDistance {
  Rational value;
  bool separated{false};  // false: paths agree down to the built depth
};

PseudoDistance pseudo_distance(const GoodGrid& g, const Address& x, const Address& y);

std::vector<CellRef> cells_at_level(const GoodGrid& g, int k);

/// Throws leaf_cell for cells at the grid depth; otherwise the cached list.
std::span<const HaarPair> haar_pairs(const GoodGrid& g, CellRef q);

/// K = |Q| (1/mu1 + 1/mu2), exact. Always in [2, 2/lambda_star]; may exceed
/// 1/lambda_star (the dyadic root pair has K = 4 with 1/lambda_star = 2).
Rational k_constant(const GoodGrid& g, WaveletKey w);

// Measure access in the arithmetic of the scalar backend. The float backend
// reads the cached doubles and never touches GMP in inner loops.
template <class F>
struct MeasureAs;

template <>
struct MeasureAs<Rational> {
  static const Rational& cell(const GoodGrid& g, CellRef r) { return g.measure(r); }
  static Rational inv_cell(const GoodGrid& g, CellRef r) { return 1 / g.measure(r); }
  static const Rational& mu1(const HaarPair& p) { return p.mu1; }
  static const Rational& mu2(const HaarPair& p) { return p.mu2; }
  static Rational inv_mu1(const HaarPair& p) { return 1 / p.mu1; }
  static Rational inv_mu2(const HaarPair& p) { return 1 / p.mu2; }
  static Rational inv_phi_sq(const HaarPair& p) { return 1 / p.phi_sq; }
  static const Rational& phi_sq(const HaarPair& p) { return p.phi_sq; }
};

template <>
struct MeasureAs<Cplx> {
  static double cell(const GoodGrid& g, CellRef r) { return g.measure_d(r); }
  static double inv_cell(const GoodGrid& g, CellRef r) { return 1.0 / g.measure_d(r); }
  static double mu1(const HaarPair& p) { return p.mu1_d; }
  static double mu2(const HaarPair& p) { return p.mu2_d; }
  static double inv_mu1(const HaarPair& p) { return 1.0 / p.mu1_d; }
  static double inv_mu2(const HaarPair& p) { return 1.0 / p.mu2_d; }
  static double inv_phi_sq(const HaarPair& p) { return 1.0 / p.phi_sq_d; }
  static double phi_sq(const HaarPair& p) { return p.phi_sq_d; }
};

}  // namespace gb
