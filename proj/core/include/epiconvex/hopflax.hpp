#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/domain.hpp"
#include "epiconvex/extgrid.hpp"
#include "epiconvex/params.hpp"
#include "epiconvex/quadrature.hpp"

namespace epiconvex {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct InfConvResult {
  ExtGridFn values;
  /// Per output node, the row-major index of the minimising node of the first
  /// argument (smallest on ties), or kNoIndex where the value is +inf.
  std::vector<std::size_t> argmin;
  bool all_infinite = false;
};

/// (f [] g)(x) = min_y f(y) + g(x - y) over grid nodes. Both grids must share
/// spacing; the result lives on the Minkowski-sum box.
InfConvResult infconv(const ExtGridFn& f, const ExtGridFn& g);
/// Plain O(|F| |G|) loop, kept as the oracle for the accelerated path.
InfConvResult infconv_reference(const ExtGridFn& f, const ExtGridFn& g);

struct DomainSumReport {
  std::size_t mismatches = 0;
  std::vector<double> witness;
};
/// Compares the finite set of f [] g with the node-wise Minkowski sum of the
/// finite sets of f and g.
DomainSumReport domain_sum_check(const ExtGridFn& f, const ExtGridFn& g);

/// Evaluator of an initial datum g for Q_h(g)(x) = min_y g(x - h y) + h W(y).
/// lower_bound must not exceed g anywhere on the Cartesian box [lo, hi].
class GEvaluator {
 public:
  virtual ~GEvaluator() = default;
  virtual std::size_t dim() const = 0;
  virtual double eval(std::span<const double> x) const = 0;
  virtual double lower_bound(std::span<const double> lo, std::span<const double> hi) const = 0;
  virtual double global_min() const = 0;
};

/// Evaluators keep a reference to their grid, which must outlive them.
/// Cartesian sampled g with a min-pyramid for box lower bounds.
std::unique_ptr<GEvaluator> make_grid_evaluator(const ExtGridFn& g);
/// Sheared sampled g; box bounds go through psi.
std::unique_ptr<GEvaluator> make_epigrid_evaluator(const EpiGrid& g);
/// Closed-form g; lower_bound falls back to global_min.
std::unique_ptr<GEvaluator> make_function_evaluator(
    std::size_t dim, std::function<double(std::span<const double>)> g, double global_min);

/// The candidate set of Hopf-Lax minimisers: points y_i with finite W(y_i),
/// grouped in spatial blocks. Index i refers to the source grid's row-major order.
class YSet {
 public:
  static YSet from_grid(const ExtGridFn& W, std::size_t block_edge = 0);
  static YSet from_epigrid(const EpiGrid& W, std::size_t block_edge = 0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  struct Block {
    double w_min = 0.0;
    std::vector<double> lo, hi;          // bounding box of member points
    std::vector<std::size_t> members;    // positions into points/values, ascending
  };

  const std::vector<double>& points() const { return pts_; }  // size() * dim()
  const std::vector<double>& values() const { return w_; }
  const std::vector<std::size_t>& source_index() const { return index_; }
  const std::vector<Block>& blocks() const { return blocks_; }  // sorted by w_min

  /// Binary tree over blocks; a leaf refers to one block.
  struct TreeNode {
    double w_min = 0.0;
    std::vector<double> lo, hi;
    std::size_t left = kNoIndex, right = kNoIndex;
    std::size_t block = kNoIndex;
  };
  const std::vector<TreeNode>& tree() const { return tree_; }  // root first

 private:
  void build_blocks(const GridSpec& grid, std::size_t block_edge);
  std::size_t build_tree(std::vector<std::size_t>& ids, std::size_t b, std::size_t e);

  std::size_t dim_ = 0;
  std::vector<double> pts_;
  std::vector<double> w_;
  std::vector<std::size_t> index_;
  std::vector<Block> blocks_;
  std::vector<TreeNode> tree_;
};

struct HopfLaxPoint {
  double value = kInf;
  std::size_t argmin = kNoIndex;  // source index of the minimising y
};

enum class HopfLaxMethod { reference, branch_and_bound };

/// Q_h(g)(x) over the candidate set. Both methods return the same value and the
/// same smallest-index minimiser; branch_and_bound prunes blocks whose lower
/// bound exceeds the current best.
HopfLaxPoint hopflax_point(const GEvaluator& g, const YSet& Y, double h, std::span<const double> x,
                           HopfLaxMethod method = HopfLaxMethod::branch_and_bound,
                           std::size_t warm = kNoIndex);

/// Q_h(g) at every point of `xs` (count * dim, row-major).
std::vector<HopfLaxPoint> hopflax_points(const GEvaluator& g, const YSet& Y, double h,
                                         std::span<const double> xs,
                                         HopfLaxMethod method = HopfLaxMethod::branch_and_bound);

/// Q_h(g) on g's own Cartesian grid with y over W's finite nodes. h = 0
/// returns g unchanged.
InfConvResult hopflax_apply(const ExtGridFn& g, const ExtGridFn& W, double h,
                            HopfLaxMethod method = HopfLaxMethod::branch_and_bound);

/// Continuous polish of a discrete minimiser: damped Newton steps on
/// y -> g(x - h y) + h W(y) from y0, with g and W closed-form (+inf outside their
/// domains). Returns min(start_value, best value found).
double hopflax_polish(const SmoothFn& g, const SmoothFn& W, double h, std::span<const double> x,
                      std::span<const double> y0, double start_value);

struct SemigroupReport {
  double max_abs_residual = 0.0;
  std::size_t compared_nodes = 0;
  std::size_t domain_mismatches = 0;  // finite in exactly one of the two
  std::vector<double> witness;        // node with the largest residual
};
/// Compares Q_h(g) with Q_{h-s}(Q_s(g)) on g's grid.
SemigroupReport semigroup_residual(const ExtGridFn& g, const ExtGridFn& W, double h, double s);

struct DifferenceQuotient {
  std::vector<double> h;
  std::vector<double> quotients;   // (Q_h(g)(x) - g(x)) / h
  double extrapolated = 0.0;       // polynomial extrapolation to h = 0
  double extrapolation_error = 0.0;
  double reference = 0.0;          // -W*(grad g(x))
};
/// Hamilton-Jacobi check at x: the quotients should tend to -W*(grad g(x)).
DifferenceQuotient hj_difference_quotient(const GEvaluator& g, double g_at_x, const YSet& Y,
                                          std::span<const double> x, std::span<const double> hs,
                                          double w_star_at_grad);

}  // namespace epiconvex
