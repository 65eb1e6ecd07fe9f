#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/extgrid.hpp"

namespace epiconvex {

enum class NormKind { euclidean, p_norm, weighted_p_norm };

/// A norm on R^n with its dual. p_norm accepts p in [1, inf]; the weighted
/// variant is (sum w_i |x_i|^p)^{1/p}.
struct NormSpec {
  NormKind kind = NormKind::euclidean;
  double p = 2.0;
  std::vector<double> weights;

  static NormSpec euclidean() { return {}; }
  static NormSpec p_norm(double p);
  static NormSpec weighted(double p, std::vector<double> w);
  static NormSpec from_spec(const std::string& kind, double p, std::vector<double> w);

  std::string describe() const;
  /// Dual exponent p' with 1/p + 1/p' = 1.
  double dual_exponent() const;
};

double norm(const NormSpec& N, std::span<const double> x);
/// Closed-form dual norm |y|_* = sup_{|x| = 1} x . y.
double dual_norm(const NormSpec& N, std::span<const double> y);
/// Gradient of x -> |x| at a point of differentiability (x != 0, and for p = 1 or
/// inf, no tied/zero coordinates).
std::vector<double> norm_gradient(const NormSpec& N, std::span<const double> x);
/// The dual norm as a NormSpec (so dual_norm of it recovers the original norm).
NormSpec dual_spec(const NormSpec& N);

struct SampledDual {
  double lower_bound = 0.0;  // max over sampled unit directions of x . y
  double gap_estimate = 0.0;  // |y|_2 * max angular gap between samples, an upper slack
};
/// Dual norm by maximising x . y over `directions` points of the unit sphere
/// (n = 2 or 3).
SampledDual dual_norm_sampled(const NormSpec& N, std::span<const double> y, std::size_t directions);

/// C^{1-p} |y|_*^p / p with p = q/(q-1): the conjugate of C |x|^q / q on R^n.
double power_cost_conjugate(double C, double q, const NormSpec& N, std::span<const double> y);

struct Legendre1DResult {
  std::vector<double> values;        // max_i x_i y_j - f_i
  std::vector<std::size_t> argmax;   // smallest maximising sample index
};

/// Discrete conjugate by the linear-time lower-hull walk. x must be strictly
/// increasing; f may be +inf (ignored) and any finite real.
Legendre1DResult legendre_1d(std::span<const double> x, std::span<const double> f,
                             std::span<const double> slopes);

struct ConjugateResult {
  ExtGridFn values;  // over the dual grid, Sign::any
  GridSpec dual_box;
  /// Per dual node, the row-major primal index attaining the sup (smallest on ties).
  std::vector<std::size_t> argmax;
};

/// Factored n-D discrete conjugate: one legendre_1d sweep per axis, innermost first.
ConjugateResult legendre_nd(const ExtGridFn& f, const GridSpec& dual_box);
ConjugateResult legendre_nd(const ExtGridFn& f, const std::vector<double>& dual_lo,
                            const std::vector<double>& dual_hi,
                            const std::vector<std::size_t>& dual_res);

/// Slope box spanning the min/max finite differences of f per axis, padded by
/// `pad` of the span on each side.
GridSpec default_dual_box(const ExtGridFn& f, const std::vector<std::size_t>& dual_res,
                          double pad = 0.1);

/// Largest discrete second-difference violation along axes, relative to scale.
double axis_convexity_defect(const ExtGridFn& f);

}  // namespace epiconvex
