#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "epiconvex/domain.hpp"
#include "epiconvex/extgrid.hpp"

namespace epiconvex {

/// Lower boundary x_n = psi(x1) of an epigraph-type region built from a domain:
/// Omega shifted by c (psi = phi + c) or the support set B_h
/// (psi = h + (1+h) phi(x1/(1+h))).
struct Shear {
  enum class Kind { shift, bh };
  Kind kind = Kind::shift;
  double param = 0.0;  // c for shift, h for bh

  static Shear omega() { return {Kind::shift, 0.0}; }
  static Shear omega_shift(double c) { return {Kind::shift, c}; }
  static Shear support(double h) { return {Kind::bh, h}; }

  double psi(const EpigraphDomain& dom, std::span<const double> x1) const;
  /// A subgradient of psi at x1.
  std::vector<double> subgrad(const EpigraphDomain& dom, std::span<const double> x1) const;
};

/// Tensor box in sheared coordinates (x1, s) with x_n = psi(x1) + s.
struct ShearBox {
  std::vector<double> x1_lo, x1_hi;  // n-1 entries
  double s_max = 0.0;
  std::vector<std::size_t> res;  // n entries, last one along s

  /// Symmetric box [-R, R]^{n-1} x [0, S] with spacing dx on every axis.
  static ShearBox symmetric(std::size_t n, double R, double S, double dx);
  GridSpec grid() const;
  ShearBox refined() const;  // half spacing, same extents
  ShearBox coarsened() const;  // double spacing; requires odd resolutions
  ShearBox scaled(double factor) const;  // extents times factor, same resolution
  bool can_shrink(std::size_t k) const;
  ShearBox shrunk(std::size_t k) const;  // extents divided by k, same spacing
  double dx() const;
};

/// A function sampled on a sheared grid over an epigraph-type region. The
/// underlying ExtGridFn lives on the (x1, s) box; points below psi evaluate to +inf.
class EpiGrid {
 public:
  EpiGrid(EpigraphDomain dom, Shear shear, ExtGridFn values);

  static EpiGrid sample(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                        const std::function<double(std::span<const double>)>& fn);

  const EpigraphDomain& domain() const { return dom_; }
  const Shear& shear() const { return shear_; }
  const ExtGridFn& values() const { return values_; }
  const GridSpec& grid() const { return values_.grid(); }
  std::size_t dim() const { return values_.dim(); }

  /// Cartesian position of a node.
  void node_point(std::size_t flat, std::span<double> x) const;
  std::vector<double> node_point(std::size_t flat) const;
  double eval(std::span<const double> x) const;

  /// Trapezoid sum of F(value) over finite nodes (the shear has unit Jacobian).
  double integrate(const std::function<double(double)>& F) const;
  EpiGrid scaled(double c) const;

 private:
  EpigraphDomain dom_;
  Shear shear_;
  ExtGridFn values_;
};

/// Power-law envelope F(x) <= K |x|_2^{-beta}, valid where x_n >= 0 (phi >= 0).
struct TailModel {
  double K = 0.0;
  double beta = 0.0;
};

/// Bound on the integral of a TailModel over {|x|_2 >= rho} in R^dim.
double power_tail_bound(const TailModel& t, std::size_t dim, double rho);

struct QuadResult {
  double value = 0.0;
  double refinement_diff = 0.0;  // |I(dx) - I(2 dx)|, a conservative bound for the extrapolated value
  double tail_bound = 0.0;
  double far_field = 0.0;  // extrapolated contribution from outside the box, included in value
  double error_estimate() const { return refinement_diff + tail_bound; }
};

/// Trapezoid integral of F over {x_n >= psi(x1)} truncated to the sheared box.
double integrate_region(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                        const std::function<double(std::span<const double>)>& F);

/// Several integrands in one pass: F(x, out) fills out[0..count).
std::vector<double> integrate_region_multi(
    const EpigraphDomain& dom, Shear shear, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F);
std::vector<double> integrate_boundary_multi(
    const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F);

/// Estimates with Richardson extrapolation in dx (from the 2dx subgrid). When
/// the region is asymptotically conic (every domain but the paraboloid) and the
/// integrand has a power tail, the part outside the box is extrapolated from
/// homothetic boxes of size 1/2, 1/4 and 1/8 (as many as the resolution
/// allows); tail_bound is then the last correction of that table. Otherwise tail_bound is the envelope bound and
/// nothing is added. One TailModel per integrand; K = 0 means no tail.
std::vector<QuadResult> integrate_region_multi_est(
    const EpigraphDomain& dom, Shear shear, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F, std::span<const TailModel> tails);
std::vector<QuadResult> integrate_boundary_multi_est(
    const EpigraphDomain& dom, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F, std::span<const TailModel> tails);
QuadResult integrate_region_est(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                                const std::function<double(std::span<const double>)>& F, const TailModel& tail);

/// Trapezoid integral of F(x1) over the x1 part of the box.
double integrate_boundary(const ShearBox& box, const std::function<double(std::span<const double>)>& F);
QuadResult integrate_boundary_est(const EpigraphDomain& dom, const ShearBox& box,
                                  const std::function<double(std::span<const double>)>& F, const TailModel& tail);

/// Radius such that every point of the region outside the box has |x|_2 >= rho
/// (requires phi >= 0 and psi >= 0).
double box_outer_radius(const ShearBox& box);
/// Radius such that every x1 outside the box has |x1|_2 >= rho.
double boundary_outer_radius(const ShearBox& box);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t m, std::vector<double>& nodes, std::vector<double>& weights);

/// Polynomial extrapolation to h = 0 of values(h) (Neville); returns the
/// table's final entry and the difference to the previous diagonal entry.
struct Extrapolation {
  double limit = 0.0;
  double last_correction = 0.0;
};
Extrapolation richardson(std::span<const double> h, std::span<const double> values);

}  // namespace epiconvex
