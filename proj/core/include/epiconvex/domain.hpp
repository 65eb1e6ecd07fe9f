#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/extgrid.hpp"

namespace epiconvex {

enum class DomainKind { halfspace, cone, paraboloid, affine_max };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct AffinePiece {
  std::vector<double> c;  // slope in R^{n-1}
  double d = 0.0;         // offset; the largest offset must be 0 so that phi(0) = 0
};

struct PhiGradient {
  std::vector<double> grad;
  bool flagged = false;  // phi is not differentiable here; grad is a one-sided subgradient
};

struct WeightSample {
  double value = 0.0;
  bool flagged = false;
};

struct ConeTestResult {
  bool is_cone = true;
  double worst_violation = 0.0;
  std::string witness_kind;     // "support" or "homogeneity"
  std::vector<double> witness;  // support: (x1, y1, h); homogeneity: (t, x1)
};

struct GrowthScan {
  double fitted_C = 0.0;  // sup of |x1 . grad phi| / |(x1, phi(x1))| over the sampled fan
  double declared_C = 0.0;
  bool passes = true;
  std::vector<double> witness;  // x1 attaining the largest ratio
};

/// Omega = {x in R^n : x_n >= phi(x_1..x_{n-1})} for phi in a small closed family
/// of convex functions with phi(0) = 0.
class EpigraphDomain {
 public:
  static EpigraphDomain halfspace(std::size_t n);
  /// phi(x1) = slope * |x1|_2
  static EpigraphDomain cone(std::size_t n, double slope = 1.0);
  /// phi(x1) = coef * |x1|_2^2
  static EpigraphDomain paraboloid(std::size_t n, double coef = 1.0);
  /// phi(x1) = max_i (c_i . x1 + d_i)
  static EpigraphDomain affine_max(std::size_t n, std::vector<AffinePiece> pieces);
  /// Declarative form: kind name plus flat parameter list. For affine_max the
  /// parameters are consecutive (c_1..c_{n-1}, d) groups.
  static EpigraphDomain from_spec(const std::string& kind, std::size_t n,
                                  const std::vector<double>& params);

  std::size_t n() const { return n_; }
  DomainKind kind() const { return kind_; }
  std::string describe() const;
  std::vector<double> params() const;
  std::vector<double> e() const;

  double phi(std::span<const double> x1) const;
  PhiGradient grad_phi(std::span<const double> x1) const;
  /// t * phi(x1 / t) for t > 0; exact for positively homogeneous phi.
  double perspective(std::span<const double> x1, double t) const;
  /// Lower boundary of B_h: h + (1+h) phi(x1/(1+h)).
  double bh_boundary(std::span<const double> x1, double h) const;

  bool contains(std::span<const double> x, double h = 0.0) const;
  bool bh_membership(std::span<const double> x, double h) const;

  ConeTestResult is_cone(std::size_t sample_count, double tol, std::uint64_t seed = 7) const;
  /// Structural homogeneity of the closed-form phi.
  bool homogeneous() const;

  WeightSample weight_P(std::span<const double> x1) const;

  /// Positions in x1 (n = 2 only) where phi has a kink; quadrature places nodes there.
  std::vector<double> kinks() const;

  GrowthScan growth_scan(double declared_C, double R, double r_max = 1e3,
                         std::size_t radial_samples = 200, std::size_t directions = 16) const;

  ExtGridFn sample_grid(const GridSpec& grid,
                        const std::function<double(std::span<const double>)>& fn,
                        double h = 0.0) const;
  NodeSet omega_h_nodes(const GridSpec& grid, double h) const;
  NodeSet bh_nodes(const GridSpec& grid, double h) const;

 private:
  EpigraphDomain(DomainKind kind, std::size_t n) : kind_(kind), n_(n) {}
  void validate() const;
  void check_dim_x(std::span<const double> x) const;
  void check_dim_x1(std::span<const double> x1) const;

  DomainKind kind_;
  std::size_t n_;
  double coef_ = 0.0;
  std::vector<AffinePiece> pieces_;
};

/// P(x1) for boundary quadrature: at flagged kinks, the mean of the one-sided
/// values along each axis (P jumps there, so this is the trapezoid-consistent value).
double boundary_weight(const EpigraphDomain& dom, std::span<const double> x1);

/// Central-difference gradient of phi with step 1e-6 (1 + |x1|).
std::vector<double> fd_grad_phi(const EpigraphDomain& dom, std::span<const double> x1);

}  // namespace epiconvex
