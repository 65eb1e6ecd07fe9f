#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/domain.hpp"
#include "epiconvex/extgrid.hpp"
#include "epiconvex/quadrature.hpp"
#include "epiconvex/transforms.hpp"

namespace epiconvex {

/// A parameter combination outside the hypotheses of the inequality being checked.
class HypothesisViolation : public InvalidInput {
 public:
  explicit HypothesisViolation(const std::string& what, std::vector<double> witness = {})
      : InvalidInput(what), witness_(std::move(witness)) {}
  const std::vector<double>& witness() const { return witness_; }

 private:
  std::vector<double> witness_;
};

/// Exponents shared by the transport inequalities: dimension n, a >= n,
/// 1 < p < n with conjugate q, and a time h = t/(1-t).
struct BBLParams {
  std::size_t n = 2;
  double a = 2.0;
  double p = 1.5;
  double q = 3.0;
  double h = 0.0;
  double t = 0.0;

  static BBLParams make(std::size_t n, double a, double p, double h = 0.0);
  static BBLParams from_t(std::size_t n, double a, double p, double t);
  /// Throws HypothesisViolation naming the violated condition.
  void validate() const;
};

/// Growth envelopes for an admissible pair (g, W).
struct AdmissibilityParams {
  double gamma = 2.0;
  double A1 = 0.0, A2 = 0.0, A3 = 0.0, A4 = 0.0;  // 0 = fit from samples
  double growth_C = 1.0;
  double growth_R = 1.0;
};

/// Upper envelopes of a function and its gradient: f <= K_value |x|^{-kappa},
/// |grad f|_* <= K_grad |x|^{-kappa-1} for x in the upper half-space, or
/// support inside the Euclidean ball of radius support_radius.
struct Decay {
  double K_value = 0.0;
  double K_grad = 0.0;
  double kappa = 0.0;
  double support_radius = std::numeric_limits<double>::infinity();
};

/// A function with analytic gradient. Values may be +inf off the domain.
struct SmoothFn {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  Decay decay;

  std::vector<double> gradient(std::span<const double> x) const;
  /// x -> c * f(x)
  SmoothFn scaled(double c) const;
  /// x -> f(lambda x)
  SmoothFn dilated(double lambda) const;
};

/// Truncated quadrature box: x1 in [-R, R]^{n-1}, s in [0, S], spacing dx.
/// 2R/dx and S/dx must be multiples of 4: error estimates compare the box
/// with its 2dx subgrid, and some checks repeat that on the 2dx level.
struct QuadSpec {
  double dx = 0.1;
  double R = 20.0;
  double S = 0.0;  // 0 means S = R

  ShearBox box(std::size_t n) const;
  void validate() const;
};

/// |x|_N >= c |x|_2 for every x.
double norm_lower_constant(const NormSpec& N, std::size_t n);

}  // namespace epiconvex
