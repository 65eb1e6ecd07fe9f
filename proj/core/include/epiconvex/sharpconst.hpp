#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/domain.hpp"
#include "epiconvex/params.hpp"
#include "epiconvex/quadrature.hpp"
#include "epiconvex/transforms.hpp"

namespace epiconvex {

/// I_alpha = integral over Omega of |x + e|^{-alpha}; alpha must exceed n.
QuadResult i_alpha(const EpigraphDomain& dom, const NormSpec& N, double alpha, const QuadSpec& quad);

struct PowerCostNormalization {
  double C = 0.0;
  double I = 0.0;            // I_{qa}
  double direct = 0.0;       // integral over Omega_1 of (C |x|^q / q)^{-a}
  double error_estimate = 0.0;
};
/// C such that W = C |x|^q / q has integral of W^{-a} over Omega_1 equal to 1.
PowerCostNormalization normalize_power_cost(const EpigraphDomain& dom, const NormSpec& N, double q,
                                            double a, const QuadSpec& quad);

/// W(x) = C |x|^q / q with closed-form conjugate and gradient.
SmoothFn power_cost(double C, double q, const NormSpec& N);

struct SharpConstants {
  double C = 0.0;
  double A = 0.0;
  double B = 0.0;            // direct quadrature over Omega_1
  double B_identity = 0.0;   // from the two moment integrals
  double u = 0.0, v = 0.0;
  double D = 0.0;
  double theta = 0.0;
  double q_trace = 0.0;
  double s = 0.0;            // exponent of lambda in the optimised trace bound
  double lambda_star = 1.0;  // for the extremal; 1 when a = n
  double D_npa = 0.0;
  double I_ap = 0.0;         // I_{ap/(p-1)}
  double I_pa1 = 0.0;        // I_{p(a-1)/(p-1)}
  double error_estimate = 0.0;  // relative, on the quadrature inputs
};

/// Pure assembly from the moment integrals and the Omega_1 integral of W^{1-a}.
SharpConstants assemble_constants(const BBLParams& params, double I_ap, double I_pa1, double B_direct);
/// Constants for (n, p, a) on a cone domain.
SharpConstants gns_constants(const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                             const QuadSpec& quad);
/// Same assembly without the cone requirement (used for the weighted trace bound).
SharpConstants domain_constants(const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                                const QuadSpec& quad);

/// Stationary point and minimum of lambda -> lambda^s K1 + K2 / lambda.
double lambda_star(double s, double K1, double K2);
double lambda_minimum(double s, double K1, double K2);

struct ExtremalSpec {
  double exponent = 0.0;  // -(a-p)/(p-1)
  std::size_t n = 2;
  NormSpec norm;

  double value(std::span<const double> x) const;
  void grad(std::span<const double> x, std::span<double> g) const;
  SmoothFn as_function() const;
};
ExtremalSpec extremal_f(const BBLParams& params, const NormSpec& N);

/// Compactly supported test function (1 - |x - c|_2^2 / r^2)_+^3.
SmoothFn bump_function(std::vector<double> center, double radius);

struct ClaimCheck {
  double max_residual = 0.0;  // relative
  std::vector<double> worst_point;
};
/// Compares |grad |x|^gamma|_* with |gamma| |x|^{gamma-1}, the gradient taken by
/// central differences, at deterministic sample points.
ClaimCheck gradient_norm_claim_check(double gamma, const NormSpec& N, std::size_t n,
                                     std::size_t sample_count, std::uint64_t seed = 11);

struct TraceReport {
  double lhs_boundary = 0.0;
  double rhs_value = 0.0;
  double beta = 0.0;
  double ratio = 0.0;
  double quadrature_error = 0.0;  // absolute, on the ratio
  double coarse_ratio = 0.0;
  SharpConstants constants;
  double G = 0.0;  // integral of |grad f|_*^p
  double M = 0.0;  // integral of f^q_trace
  double L = 0.0;  // boundary integral of f^q_trace (weighted for the convex-set form)
};

/// Trace Gagliardo-Nirenberg check on a cone. Throws HypothesisViolation on non-cones.
TraceReport trace_gn_check(const SmoothFn& f, const BBLParams& params, const EpigraphDomain& dom,
                           const NormSpec& N, const QuadSpec& quad);

/// Weighted trace check on a convex epigraph satisfying the growth condition
/// with constant C beyond radius R; throws HypothesisViolation with the
/// growth-scan witness otherwise.
TraceReport weighted_trace_check(const SmoothFn& f, const BBLParams& params, const EpigraphDomain& dom,
                                 const NormSpec& N, const QuadSpec& quad, double growth_C = 1.0,
                                 double growth_R = 1.0);

struct YoungResidual {
  double lhs = 0.0;           // A/(Bv) * integral |grad f|_*^p
  double rhs = 0.0;           // beta^{p(p-1)(v-1)/(a-p)}
  double rhs_identity = 0.0;  // I_{ap/(p-1)}^{(a-p)/a}
  double residual = 0.0;      // |lhs - rhs| / max(|lhs|, |rhs|)
  double identity_residual = 0.0;
};
YoungResidual young_equality_residual(const SmoothFn& f, const SharpConstants& k, const BBLParams& params,
                                      const EpigraphDomain& dom, const NormSpec& N, const QuadSpec& quad);

struct ApproxFamily {
  double eps = 0.0;
  double C_eps = 1.0;
  double gamma = 0.0;
  SmoothFn f_eps;
  EpiGrid samples;
};
/// f_eps = eps |x + e|^{-gamma(a-p)/p} + C_eps f with C_eps fixed by
/// integral f_eps^{ap/(a-p)} = 1 (bisection to 1e-6 relative).
ApproxFamily approx_family(const SmoothFn& f, double eps, const BBLParams& params, double gamma,
                           const EpigraphDomain& dom, const NormSpec& N, const QuadSpec& quad);

/// c with integral of (c f)^{r} over the domain equal to 1.
SmoothFn normalize_lr(const SmoothFn& f, double r, const EpigraphDomain& dom, const QuadSpec& quad);

}  // namespace epiconvex
