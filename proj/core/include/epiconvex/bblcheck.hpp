#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epiconvex/domain.hpp"
#include "epiconvex/hopflax.hpp"
#include "epiconvex/params.hpp"
#include "epiconvex/quadrature.hpp"
#include "epiconvex/transforms.hpp"

namespace epiconvex {

struct GapReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double h = 0.0;
  double quadrature_error_estimate = 0.0;
  double refinement_diff = 0.0;
  double tail_bound = 0.0;
  std::vector<std::string> warnings;
};

/// Lower growth envelope g >= A |x|^gamma on Omega and W >= A |x|^gamma on
/// Omega_1 (Euclidean norm); A = 0 disables the tail bound.
struct GrowthEnvelope {
  double A = 0.0;
  double gamma = 0.0;
};

/// Integral of g^{-a} over the grid's finite nodes.
double lr_mass(const EpiGrid& g, double a);
/// Rescales g so that the integral of g^{-a} equals 1.
EpiGrid normalize_epigrid(const EpiGrid& g, double a);

/// Dynamical BBL gap with g sampled over Omega and W over Omega_1 on the same
/// sheared box. The B_h integral runs over the image of W's grid under
/// z -> (1+h) z - e. Requires both normalisations within 1%.
GapReport bbl_gap(const EpiGrid& g, const EpiGrid& W, const BBLParams& params,
                  const GrowthEnvelope& env = {});

struct DerivedTails {
  TailModel g_pow;     // g^{1-a} on Omega
  TailModel w_pow;     // W^{1-a} on Omega_1
  TailModel conj;      // |W*(grad g)| / g^a on Omega
  TailModel boundary;  // g^{1-a} on the boundary graph (dimension n-1)
};

/// Tails for g >= A|x|^gamma, |grad g|_* <= A4 (1 + |x|^{gamma-1}) and the
/// power cost conjugate C^{1-p} |y|^p / p.
DerivedTails power_tails(double A, double gamma, double A4, double C, const BBLParams& params);

/// Derivative form at h = 0: lhs = (a-n) int g^{1-a} + (a-1) int W*(grad g)/g^a
/// - int_boundary g^{1-a} P, rhs = int_{Omega_1} W^{1-a}.
GapReport derived_gap(const SmoothFn& g, const SmoothFn& W,
                      const std::function<double(std::span<const double>)>& W_conj,
                      const BBLParams& params, const EpigraphDomain& dom, const QuadSpec& quad,
                      const DerivedTails& tails = {});

struct AppendixTerms {
  double h = 0.0;
  double term_i = 0.0;
  double term_ii = 0.0;
  double term_iii = 0.0;
  double total = 0.0;     // i - ii + iii
  double residual = 0.0;  // total - limit
};

struct AppendixReport {
  double limit = 0.0;          // (a-1) int W*(grad g)/g^a - int g^{1-a} P
  double conj_term = 0.0;
  double boundary_term = 0.0;  // int g^{1-a} P over the boundary
  std::vector<AppendixTerms> rows;
};

/// For each h: (1/h)(int_{B_h} Q^{1-a} - int_Omega g^{1-a}) split as
/// (i) over Omega_h, (ii) over Omega minus Omega_h, (iii) over B_h minus Omega_h.
/// Q uses a grid search over W's nodes on Omega_1 followed by a Newton polish.
AppendixReport appendix_limit_residual(const SmoothFn& g, const SmoothFn& W,
                                       const std::function<double(std::span<const double>)>& W_conj,
                                       const BBLParams& params, const EpigraphDomain& dom,
                                       std::span<const double> h_list, const QuadSpec& quad,
                                       std::size_t column_nodes = 8);

struct ConditionResult {
  std::string name;
  bool passes = false;
  double declared = 0.0;
  double fitted = 0.0;
  std::vector<double> witness;
};

struct AdmissibilityReport {
  std::vector<ConditionResult> conditions;  // C0..C4 then growth
  bool all_pass() const;
  std::uint64_t seed = 0;
};

/// Checks (C0)-(C4) on radial fans up to radius 1e3 and the growth condition
/// of the domain. Constants declared as 0 are fitted on one fan and verified on
/// a second one with a 1% margin.
AdmissibilityReport admissibility_report(const SmoothFn& g, const SmoothFn& W, const AdmissibilityParams& adm,
                                         const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                                         std::size_t sample_count, std::uint64_t seed = 5);

struct EquivalenceReport {
  std::vector<double> h;
  std::vector<double> phi;
  double phi0 = 0.0;
  double derivative_fd = 0.0;
  double derivative_integral = 0.0;  // n int W*(grad g) / g^{n+1}
  double derivative_scale = 0.0;     // n int |W*(grad g)| / g^{n+1}
  double min_phi = 0.0;
};

/// phi(h) = int Q_h(g)^{-n} on g's Cartesian grid over R^n, its forward
/// difference at 0 and the integral expression for phi'(0).
EquivalenceReport equivalence_scan(const ExtGridFn& g, const ExtGridFn& W,
                                   const std::function<void(std::span<const double>, std::span<double>)>& grad_g,
                                   const std::function<double(std::span<const double>)>& W_conj,
                                   std::span<const double> h_grid);

}  // namespace epiconvex
