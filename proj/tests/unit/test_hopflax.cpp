#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epiconvex/hopflax.hpp"

using namespace epiconvex;

namespace {

double q2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return 0.5 * s;
}

GridSpec square(double L, double dx, std::size_t n = 2) {
  const auto r = static_cast<std::size_t>(std::llround(2.0 * L / dx)) + 1;
  return GridSpec(std::vector<double>(n, -L), std::vector<double>(n, L), std::vector<std::size_t>(n, r));
}

}  // namespace

TEST(InfConv, IndicatorOfOriginIsIdentity) {
  const GridSpec G({0.0}, {2.0}, {5});
  const ExtGridFn delta(G, {0.0, kInf, kInf, kInf, kInf});
  const ExtGridFn g(G, {3.0, 1.0, kInf, 0.5, 2.0});
  const auto r = infconv(delta, g);
  ASSERT_EQ(r.values.size(), 9u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.values[i], g[i]);
  for (std::size_t i = 5; i < 9; ++i) EXPECT_EQ(r.values[i], kInf);
  EXPECT_EQ(r.argmin[0], 0u);
  EXPECT_EQ(r.argmin[2], kNoIndex);
}

TEST(InfConv, QuadraticsHalve) {
  const GridSpec G({-2.0}, {2.0}, {81});
  const auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return 0.5 * x[0] * x[0]; });
  const auto r = infconv(f, f);
  const double dx = G.step(0);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double x = r.values.grid().coord(0, i);
    if (std::abs(x) <= 2.0) EXPECT_LE(std::abs(r.values[i] - x * x / 4.0), dx * dx);
  }
}

TEST(InfConv, AcceleratedMatchesReference) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (int k = 0; k < 8; ++k) {
    const GridSpec F({-1.0, 0.0}, {1.0, 1.0}, {9, 5}), H({0.0, -0.5}, {1.5, 1.0}, {7, 7});
    std::vector<double> fv(F.size()), hv(H.size());
    for (auto& v : fv) v = U(rng) < 0.4 ? kInf : std::floor(U(rng) * 8.0) / 8.0;  // ties on purpose
    for (auto& v : hv) v = U(rng) < 0.3 ? kInf : std::floor(U(rng) * 8.0) / 8.0;
    fv[0] = 0.0;
    hv[0] = 0.0;
    const ExtGridFn f(F, fv), h(H, hv);
    const auto a = infconv(f, h), b = infconv_reference(f, h);
    ASSERT_EQ(a.values.grid(), b.values.grid());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      EXPECT_EQ(a.values[i], b.values[i]);
      EXPECT_EQ(a.argmin[i], b.argmin[i]);
    }
  }
}

TEST(InfConv, RejectsMismatchedSpacing) {
  const ExtGridFn f(GridSpec({0.0}, {1.0}, {3}), {0.0, 0.0, 0.0});
  const ExtGridFn g(GridSpec({0.0}, {1.0}, {5}), {0.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(infconv(f, g), InvalidInput);
}

TEST(InfConv, AllInfiniteFlag) {
  const GridSpec G({0.0}, {1.0}, {2});
  const auto r = infconv(ExtGridFn(G, {kInf, kInf}), ExtGridFn(G, {0.0, 0.0}));
  EXPECT_TRUE(r.all_infinite);
}

TEST(DomainSum, Intervals) {
  const GridSpec A({0.0}, {3.0}, {13});
  const auto f = ExtGridFn::from_function(A, [](std::span<const double> x) { return x[0] <= 1.0 ? 0.0 : kInf; });
  const auto g = ExtGridFn::from_function(A, [](std::span<const double> x) { return x[0] >= 2.0 ? 0.0 : kInf; });
  EXPECT_EQ(domain_sum_check(f, g).mismatches, 0u);
  const auto r = infconv(f, g);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double x = r.values.grid().coord(0, i);
    EXPECT_EQ(r.values.is_finite(i), x >= 2.0 - 1e-12 && x <= 4.0 + 1e-12) << x;
  }
  const auto full = ExtGridFn::from_function(A, [](std::span<const double>) { return 1.0; });
  const auto s = infconv(full, full);
  EXPECT_EQ(s.values.finite_indices().size(), s.values.size());
}

TEST(HopfLax, ZeroTimeIsIdentity) {
  const GridSpec G = square(1.0, 0.25);
  const auto g = ExtGridFn::from_function(G, [](std::span<const double> x) { return 1.0 + x[0] * x[0]; });
  const auto W = ExtGridFn::from_function(G, q2);
  const auto r = hopflax_apply(g, W, 0.0);
  for (std::size_t i = 0; i < G.size(); ++i) EXPECT_EQ(r.values[i], g[i]);
}

TEST(HopfLax, BranchAndBoundMatchesReference) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.2, 2.0);
  for (int k = 0; k < 6; ++k) {
    const GridSpec G({-1.75, -1.75}, {1.75, 1.75}, {8, 8});
    const double a = P(rng), b = P(rng), c = U(rng), d = U(rng);
    const auto W = ExtGridFn::from_function(G, [&](std::span<const double> y) {
      return a * y[0] * y[0] + b * y[1] * y[1] + c * y[0] + std::abs(y[1] - d);
    }, Sign::any);
    const auto g = ExtGridFn::from_function(G, [&](std::span<const double> x) { return std::exp(0.5 * x[0]) + x[1] * x[1]; });
    const double h = 0.5 + 0.25 * k;
    const auto bb = hopflax_apply(g, W, h, HopfLaxMethod::branch_and_bound);
    const auto ref = hopflax_apply(g, W, h, HopfLaxMethod::reference);
    for (std::size_t i = 0; i < G.size(); ++i) {
      EXPECT_EQ(bb.values[i], ref.values[i]);
      EXPECT_EQ(bb.argmin[i], ref.argmin[i]);
    }
    // Exhaustive oracle over grid y with interpolated g.
    const YSet Y = YSet::from_grid(W);
    for (std::size_t i = 0; i < G.size(); i += 5) {
      const auto x = G.point(i);
      double best = kInf;
      for (std::size_t j = 0; j < G.size(); ++j) {
        const auto y = G.point(j);
        const double z[2] = {x[0] - h * y[0], x[1] - h * y[1]};
        best = std::min(best, g.interpolate(z) + h * W[j]);
      }
      EXPECT_EQ(ref.values[i], best);
    }
  }
}

TEST(HopfLax, PointQueriesAreIndependentOfWarmStart) {
  const GridSpec G = square(2.0, 0.1);
  const auto W = ExtGridFn::from_function(G, q2);
  const YSet Y = YSet::from_grid(W);
  const auto ev = make_function_evaluator(2, [](std::span<const double> x) { return 1.0 + q2(x); }, 1.0);
  const double x[2] = {0.3, -0.4};
  const auto cold = hopflax_point(*ev, Y, 0.7, x);
  const auto warm = hopflax_point(*ev, Y, 0.7, x, HopfLaxMethod::branch_and_bound, 17);
  const auto ref = hopflax_point(*ev, Y, 0.7, x, HopfLaxMethod::reference);
  EXPECT_EQ(cold.value, ref.value);
  EXPECT_EQ(warm.value, ref.value);
  EXPECT_EQ(cold.argmin, ref.argmin);
  // Closed form for quadratics: |x|^2 / (2 (1 + h)) + 1.
  EXPECT_NEAR(cold.value, 1.0 + 0.25 / (2.0 * 1.7), 0.01);
}

TEST(HopfLax, EqualityCaseForQuadraticOnShiftedHalfPlane) {
  const GridSpec G({-2.0, 1.0}, {2.0, 3.0}, {41, 21});
  const auto W = ExtGridFn::from_function(G, q2);
  for (double h : {0.25, 0.5}) {
    const auto Q = hopflax_apply(W, W, h);
    for (std::size_t i = 0; i < G.size(); ++i) {
      const auto x = G.point(i);
      if (x[1] < 1.0 + h - 1e-12) {
        EXPECT_FALSE(Q.values.is_finite(i));
        continue;
      }
      const double y[2] = {x[0] / (1.0 + h), x[1] / (1.0 + h)};
      EXPECT_LE(std::abs(Q.values[i] - (1.0 + h) * q2(y)), 5.0 * 0.1);
    }
  }
}

TEST(Semigroup, CollapsesAtEndpoints) {
  const GridSpec G = square(1.5, 0.1);
  const auto W = ExtGridFn::from_function(G, q2);
  EXPECT_EQ(semigroup_residual(W, W, 0.6, 0.0).max_abs_residual, 0.0);
  EXPECT_EQ(semigroup_residual(W, W, 0.6, 0.6).max_abs_residual, 0.0);
}

TEST(Semigroup, QuadraticResidualShrinks) {
  double prev = kInf;
  for (double dx : {0.2, 0.1}) {
    const GridSpec G = square(2.0, dx);
    const auto W = ExtGridFn::from_function(G, q2);
    const auto r = semigroup_residual(W, W, 0.6, 0.2);
    EXPECT_LE(r.max_abs_residual, 5.0 * dx);
    EXPECT_LT(r.max_abs_residual, prev);
    prev = r.max_abs_residual;
  }
}

TEST(Semigroup, NonconvexCostIsRecordedOnly) {
  const GridSpec G = square(2.0, 0.2);
  const auto W = ExtGridFn::from_function(G, [](std::span<const double> y) { return 1.0 + std::cos(2.0 * y[0]) + y[1] * y[1]; });
  const auto r = semigroup_residual(W, W, 0.6, 0.2);
  EXPECT_GE(r.max_abs_residual, 0.0);
  EXPECT_TRUE(std::isfinite(r.max_abs_residual));
}

TEST(HJ, QuotientsApproachConjugateOfGradient) {
  const GridSpec G = square(3.0, 0.05);
  const auto W = ExtGridFn::from_function(G, q2);
  const YSet Y = YSet::from_grid(W);
  auto gfun = [](std::span<const double> x) { return q2(x) + 1.0; };
  const auto ev = make_function_evaluator(2, gfun, 1.0);
  const double hs[] = {0.4, 0.2, 0.1, 0.05};
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    const double x[2] = {U(rng), U(rng)};
    const double ws = q2(x);
    const auto r = hj_difference_quotient(*ev, gfun(x), Y, x, hs, ws);
    EXPECT_DOUBLE_EQ(r.reference, -ws);
    EXPECT_LE(std::abs(r.extrapolated - r.reference), 0.01 * 1.8);
    // First-order rate: the raw quotients approach the limit monotonically.
    EXPECT_LE(std::abs(r.quotients.back() - r.reference), std::abs(r.quotients.front() - r.reference) + 1e-12);
  }
}

TEST(HJ, ConstantDatumHasZeroLimit) {
  const GridSpec G = square(1.0, 0.1);
  const auto W = ExtGridFn::from_function(G, q2);  // min W = W(0) = 0
  const YSet Y = YSet::from_grid(W);
  const auto ev = make_function_evaluator(2, [](std::span<const double>) { return 2.0; }, 2.0);
  const double x[2] = {0.2, 0.1};
  const double hs[] = {0.4, 0.2, 0.1, 0.05};
  const auto r = hj_difference_quotient(*ev, 2.0, Y, x, hs, 0.0);
  for (double v : r.quotients) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.extrapolated, 0.0);
}

TEST(YSet, BlocksCoverEveryFinitePoint) {
  const GridSpec G = square(1.0, 0.1);
  const auto W = ExtGridFn::from_function(G, [](std::span<const double> y) { return y[0] > 0.5 ? kInf : q2(y); });
  const YSet Y = YSet::from_grid(W, 4);
  EXPECT_EQ(Y.size(), W.finite_indices().size());
  std::vector<int> seen(Y.size(), 0);
  double prev = -kInf;
  for (const auto& b : Y.blocks()) {
    EXPECT_GE(b.w_min, prev);
    prev = b.w_min;
    for (auto m : b.members) {
      ++seen[m];
      EXPECT_GE(Y.values()[m], b.w_min);
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}
