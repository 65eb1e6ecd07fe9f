#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "epiconvex/extgrid.hpp"

using namespace epiconvex;

TEST(ExtValue, RejectsNaNAndNegatives) {
  EXPECT_THROW(ExtValue(std::nan("")), InvalidInput);
  EXPECT_THROW(ExtValue(-1e-300), InvalidInput);
  EXPECT_TRUE(ExtValue(0.0).finite());
  EXPECT_FALSE(ExtValue::infinity().finite());
}

TEST(ExtValue, InfinityAbsorbsAddition) {
  EXPECT_FALSE((ExtValue(2.0) + ExtValue::infinity()).finite());
  EXPECT_EQ(min(ExtValue(2.0), ExtValue::infinity()).value(), 2.0);
}

TEST(GridSpec, RavelUnravelRoundTrip) {
  const GridSpec G({-1.0, 0.0, 2.0}, {1.0, 3.0, 2.5}, {5, 4, 3});
  ASSERT_EQ(G.size(), 60u);
  for (std::size_t i = 0; i < G.size(); ++i) {
    const auto idx = G.unravel(i);
    EXPECT_EQ(G.ravel(idx), i);
  }
  const auto p = G.point(G.ravel(std::vector<std::size_t>{4, 0, 2}));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 2.5);
}

TEST(GridSpec, RejectsInconsistentBoxes) {
  EXPECT_THROW(GridSpec({0.0}, {1.0}, {0}), InvalidInput);
  EXPECT_THROW(GridSpec({1.0}, {0.0}, {3}), InvalidInput);
  EXPECT_THROW(GridSpec({0.0}, {1.0}, {1}), InvalidInput);
  EXPECT_THROW(GridSpec({0.0, 0.0}, {1.0}, {3}), InvalidInput);
}

TEST(GridSpec, TrapezoidWeightsIntegrateConstants) {
  const GridSpec G({0.0, -1.0}, {2.0, 1.0}, {9, 5});
  double s = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) s += G.trapezoid_weight(i);
  EXPECT_NEAR(s, 4.0, 1e-12);
}

TEST(ExtGridFn, NonnegativeSignRejectsNegativeSamples) {
  const GridSpec G({0.0}, {1.0}, {3});
  EXPECT_THROW(ExtGridFn(G, {0.0, -1.0, 2.0}), InvalidInput);
  EXPECT_NO_THROW(ExtGridFn(G, {0.0, -1.0, 2.0}, Sign::any));
  EXPECT_THROW(ExtGridFn(G, {0.0, 1.0}), InvalidInput);
}

TEST(ExtGridFn, FiniteIndicesSkipInfinity) {
  const GridSpec G({0.0}, {3.0}, {4});
  const ExtGridFn f(G, {1.0, kInf, 2.0, kInf});
  ASSERT_EQ(f.finite_indices().size(), 2u);
  EXPECT_EQ(f.finite_indices()[0], 0u);
  EXPECT_EQ(f.finite_indices()[1], 2u);
}

TEST(ExtGridFn, InterpolationIsExactOnBilinearAndInfiniteOutside) {
  const GridSpec G({0.0, 0.0}, {1.0, 2.0}, {3, 5});
  const auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return 1.0 + 2.0 * x[0] + x[1] + x[0] * x[1]; });
  const double p[2] = {0.3, 1.7};
  EXPECT_NEAR(f.interpolate(p), 1.0 + 0.6 + 1.7 + 0.51, 1e-12);
  const double out[2] = {1.5, 0.5};
  EXPECT_EQ(f.interpolate(out), kInf);
}

TEST(ExtGridFn, InterpolationSeesInfiniteCorners) {
  const GridSpec G({0.0}, {2.0}, {3});
  const ExtGridFn f(G, {0.0, 1.0, kInf});
  const double inside[1] = {0.5}, touching[1] = {1.5}, node[1] = {1.0};
  EXPECT_DOUBLE_EQ(f.interpolate(inside), 0.5);
  EXPECT_EQ(f.interpolate(touching), kInf);
  EXPECT_DOUBLE_EQ(f.interpolate(node), 1.0);
}

TEST(ExtGridFn, GridConvexity) {
  const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {7, 7});
  const auto convex = ExtGridFn::from_function(G, [](std::span<const double> x) { return x[0] * x[0] + std::abs(x[1]); });
  const auto concave =
      ExtGridFn::from_function(G, [](std::span<const double> x) { return 2.0 - x[0] * x[0]; });
  // Linear pieces sampled at lo + i dx round to second differences of order 1e-16.
  EXPECT_TRUE(convex.grid_convex(1e-12));
  EXPECT_FALSE(concave.grid_convex(1e-12));
}

TEST(ExtGridFn, TextRoundTripKeepsInfinityAndBits) {
  const GridSpec G({-1.0, 0.5}, {1.0, 1.5}, {3, 2});
  const ExtGridFn f(G, {0.1, kInf, 1.0 / 3.0, 2.0, kInf, 1e-300});
  std::stringstream ss;
  f.write(ss);
  const auto g = ExtGridFn::read(ss);
  ASSERT_EQ(g.grid(), f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], f[i]);
}

TEST(ExtGridFn, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "epiconvex_roundtrip.grid";
  const GridSpec G({0.0}, {1.0}, {5});
  const ExtGridFn f(G, {0.0, 0.25, kInf, 0.75, 1.0});
  f.save(path.string());
  const auto g = ExtGridFn::load(path.string());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g[i], f[i]);
  std::filesystem::remove(path);
  EXPECT_THROW(ExtGridFn::load(path.string()), InvalidInput);
}

TEST(ExtGridFn, ReadRejectsMalformedFiles) {
  std::stringstream bad_header("not json\n1,2\n");
  EXPECT_THROW(ExtGridFn::read(bad_header), InvalidInput);
  std::stringstream short_body("{\"dim\":1,\"box\":[[0,1]],\"resolution\":[3]}\n1,2\n");
  EXPECT_THROW(ExtGridFn::read(short_body), InvalidInput);
  std::stringstream bad_token("{\"dim\":1,\"box\":[[0,1]],\"resolution\":[2]}\n1,abc\n");
  EXPECT_THROW(ExtGridFn::read(bad_token), InvalidInput);
}

TEST(NodeSets, MismatchWithinOneCellIsTolerated) {
  const GridSpec G({0.0, 0.0}, {4.0, 4.0}, {5, 5});
  NodeSet a{G, std::vector<std::uint8_t>(G.size(), 0)}, b = a;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const auto p = G.point(i);
    a.mask[i] = p[1] >= 2.0;
    b.mask[i] = p[1] >= 3.0;
  }
  const auto c = compare_node_sets(a, b);
  EXPECT_EQ(c.mismatches, 5u);
  EXPECT_EQ(c.mismatches_beyond_one_cell, 0u);

  NodeSet far = b;
  far.mask[G.ravel(std::vector<std::size_t>{0, 0})] = 1;
  const auto d = compare_node_sets(far, b);
  EXPECT_EQ(d.mismatches_beyond_one_cell, 1u);
  ASSERT_EQ(d.witness.size(), 2u);
  EXPECT_EQ(d.witness[0], 0.0);
}
