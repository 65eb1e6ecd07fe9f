#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiconvex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite_ext(double v) { return v < kInf; }

/// Value in [0, +inf]. Construction rejects NaN and negative numbers.
class ExtValue {
 public:
  ExtValue() = default;
  explicit ExtValue(double v);
  static ExtValue infinity() { return ExtValue(kInf); }

  double value() const { return v_; }
  bool finite() const { return v_ < kInf; }

  friend ExtValue operator+(ExtValue a, ExtValue b) { return ExtValue(a.v_ + b.v_); }
  friend ExtValue min(ExtValue a, ExtValue b) { return a.v_ <= b.v_ ? a : b; }
  friend bool operator==(ExtValue a, ExtValue b) = default;

 private:
  double v_ = 0.0;
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned uniform tensor grid; node i along axis d sits at lo[d] + i*step(d).
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> res;

  GridSpec() = default;
  GridSpec(std::vector<double> lo_, std::vector<double> hi_, std::vector<std::size_t> res_);

  std::size_t dim() const { return res.size(); }
  std::size_t size() const;
  double step(std::size_t d) const {
    return res[d] > 1 ? (hi[d] - lo[d]) / static_cast<double>(res[d] - 1) : 0.0;
  }
  double coord(std::size_t d, std::size_t i) const {
    return lo[d] + static_cast<double>(i) * step(d);
  }
  std::vector<std::size_t> strides() const;
  std::vector<std::size_t> unravel(std::size_t flat) const;
  std::size_t ravel(std::span<const std::size_t> idx) const;
  std::vector<double> point(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> out) const;
  /// Trapezoid weight of a node (product of 1-D weights).
  double trapezoid_weight(std::size_t flat) const;
  bool same_spacing(const GridSpec& other, double rel_tol = 1e-12) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Sign { nonnegative, any };

/// Sampled extended-real function on a GridSpec; +inf marks points outside the
/// essential domain.
class ExtGridFn {
 public:
  ExtGridFn() = default;
  ExtGridFn(GridSpec grid, std::vector<double> values, Sign sign = Sign::nonnegative);

  static ExtGridFn from_function(const GridSpec& grid,
                                 const std::function<double(std::span<const double>)>& fn,
                                 Sign sign = Sign::nonnegative);

  const GridSpec& grid() const { return grid_; }
  std::size_t dim() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::size_t>& finite_indices() const { return finite_; }
  bool is_finite(std::size_t i) const { return values_[i] < kInf; }
  Sign sign() const { return sign_; }

  /// Multilinear interpolation. Outside the box, or when a corner that carries
  /// positive weight is +inf, the result is +inf.
  double interpolate(std::span<const double> x) const;

  ExtGridFn scaled(double c) const;

  /// Trapezoid sum of F(value) over finite nodes.
  double trapezoid(const std::function<double(double)>& F) const;

  /// True when every axis has nonnegative second differences over finite triples.
  bool grid_convex(double tol = 0.0) const;

  void write(std::ostream& os) const;
  static ExtGridFn read(std::istream& is, Sign sign = Sign::nonnegative);
  void save(const std::string& path) const;
  static ExtGridFn load(const std::string& path, Sign sign = Sign::nonnegative);

 private:
  void rebuild_finite();

  GridSpec grid_;
  std::vector<double> values_;
  std::vector<std::size_t> finite_;
  Sign sign_ = Sign::nonnegative;
};

/// Node-set membership stored as a row-major mask.
struct NodeSet {
  GridSpec grid;
  std::vector<std::uint8_t> mask;
  std::size_t count() const;
};

struct NodeSetComparison {
  std::size_t mismatches = 0;
  std::size_t mismatches_beyond_one_cell = 0;
  std::vector<double> witness;  // a mismatched node beyond one cell, if any
};

/// Mismatches between a and b; a mismatch counts as within one cell when some
/// node of its 3^n neighbourhood has the opposite membership in b.
NodeSetComparison compare_node_sets(const NodeSet& a, const NodeSet& b);

}  // namespace epiconvex
