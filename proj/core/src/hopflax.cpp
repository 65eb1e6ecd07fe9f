#include "epiconvex/hopflax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epiconvex/parallel.hpp"

namespace epiconvex {

namespace {

constexpr double kIndexSlack = 1e-9;

// Level k holds minima over 2^k-wide index blocks of the base grid.
class MinPyramid {
 public:
  explicit MinPyramid(const ExtGridFn& f) : n_(f.dim()) {
    std::vector<std::size_t> shape(f.grid().res);
    levels_.emplace_back(f.values().begin(), f.values().end());
    shapes_.push_back(shape);
    while (std::any_of(shape.begin(), shape.end(), [](std::size_t r) { return r > 1; })) {
      std::vector<std::size_t> next(n_);
      for (std::size_t d = 0; d < n_; ++d) next[d] = (shape[d] + 1) / 2;
      const auto& prev = levels_.back();
      std::vector<double> cur(product(next), kInf);
      const auto pst = strides(shape), nst = strides(next);
      for (std::size_t flat = 0; flat < prev.size(); ++flat) {
        std::size_t rem = flat, o = 0;
        for (std::size_t d = 0; d < n_; ++d) {
          const std::size_t i = rem / pst[d];
          rem %= pst[d];
          o += (i / 2) * nst[d];
        }
        cur[o] = std::min(cur[o], prev[flat]);
      }
      levels_.push_back(std::move(cur));
      shapes_.push_back(next);
      shape = next;
    }
  }

  /// Min over a superset of the inclusive index box [lo, hi].
  double query(const std::size_t* lo, const std::size_t* hi) const {
    std::size_t extent = 1;
    for (std::size_t d = 0; d < n_; ++d) extent = std::max(extent, hi[d] - lo[d] + 1);
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= extent && k + 1 < levels_.size()) ++k;
    const auto& lvl = levels_[k];
    const auto st = strides(shapes_[k]);
    std::size_t blo[8], bhi[8], cur[8];
    for (std::size_t d = 0; d < n_; ++d) {
      blo[d] = lo[d] >> k;
      bhi[d] = hi[d] >> k;
      cur[d] = blo[d];
    }
    double m = kInf;
    while (true) {
      std::size_t o = 0;
      for (std::size_t d = 0; d < n_; ++d) o += cur[d] * st[d];
      m = std::min(m, lvl[o]);
      std::size_t d = n_;
      while (d-- > 0) {
        if (cur[d] < bhi[d]) {
          ++cur[d];
          break;
        }
        cur[d] = blo[d];
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    return m;
  }

 private:
  static std::size_t product(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }
  static std::vector<std::size_t> strides(const std::vector<std::size_t>& s) {
    std::vector<std::size_t> st(s.size(), 1);
    for (std::size_t d = s.size(); d-- > 1;) st[d - 1] = st[d] * s[d];
    return st;
  }

  std::size_t n_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::vector<std::size_t>> shapes_;
};

// Margin that covers rounding in a multilinear interpolant, whose weights sum
// to 1 only up to a few ulps.
double rounding_margin(const ExtGridFn& f) {
  double mx = 0.0;
  for (auto i : f.finite_indices()) mx = std::max(mx, std::abs(f[i]));
  return static_cast<double>(std::size_t{1} << f.dim()) * 8.0 * 2.220446049250313e-16 * mx;
}

double finite_min(const ExtGridFn& f) {
  double m = kInf;
  for (auto i : f.finite_indices()) m = std::min(m, f[i]);
  return m;
}

// Inclusive node-index range touched by interpolation anywhere in [a, b] along
// axis d. Returns false when the interval misses the grid.
bool index_range(const GridSpec& g, std::size_t d, double a, double b, std::size_t& lo,
                 std::size_t& hi) {
  const std::size_t r = g.res[d];
  if (r == 1) {
    lo = hi = 0;
    return a <= g.lo[d] + 1e-12 * (1.0 + std::abs(g.lo[d])) &&
           b >= g.lo[d] - 1e-12 * (1.0 + std::abs(g.lo[d]));
  }
  const double h = g.step(d);
  double ua = (a - g.lo[d]) / h - kIndexSlack;
  double ub = (b - g.lo[d]) / h + kIndexSlack;
  const double top = static_cast<double>(r - 1);
  if (ub < -kIndexSlack || ua > top + kIndexSlack) return false;
  ua = std::clamp(ua, 0.0, top);
  ub = std::clamp(ub, 0.0, top);
  lo = static_cast<std::size_t>(std::floor(ua));
  hi = std::min(r - 1, static_cast<std::size_t>(std::floor(ub)) + 1);
  return true;
}

class GridEvaluator final : public GEvaluator {
 public:
  explicit GridEvaluator(const ExtGridFn& g)
      : g_(g), pyr_(g), gmin_(finite_min(g)), margin_(rounding_margin(g)) {}

  std::size_t dim() const override { return g_.dim(); }
  double eval(std::span<const double> x) const override { return g_.interpolate(x); }
  double global_min() const override { return gmin_ - margin_; }
  double lower_bound(std::span<const double> lo, std::span<const double> hi) const override {
    std::size_t a[8], b[8];
    for (std::size_t d = 0; d < g_.dim(); ++d)
      if (!index_range(g_.grid(), d, lo[d], hi[d], a[d], b[d])) return kInf;
    return pyr_.query(a, b) - margin_;
  }

 private:
  const ExtGridFn& g_;
  MinPyramid pyr_;
  double gmin_, margin_;
};

class EpiGridEvaluator final : public GEvaluator {
 public:
  explicit EpiGridEvaluator(const EpiGrid& g)
      : g_(g), pyr_(g.values()), gmin_(finite_min(g.values())), margin_(rounding_margin(g.values())) {}

  std::size_t dim() const override { return g_.dim(); }
  double eval(std::span<const double> x) const override { return g_.eval(x); }
  double global_min() const override { return gmin_ - margin_; }
  double lower_bound(std::span<const double> lo, std::span<const double> hi) const override {
    const std::size_t n = g_.dim();
    const std::size_t m = n - 1;
    const GridSpec& grid = g_.grid();
    std::size_t a[8], b[8];
    for (std::size_t d = 0; d < m; ++d)
      if (!index_range(grid, d, lo[d], hi[d], a[d], b[d])) return kInf;
    const auto& dom = g_.domain();
    const Shear& sh = g_.shear();
    // psi is convex: its max over the x1 box sits at a corner, and a
    // subgradient at the centre bounds it from below.
    double psi_max = -kInf;
    std::vector<double> c(m);
    for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
      for (std::size_t d = 0; d < m; ++d) c[d] = (corner >> d) & 1u ? hi[d] : lo[d];
      psi_max = std::max(psi_max, sh.psi(dom, c));
    }
    for (std::size_t d = 0; d < m; ++d) c[d] = 0.5 * (lo[d] + hi[d]);
    const auto sg = sh.subgrad(dom, c);
    double psi_min = sh.psi(dom, c);
    for (std::size_t d = 0; d < m; ++d) psi_min -= std::abs(sg[d]) * 0.5 * (hi[d] - lo[d]);
    const double s_lo = lo[m] - psi_max;
    const double s_hi = hi[m] - psi_min;
    const double pad = 1e-12 * (1.0 + std::abs(lo[m]) + std::abs(hi[m]) + std::abs(psi_max));
    if (!index_range(grid, m, s_lo - pad, s_hi + pad, a[m], b[m])) return kInf;
    return pyr_.query(a, b) - margin_;
  }

 private:
  const EpiGrid& g_;
  MinPyramid pyr_;
  double gmin_, margin_;
};

class FunctionEvaluator final : public GEvaluator {
 public:
  FunctionEvaluator(std::size_t n, std::function<double(std::span<const double>)> g, double gmin)
      : n_(n), g_(std::move(g)), gmin_(gmin) {}
  std::size_t dim() const override { return n_; }
  double eval(std::span<const double> x) const override { return g_(x); }
  double global_min() const override { return gmin_; }
  double lower_bound(std::span<const double>, std::span<const double>) const override { return gmin_; }

 private:
  std::size_t n_;
  std::function<double(std::span<const double>)> g_;
  double gmin_;
};

std::size_t default_edge(std::size_t n) { return n <= 2 ? 8 : (n == 3 ? 4 : 2); }

}  // namespace

std::unique_ptr<GEvaluator> make_grid_evaluator(const ExtGridFn& g) {
  if (g.dim() > 8) throw InvalidInput("evaluator supports at most 8 dimensions");
  return std::make_unique<GridEvaluator>(g);
}

std::unique_ptr<GEvaluator> make_epigrid_evaluator(const EpiGrid& g) {
  if (g.dim() > 8) throw InvalidInput("evaluator supports at most 8 dimensions");
  return std::make_unique<EpiGridEvaluator>(g);
}

std::unique_ptr<GEvaluator> make_function_evaluator(std::size_t dim,
                                                    std::function<double(std::span<const double>)> g,
                                                    double global_min) {
  return std::make_unique<FunctionEvaluator>(dim, std::move(g), global_min);
}

YSet YSet::from_grid(const ExtGridFn& W, std::size_t block_edge) {
  YSet Y;
  Y.dim_ = W.dim();
  std::vector<double> p(Y.dim_);
  for (auto i : W.finite_indices()) {
    W.grid().point(i, p);
    Y.pts_.insert(Y.pts_.end(), p.begin(), p.end());
    Y.w_.push_back(W[i]);
    Y.index_.push_back(i);
  }
  Y.build_blocks(W.grid(), block_edge);
  return Y;
}

YSet YSet::from_epigrid(const EpiGrid& W, std::size_t block_edge) {
  YSet Y;
  Y.dim_ = W.dim();
  std::vector<double> p(Y.dim_);
  for (auto i : W.values().finite_indices()) {
    W.node_point(i, p);
    Y.pts_.insert(Y.pts_.end(), p.begin(), p.end());
    Y.w_.push_back(W.values()[i]);
    Y.index_.push_back(i);
  }
  Y.build_blocks(W.grid(), block_edge);
  return Y;
}

void YSet::build_blocks(const GridSpec& grid, std::size_t block_edge) {
  const std::size_t n = dim_;
  const std::size_t edge = block_edge ? block_edge : default_edge(n);
  std::vector<std::size_t> bres(n), bst(n, 1);
  for (std::size_t d = 0; d < n; ++d) bres[d] = (grid.res[d] + edge - 1) / edge;
  for (std::size_t d = n; d-- > 1;) bst[d - 1] = bst[d] * bres[d];
  std::vector<std::size_t> slot(bst[0] * bres[0], kNoIndex);
  blocks_.clear();
  for (std::size_t pos = 0; pos < index_.size(); ++pos) {
    const auto idx = grid.unravel(index_[pos]);
    std::size_t b = 0;
    for (std::size_t d = 0; d < n; ++d) b += (idx[d] / edge) * bst[d];
    if (slot[b] == kNoIndex) {
      slot[b] = blocks_.size();
      Block blk;
      blk.w_min = kInf;
      blk.lo.assign(n, kInf);
      blk.hi.assign(n, -kInf);
      blocks_.push_back(std::move(blk));
    }
    Block& blk = blocks_[slot[b]];
    blk.members.push_back(pos);
    blk.w_min = std::min(blk.w_min, w_[pos]);
    for (std::size_t d = 0; d < n; ++d) {
      blk.lo[d] = std::min(blk.lo[d], pts_[pos * n + d]);
      blk.hi[d] = std::max(blk.hi[d], pts_[pos * n + d]);
    }
  }
  std::stable_sort(blocks_.begin(), blocks_.end(),
                   [](const Block& a, const Block& b) { return a.w_min < b.w_min; });
  tree_.clear();
  if (blocks_.empty()) return;
  std::vector<std::size_t> ids(blocks_.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  tree_.reserve(2 * blocks_.size());
  build_tree(ids, 0, ids.size());
}

// Median split of block centres along the widest axis.
std::size_t YSet::build_tree(std::vector<std::size_t>& ids, std::size_t b, std::size_t e) {
  const std::size_t n = dim_;
  const std::size_t me = tree_.size();
  tree_.emplace_back();
  TreeNode node;
  node.w_min = kInf;
  node.lo.assign(n, kInf);
  node.hi.assign(n, -kInf);
  for (std::size_t i = b; i < e; ++i) {
    const Block& blk = blocks_[ids[i]];
    node.w_min = std::min(node.w_min, blk.w_min);
    for (std::size_t d = 0; d < n; ++d) {
      node.lo[d] = std::min(node.lo[d], blk.lo[d]);
      node.hi[d] = std::max(node.hi[d], blk.hi[d]);
    }
  }
  if (e - b == 1) {
    node.block = ids[b];
  } else {
    std::size_t axis = 0;
    for (std::size_t d = 1; d < n; ++d)
      if (node.hi[d] - node.lo[d] > node.hi[axis] - node.lo[axis]) axis = d;
    const std::size_t mid = b + (e - b) / 2;
    auto centre = [&](std::size_t id) { return blocks_[id].lo[axis] + blocks_[id].hi[axis]; };
    std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(b), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                     ids.begin() + static_cast<std::ptrdiff_t>(e), [&](std::size_t u, std::size_t v) {
                       const double cu = centre(u), cv = centre(v);
                       return cu < cv || (cu == cv && u < v);
                     });
    node.left = build_tree(ids, b, mid);
    node.right = build_tree(ids, mid, e);
  }
  tree_[me] = std::move(node);
  return me;
}

namespace {

struct Search {
  const GEvaluator& g;
  const YSet& Y;
  double h;
  std::span<const double> x;
  double best = kInf;
  std::size_t best_pos = kNoIndex;
  double z[8] = {};

  void consider(std::size_t pos) {
    const std::size_t n = Y.dim();
    const double* y = Y.points().data() + pos * n;
    for (std::size_t d = 0; d < n; ++d) z[d] = x[d] - h * y[d];
    const double gv = g.eval(std::span<const double>(z, n));
    if (!(gv < kInf)) return;
    const double v = gv + h * Y.values()[pos];
    if (v < best || (v == best && pos < best_pos)) {
      best = v;
      best_pos = pos;
    }
  }

  // Lower bound of g(x - h y) + h W(y) over a node's bounding box.
  double bound(const YSet::TreeNode& t) const {
    const std::size_t n = Y.dim();
    double zlo[8], zhi[8];
    for (std::size_t d = 0; d < n; ++d) {
      zlo[d] = x[d] - h * t.hi[d];
      zhi[d] = x[d] - h * t.lo[d];
    }
    return h * t.w_min + g.lower_bound(std::span<const double>(zlo, n), std::span<const double>(zhi, n));
  }

  // Nodes whose bound exceeds the incumbent cannot hold a minimiser or a tie.
  void descend(std::size_t id, double lb) {
    const auto& T = Y.tree();
    const YSet::TreeNode& t = T[id];
    if (lb > best) return;
    if (t.block != kNoIndex) {
      for (auto pos : Y.blocks()[t.block].members) consider(pos);
      return;
    }
    const double bl = bound(T[t.left]), br = bound(T[t.right]);
    if (br < bl) {
      descend(t.right, br);
      descend(t.left, bl);
    } else {
      descend(t.left, bl);
      descend(t.right, br);
    }
  }
};

HopfLaxPoint point_impl(const GEvaluator& g, const YSet& Y, double h, std::span<const double> x,
                        HopfLaxMethod method, std::size_t warm) {
  const std::size_t n = Y.dim();
  if (n > 8) throw InvalidInput("Hopf-Lax supports at most 8 dimensions");
  if (x.size() != n || g.dim() != n) throw InvalidInput("Hopf-Lax: dimension mismatch");
  Search s{g, Y, h, x};
  if (method == HopfLaxMethod::reference) {
    for (std::size_t pos = 0; pos < Y.size(); ++pos) s.consider(pos);
  } else {
    if (warm < Y.size()) s.consider(warm);
    if (!Y.tree().empty()) s.descend(0, s.bound(Y.tree()[0]));
  }
  HopfLaxPoint r;
  if (s.best_pos != kNoIndex) {
    r.value = s.best;
    r.argmin = s.best_pos;
  }
  return r;
}

}  // namespace

HopfLaxPoint hopflax_point(const GEvaluator& g, const YSet& Y, double h, std::span<const double> x,
                           HopfLaxMethod method, std::size_t warm) {
  if (!(h >= 0.0)) throw InvalidInput("Hopf-Lax time must be nonnegative");
  HopfLaxPoint r = point_impl(g, Y, h, x, method, warm);
  if (r.argmin != kNoIndex) r.argmin = Y.source_index()[r.argmin];
  return r;
}

std::vector<HopfLaxPoint> hopflax_points(const GEvaluator& g, const YSet& Y, double h,
                                         std::span<const double> xs, HopfLaxMethod method) {
  if (!(h >= 0.0)) throw InvalidInput("Hopf-Lax time must be nonnegative");
  const std::size_t n = Y.dim();
  if (n == 0 || xs.size() % n != 0) throw InvalidInput("Hopf-Lax: point array size mismatch");
  const std::size_t count = xs.size() / n;
  std::vector<HopfLaxPoint> out(count);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    std::size_t warm = kNoIndex;
    for (std::size_t i = b; i < e; ++i) {
      HopfLaxPoint r = point_impl(g, Y, h, xs.subspan(i * n, n), method, warm);
      warm = r.argmin;
      if (r.argmin != kNoIndex) r.argmin = Y.source_index()[r.argmin];
      out[i] = r;
    }
  });
  return out;
}

InfConvResult hopflax_apply(const ExtGridFn& g, const ExtGridFn& W, double h, HopfLaxMethod method) {
  if (!(h >= 0.0)) throw InvalidInput("Hopf-Lax time must be nonnegative");
  if (g.dim() != W.dim()) throw InvalidInput("Hopf-Lax: g and W dimensions differ");
  InfConvResult res;
  if (h == 0.0) {
    res.values = g;
    res.argmin.assign(g.size(), kNoIndex);
    res.all_infinite = g.finite_indices().empty();
    return res;
  }
  const auto ev = make_grid_evaluator(g);
  const YSet Y = YSet::from_grid(W);
  const GridSpec& grid = g.grid();
  std::vector<double> xs(grid.size() * grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid.point(i, std::span<double>(xs.data() + i * grid.dim(), grid.dim()));
  const auto pts = hopflax_points(*ev, Y, h, xs, method);
  std::vector<double> vals(grid.size());
  res.argmin.resize(grid.size());
  bool nonneg = g.sign() == Sign::nonnegative;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] = pts[i].value;
    res.argmin[i] = pts[i].argmin;
    if (vals[i] < 0.0) nonneg = false;
  }
  res.all_infinite = std::none_of(vals.begin(), vals.end(), [](double v) { return v < kInf; });
  res.values = ExtGridFn(grid, std::move(vals), nonneg ? Sign::nonnegative : Sign::any);
  return res;
}

namespace {

// Solves H d = b for small symmetric positive definite H; false if not SPD.
bool cholesky_solve(std::vector<double> H, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = H[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= H[j * n + k] * H[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    H[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = H[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= H[i * n + k] * H[j * n + k];
      H[i * n + j] = v / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= H[i * n + k] * b[k];
    b[i] = v / H[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= H[k * n + i] * b[k];
    b[i] = v / H[i * n + i];
  }
  return true;
}

}  // namespace

double hopflax_polish(const SmoothFn& g, const SmoothFn& W, double h, std::span<const double> x,
                      std::span<const double> y0, double start_value) {
  const std::size_t n = x.size();
  if (!(h > 0.0)) return start_value;
  std::vector<double> y(y0.begin(), y0.end()), z(n), gg(n), gw(n);
  auto F = [&](const std::vector<double>& yy) {
    for (std::size_t d = 0; d < n; ++d) z[d] = x[d] - h * yy[d];
    const double a = g.value(z);
    if (!(a < kInf)) return kInf;
    const double b = W.value(yy);
    if (!(b < kInf)) return kInf;
    return a + h * b;
  };
  auto grad = [&](const std::vector<double>& yy, std::vector<double>& out) {
    for (std::size_t d = 0; d < n; ++d) z[d] = x[d] - h * yy[d];
    g.grad(z, gg);
    W.grad(yy, gw);
    for (std::size_t d = 0; d < n; ++d) out[d] = h * (gw[d] - gg[d]);
  };
  double fy = F(y);
  if (!(fy < kInf)) return start_value;
  std::vector<double> gr(n), gp(n), H(n * n), dir(n), trial(n), yp(n);
  for (int it = 0; it < 40; ++it) {
    grad(y, gr);
    double gnorm = 0.0;
    for (double v : gr) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (!(gnorm > 0.0)) break;
    for (std::size_t j = 0; j < n; ++j) {
      const double st = 1e-6 * (1.0 + std::abs(y[j]));
      yp = y;
      yp[j] += st;
      grad(yp, gp);
      for (std::size_t i = 0; i < n; ++i) H[i * n + j] = (gp[i] - gr[i]) / st;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) H[i * n + j] = H[j * n + i] = 0.5 * (H[i * n + j] + H[j * n + i]);
    for (std::size_t i = 0; i < n; ++i) dir[i] = -gr[i];
    if (!cholesky_solve(H, dir, n))
      for (std::size_t i = 0; i < n; ++i) dir[i] = -gr[i] / gnorm;
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += gr[i] * dir[i];
    if (!(slope < 0.0)) break;
    double t = 1.0, ft = kInf;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] + t * dir[i];
      ft = F(trial);
      if (ft < kInf && ft <= fy + 1e-4 * t * slope) break;
      ft = kInf;
    }
    if (!(ft < kInf)) break;
    const double gain = fy - ft;
    y = trial;
    fy = ft;
    if (gain <= 1e-16 * (1.0 + std::abs(fy))) break;
  }
  return std::min(start_value, fy);
}

SemigroupReport semigroup_residual(const ExtGridFn& g, const ExtGridFn& W, double h, double s) {
  if (!(s >= 0.0) || !(s <= h)) throw InvalidInput("semigroup check needs 0 <= s <= h");
  const ExtGridFn direct = hopflax_apply(g, W, h).values;
  const ExtGridFn mid = hopflax_apply(g, W, s).values;
  const ExtGridFn split = hopflax_apply(mid, W, h - s).values;
  SemigroupReport rep;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const bool a = direct.is_finite(i), b = split.is_finite(i);
    if (a != b) {
      ++rep.domain_mismatches;
      continue;
    }
    if (!a) continue;
    ++rep.compared_nodes;
    const double r = std::abs(direct[i] - split[i]);
    if (r > rep.max_abs_residual || rep.witness.empty()) {
      rep.max_abs_residual = r;
      rep.witness = g.grid().point(i);
    }
  }
  return rep;
}

DifferenceQuotient hj_difference_quotient(const GEvaluator& g, double g_at_x, const YSet& Y,
                                          std::span<const double> x, std::span<const double> hs,
                                          double w_star_at_grad) {
  if (hs.empty()) throw InvalidInput("difference quotient needs at least one h");
  DifferenceQuotient dq;
  dq.reference = -w_star_at_grad;
  for (double h : hs) {
    if (!(h > 0.0)) throw InvalidInput("difference quotient needs h > 0");
    const HopfLaxPoint p = hopflax_point(g, Y, h, x);
    dq.h.push_back(h);
    dq.quotients.push_back((p.value - g_at_x) / h);
  }
  const Extrapolation ex = richardson(dq.h, dq.quotients);
  dq.extrapolated = ex.limit;
  dq.extrapolation_error = ex.last_correction;
  return dq;
}

}  // namespace epiconvex
