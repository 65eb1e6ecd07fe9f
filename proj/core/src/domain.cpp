#include "epiconvex/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace epiconvex {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::halfspace: return "halfspace";
    case DomainKind::cone: return "cone";
    case DomainKind::paraboloid: return "paraboloid";
    case DomainKind::affine_max: return "affine_max";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "halfspace") return DomainKind::halfspace;
  if (s == "cone") return DomainKind::cone;
  if (s == "paraboloid") return DomainKind::paraboloid;
  if (s == "affine_max") return DomainKind::affine_max;
  throw InvalidInput("unknown domain kind '" + s + "'");
}

EpigraphDomain EpigraphDomain::halfspace(std::size_t n) {
  EpigraphDomain d(DomainKind::halfspace, n);
  d.validate();
  return d;
}

EpigraphDomain EpigraphDomain::cone(std::size_t n, double slope) {
  if (!(slope >= 0.0)) throw InvalidInput("cone: slope must be >= 0");
  EpigraphDomain d(DomainKind::cone, n);
  d.coef_ = slope;
  d.validate();
  return d;
}

EpigraphDomain EpigraphDomain::paraboloid(std::size_t n, double coef) {
  if (!(coef > 0.0)) throw InvalidInput("paraboloid: coefficient must be > 0");
  EpigraphDomain d(DomainKind::paraboloid, n);
  d.coef_ = coef;
  d.validate();
  return d;
}

EpigraphDomain EpigraphDomain::affine_max(std::size_t n, std::vector<AffinePiece> pieces) {
  if (pieces.empty()) throw InvalidInput("affine_max: no pieces");
  double dmax = -kInf;
  for (const auto& p : pieces) {
    if (p.c.size() != n - 1) throw InvalidInput("affine_max: slope dimension must be n-1");
    dmax = std::max(dmax, p.d);
  }
  if (dmax != 0.0) throw InvalidInput("affine_max: largest offset must be 0 (phi(0) = 0)");
  EpigraphDomain d(DomainKind::affine_max, n);
  d.pieces_ = std::move(pieces);
  d.validate();
  return d;
}

EpigraphDomain EpigraphDomain::from_spec(const std::string& kind, std::size_t n,
                                         const std::vector<double>& params) {
  if (n < 2) throw InvalidInput("domain: dimension must be >= 2");
  switch (domain_kind_from_string(kind)) {
    case DomainKind::halfspace: return halfspace(n);
    case DomainKind::cone: return cone(n, params.empty() ? 1.0 : params[0]);
    case DomainKind::paraboloid: return paraboloid(n, params.empty() ? 1.0 : params[0]);
    case DomainKind::affine_max: {
      if (params.empty() || params.size() % n != 0)
        throw InvalidInput("affine_max: params must be groups of n-1 slopes plus one offset");
      std::vector<AffinePiece> pieces;
      for (std::size_t i = 0; i < params.size(); i += n) {
        AffinePiece p;
        p.c.assign(params.begin() + static_cast<long>(i), params.begin() + static_cast<long>(i + n - 1));
        p.d = params[i + n - 1];
        pieces.push_back(std::move(p));
      }
      return affine_max(n, std::move(pieces));
    }
  }
  throw InvalidInput("domain: unreachable");
}

std::string EpigraphDomain::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(n=" << n_;
  for (double p : params()) os << ", " << p;
  os << ")";
  return os.str();
}

std::vector<double> EpigraphDomain::params() const {
  switch (kind_) {
    case DomainKind::halfspace: return {};
    case DomainKind::cone:
    case DomainKind::paraboloid: return {coef_};
    case DomainKind::affine_max: {
      std::vector<double> out;
      for (const auto& p : pieces_) {
        out.insert(out.end(), p.c.begin(), p.c.end());
        out.push_back(p.d);
      }
      return out;
    }
  }
  return {};
}

std::vector<double> EpigraphDomain::e() const {
  std::vector<double> v(n_, 0.0);
  v.back() = 1.0;
  return v;
}

void EpigraphDomain::check_dim_x(std::span<const double> x) const {
  if (x.size() != n_) throw InvalidInput("domain: point dimension mismatch");
}

void EpigraphDomain::check_dim_x1(std::span<const double> x1) const {
  if (x1.size() + 1 != n_) throw InvalidInput("domain: x1 dimension mismatch");
}

double EpigraphDomain::phi(std::span<const double> x1) const {
  check_dim_x1(x1);
  switch (kind_) {
    case DomainKind::halfspace: return 0.0;
    case DomainKind::cone: return coef_ * norm2(x1);
    case DomainKind::paraboloid: {
      const double r = norm2(x1);
      return coef_ * r * r;
    }
    case DomainKind::affine_max: {
      double m = -kInf;
      for (const auto& p : pieces_) m = std::max(m, dot(p.c, x1) + p.d);
      return m;
    }
  }
  return 0.0;
}

PhiGradient EpigraphDomain::grad_phi(std::span<const double> x1) const {
  check_dim_x1(x1);
  PhiGradient out;
  out.grad.assign(n_ - 1, 0.0);
  switch (kind_) {
    case DomainKind::halfspace: break;
    case DomainKind::cone: {
      const double r = norm2(x1);
      if (r == 0.0) {
        out.flagged = true;
        break;
      }
      for (std::size_t i = 0; i < x1.size(); ++i) out.grad[i] = coef_ * x1[i] / r;
      break;
    }
    case DomainKind::paraboloid:
      for (std::size_t i = 0; i < x1.size(); ++i) out.grad[i] = 2.0 * coef_ * x1[i];
      break;
    case DomainKind::affine_max: {
      double best = -kInf;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const double v = dot(pieces_[k].c, x1) + pieces_[k].d;
        if (v > best) {
          best = v;
          arg = k;
        }
      }
      const double tie_tol = 1e-12 * (1.0 + std::abs(best));
      for (std::size_t k = 0; k < pieces_.size(); ++k) {
        if (k == arg) continue;
        const double v = dot(pieces_[k].c, x1) + pieces_[k].d;
        if (best - v <= tie_tol && pieces_[k].c != pieces_[arg].c) out.flagged = true;
      }
      out.grad = pieces_[arg].c;
      break;
    }
  }
  return out;
}

double EpigraphDomain::perspective(std::span<const double> x1, double t) const {
  check_dim_x1(x1);
  if (!(t > 0.0)) throw InvalidInput("perspective: t must be > 0");
  switch (kind_) {
    case DomainKind::halfspace: return 0.0;
    case DomainKind::cone: return coef_ * norm2(x1);
    case DomainKind::paraboloid: {
      const double r = norm2(x1);
      return coef_ * r * r / t;
    }
    case DomainKind::affine_max: {
      double m = -kInf;
      for (const auto& p : pieces_) m = std::max(m, dot(p.c, x1) + t * p.d);
      return m;
    }
  }
  return 0.0;
}

double EpigraphDomain::bh_boundary(std::span<const double> x1, double h) const {
  return h + perspective(x1, 1.0 + h);
}

bool EpigraphDomain::contains(std::span<const double> x, double h) const {
  check_dim_x(x);
  return x[n_ - 1] >= phi(x.first(n_ - 1)) + h;
}

bool EpigraphDomain::bh_membership(std::span<const double> x, double h) const {
  check_dim_x(x);
  if (h < 0.0) throw InvalidInput("bh_membership: h must be >= 0");
  if (h == 0.0) return contains(x, 0.0);
  return x[n_ - 1] >= bh_boundary(x.first(n_ - 1), h);
}

bool EpigraphDomain::homogeneous() const {
  switch (kind_) {
    case DomainKind::halfspace:
    case DomainKind::cone: return true;
    case DomainKind::paraboloid: return false;
    case DomainKind::affine_max:
      return std::all_of(pieces_.begin(), pieces_.end(), [](const AffinePiece& p) { return p.d == 0.0; });
  }
  return false;
}

ConeTestResult EpigraphDomain::is_cone(std::size_t sample_count, double tol, std::uint64_t seed) const {
  if (sample_count == 0) throw InvalidInput("is_cone: sample_count must be >= 1");
  ConeTestResult out;
  const std::size_t m = n_ - 1;
  std::vector<double> x(m), y(m), z(m);

  auto record = [&](double viol, const char* kind, std::vector<double> wit) {
    if (viol > out.worst_violation) {
      out.worst_violation = viol;
      if (viol > tol) {
        out.is_cone = false;
        out.witness_kind = kind;
        out.witness = std::move(wit);
      }
    }
  };
  auto homogeneity = [&](double t, std::span<const double> x1) {
    for (std::size_t i = 0; i < m; ++i) z[i] = t * x1[i];
    const double lhs = phi(z), rhs = t * phi(x1);
    const double viol = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
    std::vector<double> wit{t};
    wit.insert(wit.end(), x1.begin(), x1.end());
    record(viol, "homogeneity", std::move(wit));
  };

  // Deterministic probes along the first axis, then random triples.
  for (double sgn : {1.0, -1.0}) {
    std::fill(x.begin(), x.end(), 0.0);
    x[0] = sgn;
    homogeneity(2.0, x);
    homogeneity(0.5, x);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0), H(0.05, 2.0), T(0.1, 4.0);
  for (std::size_t s = 0; s < sample_count; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = U(rng);
      y[i] = U(rng);
    }
    const double h = H(rng);
    for (std::size_t i = 0; i < m; ++i) z[i] = (x[i] - y[i]) / h;
    const double lhs = phi(z);
    const double rhs = (phi(x) - phi(y)) / h;
    const double viol = (rhs - lhs) / (1.0 + std::abs(rhs));
    std::vector<double> wit(x);
    wit.insert(wit.end(), y.begin(), y.end());
    wit.push_back(h);
    record(viol, "support", std::move(wit));
    homogeneity(T(rng), x);
  }
  return out;
}

WeightSample EpigraphDomain::weight_P(std::span<const double> x1) const {
  check_dim_x1(x1);
  auto g = grad_phi(x1);
  WeightSample w;
  w.flagged = g.flagged;
  w.value = 1.0 + phi(x1) - dot(x1, g.grad);
  return w;
}

std::vector<double> EpigraphDomain::kinks() const {
  if (n_ != 2) return {};
  std::vector<double> k;
  switch (kind_) {
    case DomainKind::halfspace:
    case DomainKind::paraboloid: break;
    case DomainKind::cone:
      if (coef_ > 0.0) k.push_back(0.0);
      break;
    case DomainKind::affine_max: {
      // Breakpoints where two pieces cross and both are active.
      for (std::size_t i = 0; i < pieces_.size(); ++i)
        for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
          const double dc = pieces_[i].c[0] - pieces_[j].c[0];
          if (dc == 0.0) continue;
          const double x = (pieces_[j].d - pieces_[i].d) / dc;
          const double v = pieces_[i].c[0] * x + pieces_[i].d;
          const double xs[1] = {x};
          if (std::abs(phi(xs) - v) <= 1e-12 * (1.0 + std::abs(v))) k.push_back(x);
        }
      std::sort(k.begin(), k.end());
      k.erase(std::unique(k.begin(), k.end()), k.end());
      break;
    }
  }
  return k;
}

GrowthScan EpigraphDomain::growth_scan(double declared_C, double R, double r_max,
                                       std::size_t radial_samples, std::size_t directions) const {
  GrowthScan out;
  out.declared_C = declared_C;
  const std::size_t m = n_ - 1;
  std::vector<std::vector<double>> dirs;
  if (m == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    // Deterministic directions: a golden-angle spiral on the unit sphere of R^m
    // for m = 2 this reduces to evenly spaced angles.
    for (std::size_t k = 0; k < directions; ++k) {
      std::vector<double> u(m, 0.0);
      const double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(directions);
      u[0] = std::cos(ang);
      u[1] = std::sin(ang);
      dirs.push_back(u);
    }
  }
  const double r0 = R * (1.0 + 1e-6) + 1e-12;
  std::vector<double> x1(m), full(n_);
  for (std::size_t j = 0; j < radial_samples; ++j) {
    const double frac = radial_samples > 1 ? static_cast<double>(j) / static_cast<double>(radial_samples - 1) : 0.0;
    const double r = r0 * std::pow(r_max / r0, frac);
    for (const auto& u : dirs) {
      for (std::size_t i = 0; i < m; ++i) x1[i] = r * u[i];
      const auto g = grad_phi(x1);
      const double num = std::abs(dot(x1, g.grad));
      std::copy(x1.begin(), x1.end(), full.begin());
      full[m] = phi(x1);
      const double ratio = num / norm2(full);
      if (ratio > out.fitted_C) {
        out.fitted_C = ratio;
        out.witness = x1;
      }
    }
  }
  out.passes = out.fitted_C <= declared_C;
  return out;
}

ExtGridFn EpigraphDomain::sample_grid(const GridSpec& grid,
                                      const std::function<double(std::span<const double>)>& fn,
                                      double h) const {
  if (grid.dim() != n_) throw InvalidInput("sample_grid: grid dimension mismatch");
  std::vector<double> vals(grid.size(), kInf);
  std::vector<double> x(n_);
  bool any = false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    grid.point(i, x);
    if (contains(x, h)) {
      vals[i] = fn(x);
      any = true;
    }
  }
  if (!any) throw InvalidInput("sample_grid: box does not meet Omega_h");
  return ExtGridFn(grid, std::move(vals), Sign::nonnegative);
}

NodeSet EpigraphDomain::omega_h_nodes(const GridSpec& grid, double h) const {
  NodeSet s{grid, std::vector<std::uint8_t>(grid.size(), 0)};
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    s.mask[i] = contains(x, h) ? 1 : 0;
  }
  return s;
}

NodeSet EpigraphDomain::bh_nodes(const GridSpec& grid, double h) const {
  NodeSet s{grid, std::vector<std::uint8_t>(grid.size(), 0)};
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    s.mask[i] = bh_membership(x, h) ? 1 : 0;
  }
  return s;
}

void EpigraphDomain::validate() const {
  if (n_ < 2) throw InvalidInput("domain: dimension must be >= 2");
  const std::size_t m = n_ - 1;
  std::vector<double> zero(m, 0.0);
  if (std::abs(phi(zero)) > 1e-12) throw InvalidInput("domain: phi(0) != 0");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  std::vector<double> a(m), b(m), c(m);
  for (int s = 0; s < 64; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
      c[i] = 0.5 * (a[i] + b[i]);
    }
    if (phi(c) > 0.5 * (phi(a) + phi(b)) + 1e-9)
      throw InvalidInput("domain: phi fails sampled midpoint convexity");
  }
}

std::vector<double> fd_grad_phi(const EpigraphDomain& dom, std::span<const double> x1) {
  const std::size_t m = x1.size();
  double nrm = 0.0;
  for (double v : x1) nrm += v * v;
  const double step = 1e-6 * (1.0 + std::sqrt(nrm));
  std::vector<double> g(m), xp(x1.begin(), x1.end()), xm(x1.begin(), x1.end());
  for (std::size_t i = 0; i < m; ++i) {
    xp[i] = x1[i] + step;
    xm[i] = x1[i] - step;
    g[i] = (dom.phi(xp) - dom.phi(xm)) / (2.0 * step);
    xp[i] = xm[i] = x1[i];
  }
  return g;
}

double boundary_weight(const EpigraphDomain& dom, std::span<const double> x1) {
  const WeightSample w = dom.weight_P(x1);
  if (!w.flagged) return w.value;
  const double d = 1e-9 * (1.0 + std::sqrt(std::inner_product(x1.begin(), x1.end(), x1.begin(), 0.0)));
  std::vector<double> y(x1.begin(), x1.end());
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x1[i] + d;
    s += dom.weight_P(y).value;
    y[i] = x1[i] - d;
    s += dom.weight_P(y).value;
    y[i] = x1[i];
  }
  return s / static_cast<double>(2 * y.size());
}

}  // namespace epiconvex
