#include "epiconvex/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epiconvex {

BBLParams BBLParams::make(std::size_t n, double a, double p, double h) {
  BBLParams b;
  b.n = n;
  b.a = a;
  b.p = p;
  b.q = p / (p - 1.0);
  b.h = h;
  b.t = h / (1.0 + h);
  b.validate();
  return b;
}

BBLParams BBLParams::from_t(std::size_t n, double a, double p, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw HypothesisViolation("requires 0 <= t < 1");
  return make(n, a, p, t / (1.0 - t));
}

void BBLParams::validate() const {
  if (n < 2) throw HypothesisViolation("requires n >= 2");
  const double nd = static_cast<double>(n);
  if (!(p > 1.0 && p < nd)) {
    std::ostringstream os;
    os << "requires n > p > 1 (got n=" << n << ", p=" << p << ")";
    throw HypothesisViolation(os.str());
  }
  if (!(a >= nd)) {
    std::ostringstream os;
    os << "requires a >= n (got a=" << a << ", n=" << n << ")";
    throw HypothesisViolation(os.str());
  }
  if (!(std::abs(q - p / (p - 1.0)) <= 1e-12 * q)) throw HypothesisViolation("requires 1/p + 1/q = 1");
  if (!(h >= 0.0)) throw HypothesisViolation("requires h >= 0");
  if (!(t >= 0.0 && t < 1.0)) throw HypothesisViolation("requires 0 <= t < 1");
  if (std::abs(h - t / (1.0 - t)) > 1e-12 * (1.0 + h)) throw HypothesisViolation("requires h = t/(1-t)");
}

std::vector<double> SmoothFn::gradient(std::span<const double> x) const {
  std::vector<double> g(x.size());
  grad(x, g);
  return g;
}

SmoothFn SmoothFn::scaled(double c) const {
  SmoothFn out;
  auto v = value;
  auto gr = grad;
  out.value = [v, c](std::span<const double> x) { return c * v(x); };
  out.grad = [gr, c](std::span<const double> x, std::span<double> g) {
    gr(x, g);
    for (auto& d : g) d *= c;
  };
  out.decay = decay;
  out.decay.K_value *= c;
  out.decay.K_grad *= c;
  return out;
}

SmoothFn SmoothFn::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidInput("dilation factor must be positive");
  SmoothFn out;
  auto v = value;
  auto gr = grad;
  out.value = [v, lambda](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (auto& d : y) d *= lambda;
    return v(y);
  };
  out.grad = [gr, lambda](std::span<const double> x, std::span<double> g) {
    std::vector<double> y(x.begin(), x.end());
    for (auto& d : y) d *= lambda;
    gr(y, g);
    for (auto& d : g) d *= lambda;
  };
  out.decay = decay;
  const double s = std::pow(lambda, -decay.kappa);
  out.decay.K_value *= s;
  out.decay.K_grad *= s;
  out.decay.support_radius /= lambda;
  return out;
}

ShearBox QuadSpec::box(std::size_t n) const {
  validate();
  return ShearBox::symmetric(n, R, S > 0.0 ? S : R, dx);
}

void QuadSpec::validate() const {
  if (!(dx > 0.0) || !(R > 0.0) || S < 0.0) throw InvalidInput("quadrature spec needs dx, R > 0 and S >= 0");
  auto even_multiple = [&](double len) {
    const double k = len / dx;
    const double r = std::round(k);
    return std::abs(k - r) < 1e-9 * (1.0 + k) && static_cast<long long>(r) % 4 == 0 && r >= 4;
  };
  if (!even_multiple(2.0 * R) || !even_multiple(S > 0.0 ? S : R))
    throw InvalidInput("quadrature spec needs 2R/dx and S/dx to be multiples of 4");
}

double norm_lower_constant(const NormSpec& N, std::size_t n) {
  const double nd = static_cast<double>(n);
  double c = 1.0;
  if (N.kind != NormKind::euclidean) {
    if (std::isinf(N.p))
      c = 1.0 / std::sqrt(nd);
    else if (N.p > 2.0)
      c = std::pow(nd, 1.0 / N.p - 0.5);
  }
  if (N.kind == NormKind::weighted_p_norm) {
    const double wmin = *std::min_element(N.weights.begin(), N.weights.end());
    c *= std::isinf(N.p) ? wmin : std::pow(wmin, 1.0 / N.p);
  }
  return c;
}

}  // namespace epiconvex
