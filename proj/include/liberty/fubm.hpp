#pragma once

// The free unitary Brownian motion u_t: exact moments of its law nu_t, the
// transform kappa_t(z) = 1 + 2 sum_k tau(u_t^k) z^k defined implicitly by
//
//     (kappa - 1) / (kappa + 1) * exp(t kappa / 2) = z,
//
// and the density rho_t(e^{i theta}) = Re kappa_t(e^{i theta}) with respect
// to the uniform probability measure on the circle.

#include <liberty/common.hpp>
#include <liberty/exp_poly.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace liberty {

using Complex = std::complex<double>;

/// tau(u_t^n) = e^{-nt/2} sum_{j<n} (-t)^j / j! * C(n, j+1) * n^{j-1}, n >= 0.
/// Negative n give the same value since the law is conjugation invariant.
inline ExpPoly fubm_moment(long n) {
  if (n < 0) n = -n;
  if (n == 0) return ExpPoly(1);
  ExpPoly out;
  Rational factorial = 1;
  mpz_class n_pow = 1;  // n^j
  for (long j = 0; j < n; ++j) {
    if (j > 0) {
      factorial *= j;
      n_pow *= n;
    }
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(j + 1));
    Rational coeff = Rational(binom * n_pow) / factorial / n;  // n^{j-1} = n^j / n
    if (j % 2 == 1) coeff = -coeff;
    out += ExpPoly::monomial(coeff, static_cast<std::size_t>(j), Rational(-n, 2));
  }
  return out;
}

inline double fubm_moment_value(long n, Time t) { return fubm_moment(n).evaluate(t); }

/// beta(s) = 2 sqrt(s(1-s)) + arccos(1 - 2s) on [0, 1]; the support half-angle
/// of u_{4s}.
inline double beta(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("beta: argument must be non-negative");
  if (s >= 1.0) return std::numbers::pi;
  return 2.0 * std::sqrt(s * (1.0 - s)) + std::acos(1.0 - 2.0 * s);
}

/// The support of nu_t is {e^{i theta} : |theta| <= half_angle}.
struct SupportArc {
  double half_angle = 0.0;
  bool full_circle = false;
};

inline SupportArc support_angle(Time t) {
  if (t.is_infinite() || t.value() >= 4.0) return {std::numbers::pi, true};
  return {beta(t.value() / 4.0), false};
}

struct CircleSample {
  double theta = 0.0;
  double rho = 0.0;
  Complex kappa;
  double residual = 0.0;  // |(kappa-1)/(kappa+1) e^{t kappa/2} - z|
  bool converged = true;
  bool edge = false;  // within 1e-9 of a non-analytic point
};

struct CircleDensity {
  Time t;
  std::vector<CircleSample> samples;
  SupportArc support;

  std::string to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "theta,rho\n";
    for (const auto& s : samples) out << s.theta << "," << s.rho << "\n";
    return out.str();
  }

  friend void to_json(nlohmann::json& j, const CircleDensity& d) {
    j = nlohmann::json::object();
    j["t"] = d.t.to_string();
    j["support_half_angle"] = d.support.half_angle;
    j["full_circle"] = d.support.full_circle;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : d.samples) {
      rows.push_back({{"theta", s.theta}, {"rho", s.rho}, {"residual", s.residual},
                      {"converged", s.converged}, {"edge", s.edge}});
    }
    j["samples"] = rows;
  }
};

namespace detail {

inline Complex kappa_equation(Complex k, double t) { return (k - 1.0) / (k + 1.0) * std::exp(0.5 * t * k); }

inline Complex kappa_equation_derivative(Complex k, double t) {
  return std::exp(0.5 * t * k) * (2.0 / ((k + 1.0) * (k + 1.0)) + 0.5 * t * (k - 1.0) / (k + 1.0));
}

/// Newton on G(kappa) = z. Returns false if the residual does not reach tol.
inline bool newton_kappa(Complex& k, Complex z, double t, double tol, int max_iter = 60) {
  for (int i = 0; i < max_iter; ++i) {
    Complex r = kappa_equation(k, t) - z;
    if (std::abs(r) <= tol) return true;
    Complex d = kappa_equation_derivative(k, t);
    if (d == 0.0) return false;
    k -= r / d;
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) return false;
  }
  return std::abs(kappa_equation(k, t) - z) <= tol;
}

/// Polishes k in place; keeps the input if Newton makes things worse.
inline double polish_kappa(Complex& k, Complex z, double t) {
  Complex trial = k;
  double before = std::abs(kappa_equation(k, t) - z);
  for (int i = 0; i < 4; ++i) {
    Complex d = kappa_equation_derivative(trial, t);
    if (d == 0.0) break;
    trial -= (kappa_equation(trial, t) - z) / d;
  }
  double after = std::abs(kappa_equation(trial, t) - z);
  if (std::isfinite(after) && after < before && std::abs(trial - k) < 1e-6 * (1.0 + std::abs(k))) {
    k = trial;
    return after;
  }
  return before;
}

/// Bracketed root of f on [lo, hi]. When rounding makes both endpoint values
/// share a sign, the endpoint with the smaller |f| is returned.
template <class F>
double bisect_root(F f, double lo, double hi) {
  const double f_lo = f(lo), f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) return std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  boost::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

/// Real root > 1 of log(k-1) - log(k+1) + t k / 2 = 0: kappa_t(1).
inline double kappa_at_one(double t) {
  auto f = [t](double k) { return std::log(k - 1.0) - std::log(k + 1.0) + 0.5 * t * k; };
  double hi = 2.0;
  while (f(hi) < 0.0) hi *= 2.0;
  double lo = std::nextafter(1.0, 2.0);
  return bisect_root(f, lo, hi);
}

/// For t > 4, the root in (0, 1) of log(1-k) - log(1+k) + t k / 2 = 0:
/// kappa_t(-1), the density at theta = pi.
inline double kappa_at_minus_one(double t) {
  if (t <= 4.0) return 0.0;
  auto f = [t](double k) { return std::log1p(-k) - std::log1p(k) + 0.5 * t * k; };
  double lo = 1e-3;
  for (int i = 0; i < 200 && f(lo) <= 0.0; ++i) lo *= 0.5;
  double hi = 0.5;
  while (f(hi) > 0.0) hi = 0.5 * (1.0 + hi);
  return bisect_root(f, lo, hi);
}

/// On |z| = 1 with kappa = x + iy, |G(kappa)| = 1 forces
///     y^2 = 4x / (1 - e^{-tx}) - (x+1)^2 = 4x / (e^{tx} - 1) - (x-1)^2,
/// and the argument of z is atan2(2y, x^2+y^2-1) + t y / 2. The second
/// form of y^2 avoids cancellation when t is large and x is close to 1.
inline double boundary_y(double x, double t) {
  double b = x == 0.0 ? 4.0 / t : 4.0 * x / std::expm1(t * x);
  return std::sqrt(std::max(0.0, b - (x - 1.0) * (x - 1.0)));
}

inline double boundary_angle(double x, double t) {
  double y = boundary_y(x, t);
  return std::atan2(2.0 * y, x * x + y * y - 1.0) + 0.5 * t * y;
}

}  // namespace detail

/// kappa_t on the closed unit disk, on the branch with kappa_t(0) = 1.
/// Interior points use radial continuation from 0; boundary points are
/// solved through the boundary parametrization and polished by Newton.
inline Complex kappa(Complex z, Time t);

/// kappa_t(e^{i theta}) with its sample diagnostics, theta in [-pi, pi].
inline CircleSample kappa_on_circle(double theta, Time t) {
  CircleSample s;
  s.theta = theta;
  if (t.is_infinite()) {
    s.kappa = 1.0;
    s.rho = 1.0;
    return s;
  }
  const double tv = t.value();
  if (!(tv > 0.0)) throw std::invalid_argument("kappa_on_circle: t must be positive");
  const double pi = std::numbers::pi;
  const double a = std::abs(theta);
  if (a > pi + 1e-15) throw std::invalid_argument("kappa_on_circle: theta must lie in [-pi, pi]");
  const SupportArc support = support_angle(t);
  const Complex z = std::polar(1.0, a);
  Complex k;
  if (support.full_circle || a < support.half_angle) {
    const double x_hi = detail::kappa_at_one(tv);
    const double x_lo = detail::kappa_at_minus_one(tv);
    double x;
    if (a == 0.0) {
      x = x_hi;
    } else if (a >= pi) {
      x = x_lo;
    } else {
      x = detail::bisect_root([&](double v) { return detail::boundary_angle(v, tv) - a; }, x_lo, x_hi);
    }
    k = Complex(x, detail::boundary_y(x, tv));
  } else {
    // Outside the support kappa is purely imaginary: atan2(2y, y^2-1) + t y/2 = |theta|.
    const double y_edge = std::sqrt((4.0 - tv) / tv);
    double y = a >= pi ? 0.0
                       : detail::bisect_root(
                             [&](double v) { return std::atan2(2.0 * v, v * v - 1.0) + 0.5 * tv * v - a; }, 0.0,
                             y_edge);
    k = Complex(0.0, y);
  }
  s.residual = detail::polish_kappa(k, z, tv);
  // Newton can leave a rounding-size real part on a purely imaginary root;
  // outside the support the density is exactly 0.
  if (!support.full_circle && a >= support.half_angle) k = Complex(0.0, k.imag());
  if (theta < 0.0) k = std::conj(k);
  s.kappa = k;
  s.rho = std::max(0.0, k.real());
  s.converged = s.residual <= 1e-12;
  s.edge = !support.full_circle ? std::abs(a - support.half_angle) <= 1e-9
                                : (tv == 4.0 && std::abs(a - pi) <= 1e-9);
  return s;
}

inline Complex kappa(Complex z, Time t) {
  const double r = std::abs(z);
  if (r > 1.0 + 1e-12) throw std::invalid_argument("kappa: |z| must be at most 1");
  if (t.is_infinite()) return 1.0;
  const double tv = t.value();
  if (tv == 0.0) {
    if (z == 1.0) throw DivergenceError("kappa_0 has a pole at z = 1");
    return (1.0 + z) / (1.0 - z);
  }
  if (r >= 1.0 - 1e-12) return kappa_on_circle(std::arg(z), t).kappa;
  Complex k = 1.0;
  double s = 0.0;
  double step = 1.0 / 32.0;
  while (s < 1.0) {
    double next = std::min(1.0, s + step);
    Complex trial = k;
    if (detail::newton_kappa(trial, next * z, tv, 1e-14)) {
      k = trial;
      s = next;
      step = std::min(0.25, step * 1.5);
    } else {
      step *= 0.5;
      if (step < 1e-10) {
        throw NumericalError("kappa: continuation stalled at |z| = " + std::to_string(s * r) +
                             ", last iterate " + std::to_string(k.real()) + "+" + std::to_string(k.imag()) +
                             "i, residual " + std::to_string(std::abs(detail::kappa_equation(k, tv) - s * z)));
      }
    }
  }
  return k;
}

/// rho_t at one angle.
inline double density_at(double theta, Time t) { return kappa_on_circle(theta, t).rho; }

/// Midpoint grid theta_j = -pi + 2 pi (j + 1/2) / n, symmetric under theta -> -theta.
inline std::vector<double> circle_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    // Built from the mirrored index so that g[n-1-j] == -g[j] exactly.
    double offset = static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(j);
    g[j] = -std::numbers::pi * offset / static_cast<double>(n);
  }
  return g;
}

inline CircleDensity density(Time t, const std::vector<double>& grid) {
  if (!t.is_infinite() && !(t.value() > 0.0)) throw std::invalid_argument("density: t must be positive");
  CircleDensity d;
  d.t = t;
  d.support = support_angle(t);
  d.samples.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { d.samples[i] = kappa_on_circle(grid[i], t); });
  return d;
}

inline CircleDensity density(Time t, std::size_t grid_size = 2048) { return density(t, circle_grid(grid_size)); }

/// int rho_t(theta) f(theta) dtheta / 2pi by tanh-sinh quadrature on the
/// support, split at 0 so that both edges are endpoints.
inline double integrate_against_density(Time t, const std::function<double(double)>& f, double tol = 1e-12) {
  const SupportArc support = support_angle(t);
  boost::math::quadrature::tanh_sinh<double> q(15);
  auto g = [&](double theta) { return density_at(theta, t) * (f(theta) + f(-theta)); };
  double value = q.integrate(g, 0.0, support.half_angle, tol);
  return value / (2.0 * std::numbers::pi);
}

}  // namespace liberty
