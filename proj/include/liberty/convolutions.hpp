#pragma once

// Additive and multiplicative t-free convolutions. General compactly
// supported laws are handled at the level of moments through the moment
// engine. The symmetric Bernoulli law (delta_{-1} + delta_1)/2 convolved with
// itself has closed-form densities expressed through rho_{4t}.

#include <liberty/fubm.hpp>
#include <liberty/moment_engine.hpp>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <json.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liberty {

/// Thrown when a request exceeds a documented size limit.
class LimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct RealSample {
  double x = 0.0;
  double eta = 0.0;
};

struct RealDensity {
  Time t;
  std::vector<Interval> support;
  std::vector<RealSample> samples;

  std::string to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "x,eta\n";
    for (const auto& s : samples) out << s.x << "," << s.eta << "\n";
    return out.str();
  }

  friend void to_json(nlohmann::json& j, const RealDensity& d) {
    j = nlohmann::json::object();
    j["t"] = d.t.to_string();
    nlohmann::json support = nlohmann::json::array();
    for (const auto& iv : d.support) support.push_back({iv.lo, iv.hi});
    j["support"] = support;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : d.samples) rows.push_back({{"x", s.x}, {"eta", s.eta}});
    j["samples"] = rows;
  }
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

// ---------------------------------------------------------------------------
// Multiplicative Bernoulli case: sigma_t(e^{i theta}) = rho_{4t}(e^{2 i theta}).

/// Support half-angle of sigma_t around both 1 and -1; full circle for t >= 1.
inline SupportArc bernoulli_mult_support(Time t) {
  if (t.is_infinite() || t.value() >= 1.0) return {std::numbers::pi, true};
  return {beta(t.value()) / 2.0, false};
}

inline double bernoulli_mult_density_at(double theta, Time t) {
  Time four_t = t.is_infinite() ? Time::infinity() : Time(4.0 * t.value());
  return density_at(wrap_angle(2.0 * theta), four_t);
}

/// The returned `support` arc is centred at 1; the same arc around -1 is
/// also part of the support.
inline CircleDensity bernoulli_mult_density(Time t, const std::vector<double>& grid) {
  if (!t.is_infinite() && !(t.value() > 0.0)) throw std::invalid_argument("bernoulli_mult_density: t must be positive");
  CircleDensity d;
  d.t = t;
  d.support = bernoulli_mult_support(t);
  d.samples.resize(grid.size());
  Time four_t = t.is_infinite() ? Time::infinity() : Time(4.0 * t.value());
  parallel_for(grid.size(), [&](std::size_t i) {
    CircleSample s = kappa_on_circle(wrap_angle(2.0 * grid[i]), four_t);
    s.theta = grid[i];
    d.samples[i] = s;
  });
  return d;
}

inline CircleDensity bernoulli_mult_density(Time t, std::size_t grid_size = 2048) {
  return bernoulli_mult_density(t, circle_grid(grid_size));
}

// ---------------------------------------------------------------------------
// Additive Bernoulli case:
//     eta_t(x) = rho_{4t}(e^{4 i arccos(x/2)}) / (pi sqrt(4 - x^2)) on [-2, 2].

/// [-2,-2cos(b/4)] u [-2sin(b/4), 2sin(b/4)] u [2cos(b/4), 2] with b = beta(t),
/// or [-2, 2] when t >= 1.
inline std::vector<Interval> bernoulli_add_support(Time t) {
  if (t.is_infinite() || t.value() >= 1.0) return {{-2.0, 2.0}};
  const double q = beta(t.value()) / 4.0;
  const double c = 2.0 * std::cos(q), s = 2.0 * std::sin(q);
  return {{-2.0, -c}, {-s, s}, {c, 2.0}};
}

inline double bernoulli_add_density_at(double x, Time t) {
  if (!(std::abs(x) < 2.0)) return 0.0;
  Time four_t = t.is_infinite() ? Time::infinity() : Time(4.0 * t.value());
  // eta is even; evaluating at |x| keeps the samples exactly symmetric.
  const double phi = std::acos(std::abs(x) / 2.0);
  return density_at(wrap_angle(4.0 * phi), four_t) / (std::numbers::pi * std::sqrt(4.0 - x * x));
}

/// Midpoints of n equal cells of [-2, 2], exactly symmetric.
inline std::vector<double> interval_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = -2.0 * (static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(j)) / static_cast<double>(n);
  }
  return g;
}

inline RealDensity bernoulli_add_density(Time t, const std::vector<double>& grid) {
  if (!t.is_infinite() && !(t.value() > 0.0)) throw std::invalid_argument("bernoulli_add_density: t must be positive");
  RealDensity d;
  d.t = t;
  d.support = bernoulli_add_support(t);
  d.samples.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { d.samples[i] = {grid[i], bernoulli_add_density_at(grid[i], t)}; });
  return d;
}

inline RealDensity bernoulli_add_density(Time t, std::size_t grid_size = 2048) {
  return bernoulli_add_density(t, interval_grid(grid_size));
}

/// int f(x) eta_t(x) dx. With x = 2 cos(phi) this is
/// (1/pi) int_0^pi rho_{4t}(e^{4 i phi}) f(2 cos phi) dphi, integrated piecewise
/// between the support edges.
inline double integrate_against_add_density(Time t, const std::function<double(double)>& f, double tol = 1e-12) {
  const double pi = std::numbers::pi;
  Time four_t = t.is_infinite() ? Time::infinity() : Time(4.0 * t.value());
  auto g = [&](double phi) { return density_at(wrap_angle(4.0 * phi), four_t) * f(2.0 * std::cos(phi)); };
  std::vector<std::pair<double, double>> pieces;
  if (t.is_infinite() || t.value() >= 1.0) {
    pieces = {{0.0, pi / 4}, {pi / 4, pi / 2}, {pi / 2, 3 * pi / 4}, {3 * pi / 4, pi}};
  } else {
    const double q = beta(t.value()) / 4.0;
    pieces = {{0.0, q}, {pi / 2 - q, pi / 2}, {pi / 2, pi / 2 + q}, {pi - q, pi}};
  }
  boost::math::quadrature::tanh_sinh<double> quad(15);
  double total = 0.0;
  for (auto [a, b] : pieces) total += quad.integrate(g, a, b, tol);
  return total / pi;
}

// ---------------------------------------------------------------------------
// General moment-level convolutions.

enum class ConvolutionKind { additive, multiplicative };

inline ConvolutionKind parse_convolution_kind(const std::string& s) {
  if (s == "additive" || s == "add") return ConvolutionKind::additive;
  if (s == "multiplicative" || s == "mult") return ConvolutionKind::multiplicative;
  throw std::invalid_argument("unknown convolution kind '" + s + "'");
}

/// moments[k-1] is the k-th moment, k = 1..k_max, as an exact function of t.
struct MomentSequence {
  std::vector<ExpPoly> moments;

  std::size_t size() const { return moments.size(); }
  const ExpPoly& operator[](std::size_t k) const { return moments.at(k - 1); }

  std::vector<double> evaluate(Time t) const {
    std::vector<double> out;
    out.reserve(moments.size());
    for (const auto& m : moments) out.push_back(m.evaluate(t));
    return out;
  }

  /// Whether the Hankel matrix (m_{i+j}), 0 <= i, j <= k_max/2, is positive
  /// semidefinite at time t up to `tol` relative to its largest eigenvalue.
  bool hankel_positive(Time t, double tol = 1e-10) const {
    std::vector<double> m{1.0};
    for (double v : evaluate(t)) m.push_back(v);
    const std::size_t d = moments.size() / 2 + 1;
    Eigen::MatrixXd h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) h(i, j) = m[i + j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev.minCoeff() >= -tol * std::max(1.0, ev.maxCoeff());
  }

  friend void to_json(nlohmann::json& j, const MomentSequence& s) {
    j = nlohmann::json::array();
    for (std::size_t k = 0; k < s.moments.size(); ++k) {
      j.push_back({{"k", k + 1}, {"moment", s.moments[k]}, {"text", s.moments[k].to_string()}});
    }
  }
};

inline constexpr int kMaxConvolutionOrder = 8;

namespace detail {

inline Letter power_letter(Family f, int power) { return Letter(f, std::vector<int>(static_cast<std::size_t>(power), 1)); }

/// Words x_1 u x_2 u* ... obtained by expanding (a + u b u*)^k, with their
/// multiplicities. Pure powers of a or b are kept as single-letter words.
inline std::map<Word, long> additive_expansion(int k) {
  std::map<Word, long> words;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<Letter> letters;
    for (int i = 0; i < k; ++i) letters.push_back(power_letter((mask >> i) & 1u ? Family::B : Family::A, 1));
    ++words[Word::from_letters(std::move(letters))];
  }
  return words;
}

}  // namespace detail

/// Moments 1..k_max of mu *_t nu (additive: a + u_t b u_t*) or mu (.)_t nu
/// (multiplicative: a u_t b u_t*), from the moments m_1..m_{k_max} of mu and
/// nu. The multiplicative moments tau((a u b u*)^k) also serve the
/// positive-element version sqrt(b) a sqrt(b), by traciality.
inline MomentSequence tfree_convolve_moments(const std::vector<Rational>& mu, const std::vector<Rational>& nu,
                                             ConvolutionKind kind, int k_max,
                                             MomentEngine& engine = default_engine()) {
  if (k_max < 1) throw std::invalid_argument("tfree_convolve_moments: k_max must be positive");
  if (k_max > kMaxConvolutionOrder) {
    throw LimitError("tfree_convolve_moments: k_max = " + std::to_string(k_max) + " exceeds the limit of " +
                     std::to_string(kMaxConvolutionOrder));
  }
  if (mu.size() < static_cast<std::size_t>(k_max) || nu.size() < static_cast<std::size_t>(k_max)) {
    throw std::invalid_argument("tfree_convolve_moments: need " + std::to_string(k_max) + " moments of each law");
  }
  auto moment_of = [&](const MomentSymbol& s) -> Rational {
    const auto& law = s.family() == Family::A ? mu : nu;
    const std::size_t p = s.generators().size();
    return p == 0 ? Rational(1) : law.at(p - 1);
  };
  MomentSequence out;
  for (int k = 1; k <= k_max; ++k) {
    ExpPoly value;
    if (kind == ConvolutionKind::additive) {
      for (const auto& [word, count] : detail::additive_expansion(k)) {
        value += ExpPoly(count) * engine.mixed_moment(word).substitute(moment_of);
      }
    } else {
      std::vector<Letter> letters;
      for (int i = 0; i < k; ++i) {
        letters.push_back(detail::power_letter(Family::A, 1));
        letters.push_back(detail::power_letter(Family::B, 1));
      }
      value = engine.mixed_moment(Word::alternating(letters)).substitute(moment_of);
    }
    out.moments.push_back(std::move(value));
  }
  return out;
}

/// Moments m_1..m_k of the symmetric Bernoulli law on {-1, 1}.
inline std::vector<Rational> bernoulli_moments(int k_max) {
  std::vector<Rational> m;
  for (int k = 1; k <= k_max; ++k) m.emplace_back(k % 2 == 0 ? 1 : 0);
  return m;
}

}  // namespace liberty
