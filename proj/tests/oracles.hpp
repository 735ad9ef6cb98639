#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

/// Letter of a cyclic word: family 0 or 1 and a sorted generator multiset.
struct OLetter {
  int family = 0;
  std::vector<int> gens;
  bool operator<(const OLetter& o) const { return std::tie(family, gens) < std::tie(o.family, o.gens); }
  bool operator==(const OLetter& o) const { return family == o.family && gens == o.gens; }
};
using OWord = std::vector<OLetter>;

inline OLetter join(const OLetter& x, const OLetter& y) {
  OLetter out{x.family, x.gens};
  out.gens.insert(out.gens.end(), y.gens.begin(), y.gens.end());
  std::sort(out.gens.begin(), out.gens.end());
  return out;
}

/// Fourth-order Runge-Kutta integration of the moment system
///   d/dt f(w) = - sum_{k<l, k=l mod 2} f(w_1..w_k, w_{l+1}..) f(w_{k+1}..w_l)
///             + e^t sum_{k<l, k!=l mod 2} f(.., w_k w_{l+1}, ..) f(w_l w_{k+1}, ..)
/// over the closure of sub-words of the input. Words are not reduced modulo
/// rotation, so the closure is larger than the exact engine's memo.
class MomentOde {
 public:
  /// phi(family, generator multiset) for one family; the families are independent.
  using Moment = std::function<double(int, const std::vector<int>&)>;

  explicit MomentOde(Moment phi) : phi_(std::move(phi)) {}

  /// tau(w_1 u w_2 u* ...) at time t (w alternates, length even >= 2).
  double moment(const OWord& w, double t, int steps) {
    index_.clear();
    words_.clear();
    rules_.clear();
    std::size_t root = visit(w);
    std::vector<double> y(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) y[i] = initial(words_[i]);
    const double h = t / steps;
    double s = 0.0;
    std::vector<double> k1, k2, k3, k4, tmp(y.size());
    for (int step = 0; step < steps; ++step) {
      k1 = rhs(y, s);
      for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      k2 = rhs(tmp, s + 0.5 * h);
      for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      k3 = rhs(tmp, s + 0.5 * h);
      for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
      k4 = rhs(tmp, s + h);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      s += h;
    }
    return std::exp(-static_cast<double>(w.size() / 2) * t) * y[root];
  }

  std::size_t system_size() const { return words_.size(); }

 private:
  struct Rule {
    std::size_t x, y;
    bool crossed;  // carries the e^t factor and a plus sign
  };

  double initial(const OWord& w) const {
    std::vector<int> g[2];
    for (const auto& l : w) g[l.family].insert(g[l.family].end(), l.gens.begin(), l.gens.end());
    for (auto& v : g) std::sort(v.begin(), v.end());
    if (w.size() == 1) return phi_(w[0].family, w[0].gens);
    return (g[0].empty() ? 1.0 : phi_(0, g[0])) * (g[1].empty() ? 1.0 : phi_(1, g[1]));
  }

  std::size_t visit(const OWord& w) {
    auto it = index_.find(w);
    if (it != index_.end()) return it->second;
    std::size_t id = words_.size();
    index_.emplace(w, id);
    words_.push_back(w);
    rules_.emplace_back();
    if (w.size() == 1) return id;
    const std::size_t N = w.size();
    std::vector<Rule> rules;
    for (std::size_t k = 1; k <= N; ++k) {
      for (std::size_t l = k + 1; l <= N; ++l) {
        auto at = [&](std::size_t i) -> const OLetter& { return w[i - 1]; };
        OWord outer, inner;
        bool crossed = (l - k) % 2 == 1;
        if (!crossed) {
          for (std::size_t i = 1; i <= k; ++i) outer.push_back(at(i));
          for (std::size_t i = l + 1; i <= N; ++i) outer.push_back(at(i));
          for (std::size_t i = k + 1; i <= l; ++i) inner.push_back(at(i));
        } else {
          if (l == k + 1) {
            inner.push_back(at(k + 1));
          } else {
            inner.push_back(join(at(l), at(k + 1)));
            for (std::size_t i = k + 2; i <= l - 1; ++i) inner.push_back(at(i));
          }
          if (l < N) {
            for (std::size_t i = 1; i + 1 <= k; ++i) outer.push_back(at(i));
            outer.push_back(join(at(k), at(l + 1)));
            for (std::size_t i = l + 2; i <= N; ++i) outer.push_back(at(i));
          } else {
            // a_{l+1} wraps around to a_1 through the trace.
            if (k == 1) {
              outer.push_back(at(1));
            } else {
              outer.push_back(join(at(k), at(1)));
              for (std::size_t i = 2; i <= k - 1; ++i) outer.push_back(at(i));
            }
          }
        }
        std::size_t x = visit(outer);
        std::size_t y = visit(inner);
        rules.push_back({x, y, crossed});
      }
    }
    rules_[id] = std::move(rules);
    return id;
  }

  std::vector<double> rhs(const std::vector<double>& y, double s) const {
    std::vector<double> d(y.size(), 0.0);
    const double es = std::exp(s);
    for (std::size_t i = 0; i < y.size(); ++i) {
      double acc = 0.0;
      for (const auto& r : rules_[i]) acc += r.crossed ? es * y[r.x] * y[r.y] : -y[r.x] * y[r.y];
      d[i] = acc;
    }
    return d;
  }

  Moment phi_;
  std::map<OWord, std::size_t> index_;
  std::vector<OWord> words_;
  std::vector<std::vector<Rule>> rules_;
};

/// Moments of the free additive convolution of two laws from their moment
/// sequences m[0] = 1, m[1], ..., via free cumulants: kappa_n are obtained
/// from m_n = sum over non-crossing partitions, using the recursion
///   m_n = sum_{s=1}^{n} kappa_s sum_{i_1+..+i_s = n-s} m_{i_1} ... m_{i_s}.
inline std::vector<double> free_cumulants(const std::vector<double>& m) {
  const std::size_t n_max = m.size() - 1;
  std::vector<double> kappa(n_max + 1, 0.0);
  // coef[s][r] = sum over compositions of r into s non-negative parts of prod m_{i_j}
  std::vector<std::vector<double>> coef(n_max + 1, std::vector<double>(n_max + 1, 0.0));
  coef[0][0] = 1.0;
  for (std::size_t s = 1; s <= n_max; ++s) {
    for (std::size_t r = 0; r <= n_max; ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= r; ++i) acc += m[i] * coef[s - 1][r - i];
      coef[s][r] = acc;
    }
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    double acc = m[n];
    for (std::size_t s = 1; s < n; ++s) acc -= kappa[s] * coef[s][n - s];
    kappa[n] = acc;  // coef[n][0] = 1
  }
  return kappa;
}

inline std::vector<double> moments_from_free_cumulants(const std::vector<double>& kappa) {
  const std::size_t n_max = kappa.size() - 1;
  std::vector<double> m(n_max + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    // coef depends on m up to n-1 only
    std::vector<std::vector<double>> coef(n + 1, std::vector<double>(n + 1, 0.0));
    coef[0][0] = 1.0;
    for (std::size_t s = 1; s <= n; ++s) {
      for (std::size_t r = 0; r + s <= n; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= r; ++i) acc += m[i] * coef[s - 1][r - i];
        coef[s][r] = acc;
      }
    }
    double acc = 0.0;
    for (std::size_t s = 1; s <= n; ++s) acc += kappa[s] * coef[s][n - s];
    m[n] = acc;
  }
  return m;
}

inline std::vector<double> free_additive_convolution(const std::vector<double>& mu, const std::vector<double>& nu) {
  auto k1 = free_cumulants(mu), k2 = free_cumulants(nu);
  for (std::size_t i = 0; i < k1.size(); ++i) k1[i] += k2[i];
  return moments_from_free_cumulants(k1);
}

inline std::vector<double> classical_additive_convolution(const std::vector<double>& mu, const std::vector<double>& nu) {
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t n = 0; n < mu.size(); ++n) {
    double binom = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      out[n] += binom * mu[k] * nu[n - k];
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
  }
  return out;
}

/// Taylor coefficients of an analytic function at 0 from samples on a circle
/// of radius r (discrete Cauchy integral with M points).
inline std::vector<std::complex<double>> taylor_by_cauchy(const std::function<std::complex<double>(std::complex<double>)>& f,
                                                          int order, double r, int M) {
  std::vector<std::complex<double>> c(static_cast<std::size_t>(order + 1));
  const double pi = std::acos(-1.0);
  for (int j = 0; j < M; ++j) {
    double th = 2 * pi * j / M;
    std::complex<double> z = std::polar(r, th);
    std::complex<double> v = f(z);
    for (int k = 0; k <= order; ++k) c[static_cast<std::size_t>(k)] += v * std::polar(std::pow(r, -k), -k * th);
  }
  for (auto& x : c) x /= static_cast<double>(M);
  return c;
}

/// Deterministic pseudo-random rational p/q attached to a key.
inline std::pair<long, long> hashed_rational(std::uint64_t key, long p_max = 9, long q_max = 9) {
  std::uint64_t z = key + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  long p = static_cast<long>(z % static_cast<std::uint64_t>(2 * p_max + 1)) - p_max;
  long q = 1 + static_cast<long>((z >> 20) % static_cast<std::uint64_t>(q_max));
  return {p, q};
}

inline std::uint64_t multiset_key(int family, const std::vector<int>& gens) {
  std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(family + 1);
  for (int g : gens) h = (h ^ static_cast<std::uint64_t>(g + 17)) * 1099511628211ull;
  return h;
}

}  // namespace oracle
