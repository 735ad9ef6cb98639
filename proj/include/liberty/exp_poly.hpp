#pragma once

// Exact arithmetic in the ring of exponential polynomials
//
//     x(t) = sum_i p_i(t) e^{lambda_i t},
//
// with rational exponents lambda_i and polynomials p_i with rational
// coefficients. Every time-dependent quantity of the library (mixed moments,
// cumulant coefficients, moments of the free unitary Brownian motion) lives
// in this ring, so all symbolic work is exact and evaluation happens once, at
// the end, in MPFR.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"

namespace liberty {

class ExpPoly {
 public:
  /// Coefficients of a polynomial in t, index j <-> t^j; never has trailing zeros.
  using Polynomial = std::vector<Rational>;
  using TermMap = std::map<Rational, Polynomial>;

  ExpPoly() = default;
  ExpPoly(long c) : ExpPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  ExpPoly(const Rational& c) {               // NOLINT(google-explicit-constructor)
    Rational v = c;
    v.canonicalize();
    if (v != 0) terms_.emplace(Rational(0), Polynomial{v});
  }

  /// coeff * t^power * e^{lambda t}
  static ExpPoly monomial(Rational coeff, std::size_t power, Rational lambda) {
    ExpPoly out;
    coeff.canonicalize();
    lambda.canonicalize();
    if (coeff == 0) return out;
    Polynomial p(power + 1, Rational(0));
    p[power] = std::move(coeff);
    out.terms_.emplace(std::move(lambda), std::move(p));
    return out;
  }
  static ExpPoly exponential(const Rational& lambda, const Rational& coeff = 1) {
    return monomial(coeff, 0, lambda);
  }
  static ExpPoly t_power(std::size_t power, const Rational& coeff = 1) {
    return monomial(coeff, power, 0);
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// The value if this is a time-independent constant.
  std::optional<Rational> constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.size() == 1) {
      return terms_.begin()->second.front();
    }
    return std::nullopt;
  }

  /// Coefficient of t^power e^{lambda t}.
  Rational coefficient(std::size_t power, const Rational& lambda) const {
    auto it = terms_.find(lambda);
    if (it == terms_.end() || power >= it->second.size()) return 0;
    return it->second[power];
  }

  /// A single-term element c * e^{lambda t} with c != 0 is a unit of the ring.
  bool is_unit() const {
    return terms_.size() == 1 && terms_.begin()->second.size() == 1;
  }
  ExpPoly inverse() const {
    if (!is_unit()) throw std::domain_error("ExpPoly::inverse: element is not a unit");
    const auto& [lambda, p] = *terms_.begin();
    return exponential(-lambda, 1 / p.front());
  }

  ExpPoly& operator+=(const ExpPoly& other) {
    for (const auto& [lambda, p] : other.terms_) {
      auto& mine = terms_[lambda];
      if (mine.size() < p.size()) mine.resize(p.size(), Rational(0));
      for (std::size_t j = 0; j < p.size(); ++j) mine[j] += p[j];
      trim_term(lambda);
    }
    return *this;
  }
  ExpPoly& operator-=(const ExpPoly& other) { return *this += -other; }
  ExpPoly& operator*=(const ExpPoly& other) {
    *this = *this * other;
    return *this;
  }
  ExpPoly& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [lambda, p] : terms_) {
      for (auto& q : p) q *= c;
    }
    return *this;
  }

  friend ExpPoly operator-(ExpPoly x) {
    for (auto& [lambda, p] : x.terms_) {
      for (auto& q : p) q = -q;
    }
    return x;
  }
  friend ExpPoly operator+(ExpPoly x, const ExpPoly& y) { return x += y; }
  friend ExpPoly operator-(ExpPoly x, const ExpPoly& y) { return x -= y; }

  friend ExpPoly operator*(const ExpPoly& x, const ExpPoly& y) {
    ExpPoly out;
    for (const auto& [lx, px] : x.terms_) {
      for (const auto& [ly, py] : y.terms_) {
        Polynomial prod(px.size() + py.size() - 1, Rational(0));
        for (std::size_t i = 0; i < px.size(); ++i) {
          for (std::size_t j = 0; j < py.size(); ++j) prod[i + j] += px[i] * py[j];
        }
        Rational lambda = lx + ly;
        auto& acc = out.terms_[lambda];
        if (acc.size() < prod.size()) acc.resize(prod.size(), Rational(0));
        for (std::size_t k = 0; k < prod.size(); ++k) acc[k] += prod[k];
        out.trim_term(lambda);
      }
    }
    return out;
  }

  friend bool operator==(const ExpPoly& x, const ExpPoly& y) { return x.terms_ == y.terms_; }
  friend bool operator!=(const ExpPoly& x, const ExpPoly& y) { return !(x == y); }

  ExpPoly derivative() const {
    ExpPoly out;
    for (const auto& [lambda, p] : terms_) {
      Polynomial d(p.size(), Rational(0));
      for (std::size_t j = 0; j < p.size(); ++j) {
        d[j] += lambda * p[j];
        if (j > 0) d[j - 1] += Rational(static_cast<long>(j)) * p[j];
      }
      out.terms_.emplace(lambda, std::move(d));
      out.trim_term(lambda);
    }
    return out;
  }

  /// F with F' = *this and F(0) = initial, in closed form.
  ExpPoly integrate_from_zero(const Rational& initial) const {
    ExpPoly out(initial);
    for (const auto& [lambda, p] : terms_) {
      if (lambda == 0) {
        Polynomial q(p.size() + 1, Rational(0));
        for (std::size_t j = 0; j < p.size(); ++j) q[j + 1] = p[j] / static_cast<long>(j + 1);
        ExpPoly piece;
        piece.terms_.emplace(Rational(0), std::move(q));
        piece.trim_term(0);
        out += piece;
        continue;
      }
      // Q' + lambda Q = p has the polynomial solution Q = sum_i (-1)^i p^{(i)} / lambda^{i+1};
      // the integral is Q(t) e^{lambda t} - Q(0).
      Polynomial q(p.size(), Rational(0));
      Polynomial deriv = p;
      Rational scale = 1 / lambda;
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < deriv.size(); ++j) q[j] += scale * deriv[j];
        scale *= -1 / lambda;
        Polynomial next(deriv.size() > 1 ? deriv.size() - 1 : 0, Rational(0));
        for (std::size_t j = 1; j < deriv.size(); ++j) next[j - 1] = deriv[j] * static_cast<long>(j);
        deriv = std::move(next);
      }
      Rational q0 = q.front();
      ExpPoly piece;
      piece.terms_.emplace(lambda, std::move(q));
      piece.trim_term(lambda);
      out += piece;
      out -= ExpPoly(q0);
    }
    return out;
  }

  /// The element t -> x(c t).
  ExpPoly scale_time(const Rational& c) const {
    ExpPoly out;
    if (c == 0) return ExpPoly(value_at_zero());
    for (const auto& [lambda, p] : terms_) {
      Polynomial q(p.size(), Rational(0));
      Rational pw = 1;
      for (std::size_t j = 0; j < p.size(); ++j) {
        q[j] = p[j] * pw;
        pw *= c;
      }
      out.terms_.emplace(lambda * c, std::move(q));
    }
    return out;
  }

  Rational value_at_zero() const {
    Rational v = 0;
    for (const auto& [lambda, p] : terms_) v += p.front();
    return v;
  }

  /// lim_{t -> inf}; requires every term to decay except a constant one.
  Rational limit_at_infinity() const {
    Rational v = 0;
    for (const auto& [lambda, p] : terms_) {
      if (lambda > 0 || (lambda == 0 && p.size() > 1)) {
        throw DivergenceError("ExpPoly::limit_at_infinity: " + to_string() + " diverges");
      }
      if (lambda == 0) v = p.front();
    }
    return v;
  }

  /// Value at t >= 0 rounded to `bits` bits of precision. Coefficients stay
  /// exact until they meet the (exactly representable) double t. The working
  /// precision grows until it covers the cancellation between terms.
  BigFloat evaluate(double t, mpfr_prec_t bits = 128) const {
    if (!(t >= 0.0)) throw std::domain_error("ExpPoly::evaluate: t must be >= 0");
    mpfr_prec_t work = bits + 64;
    BigFloat out(bits);
    for (int attempt = 0; attempt < 8; ++attempt) {
      BigFloat sum(work), magnitude(work), tt(work), e(work), term(work);
      mpfr_set_d(tt.get(), t, MPFR_RNDN);
      for (const auto& [lambda, p] : terms_) {
        mpfr_mul_q(e.get(), tt.get(), lambda.get_mpq_t(), MPFR_RNDN);
        mpfr_exp(e.get(), e.get(), MPFR_RNDN);
        for (std::size_t j = 0; j < p.size(); ++j) {
          if (p[j] == 0) continue;
          mpfr_pow_ui(term.get(), tt.get(), j, MPFR_RNDN);
          mpfr_mul(term.get(), term.get(), e.get(), MPFR_RNDN);
          mpfr_mul_q(term.get(), term.get(), p[j].get_mpq_t(), MPFR_RNDN);
          mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
          mpfr_abs(term.get(), term.get(), MPFR_RNDN);
          mpfr_add(magnitude.get(), magnitude.get(), term.get(), MPFR_RNDN);
        }
      }
      mpfr_set(out.get(), sum.get(), MPFR_RNDN);
      if (mpfr_zero_p(magnitude.get())) break;
      // Bits lost to cancellation; an exact zero counts as total loss.
      mpfr_exp_t lost = mpfr_zero_p(sum.get())
                            ? static_cast<mpfr_exp_t>(work)
                            : mpfr_get_exp(magnitude.get()) - mpfr_get_exp(sum.get());
      if (lost + bits + 16 <= work) break;
      work = bits + static_cast<mpfr_prec_t>(lost) + 64 + work / 2;
    }
    return out;
  }

  double evaluate(Time t) const {
    if (t.is_infinite()) return limit_at_infinity().get_d();
    return evaluate(t.value(), 128).to_double();
  }
  double operator()(Time t) const { return evaluate(t); }

  /// Expanded form, exponents in decreasing order: "e^{-t}-t*e^{-t}".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [lambda, p] = *it;
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] == 0) continue;
        std::vector<std::string> factors;
        if (j == 1) factors.emplace_back("t");
        if (j > 1) factors.push_back("t^" + std::to_string(j));
        if (lambda != 0) factors.push_back(exp_string(lambda));
        append_term(out, p[j], factors);
      }
    }
    return out;
  }

  /// When the element is a polynomial in x = e^{-t}, a factored rendering
  /// content * x^k * (1-x)^m * (rest), e.g. "24*e^{-3t}*(1-e^{-t})^2" or
  /// "-2(2+e^{-2t})". Falls back to to_string() otherwise.
  std::string to_factored_string() const {
    auto coeffs = as_polynomial_in_exp_minus_t();
    if (!coeffs || coeffs->empty()) return to_string();
    std::vector<Rational> c = *coeffs;

    std::size_t shift = 0;
    while (c[shift] == 0) ++shift;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(shift));

    int one_minus_x = 0;
    while (c.size() > 1) {
      Rational at_one = 0;
      for (const auto& v : c) at_one += v;
      if (at_one != 0) break;
      // divide by (1 - x): c(x) = (1 - x) q(x)
      std::vector<Rational> q(c.size() - 1, Rational(0));
      Rational run = 0;
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        run += c[i];
        q[i] = run;
      }
      c = std::move(q);
      ++one_minus_x;
    }

    mpz_class num_gcd = 0;
    mpz_class den_lcm = 1;
    for (const auto& v : c) {
      if (v == 0) continue;
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), v.get_num_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), v.get_den_mpz_t());
    }
    Rational content(num_gcd, den_lcm);
    content.canonicalize();
    if (c.front() < 0) content = -content;
    for (auto& v : c) v /= content;

    std::vector<std::string> factors;
    if (shift > 0) factors.push_back(exp_string(Rational(-static_cast<long>(shift))));
    if (one_minus_x > 0) {
      std::string f = "(1-e^{-t})";
      if (one_minus_x > 1) f += "^" + std::to_string(one_minus_x);
      factors.push_back(f);
    }
    bool rest_is_sum = std::count_if(c.begin(), c.end(), [](const Rational& v) { return v != 0; }) > 1;
    if (c.size() > 1 || c.front() != 1) {
      std::string rest;
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        std::vector<std::string> f;
        if (k > 0) f.push_back(exp_string(Rational(-static_cast<long>(k))));
        append_term(rest, c[k], f);
      }
      factors.push_back(rest_is_sum ? "(" + rest + ")" : rest);
    }

    std::string lead;
    if (factors.empty()) return content.get_str();
    if (content == 1) {
      lead = "";
    } else if (content == -1) {
      lead = "-";
    } else {
      lead = content.get_str();
    }
    if (factors.size() == 1 && rest_is_sum) return lead + factors.front();
    std::string body;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i > 0) body += "*";
      body += factors[i];
    }
    if (lead.empty() || lead == "-") return lead + body;
    return lead + "*" + body;
  }

  /// Coefficients in x = e^{-t} when every term is c * e^{-k t}, k in N.
  std::optional<std::vector<Rational>> as_polynomial_in_exp_minus_t() const {
    std::vector<Rational> out;
    for (const auto& [lambda, p] : terms_) {
      if (lambda > 0 || lambda.get_den() != 1 || p.size() != 1) return std::nullopt;
      Rational k = -lambda;
      std::size_t deg = k.get_num().get_ui();
      if (out.size() <= deg) out.resize(deg + 1, Rational(0));
      out[deg] = p.front();
    }
    return out;
  }

  /// Serialized as {"lambda": ["c0", "c1", ...]} with exact "p/q" strings.
  friend void to_json(nlohmann::json& j, const ExpPoly& x) {
    j = nlohmann::json::object();
    for (const auto& [lambda, p] : x.terms_) {
      auto arr = nlohmann::json::array();
      for (const auto& c : p) arr.push_back(c.get_str());
      j[lambda.get_str()] = std::move(arr);
    }
  }
  friend void from_json(const nlohmann::json& j, ExpPoly& x) {
    x = ExpPoly();
    for (const auto& [key, arr] : j.items()) {
      Rational lambda = rational_from_string(key);
      for (std::size_t k = 0; k < arr.size(); ++k) {
        x += monomial(rational_from_string(arr.at(k).get<std::string>()), k, lambda);
      }
    }
  }

  friend std::ostream& operator<<(std::ostream& os, const ExpPoly& x) { return os << x.to_string(); }

 private:
  void trim_term(const Rational& lambda) {
    auto it = terms_.find(lambda);
    if (it == terms_.end()) return;
    auto& p = it->second;
    while (!p.empty() && p.back() == 0) p.pop_back();
    if (p.empty()) terms_.erase(it);
  }

  static std::string exp_string(const Rational& lambda) {
    std::string s = "e^{";
    Rational a = abs(lambda);
    if (lambda < 0) s += "-";
    if (a.get_num() != 1) s += a.get_num().get_str();
    s += "t";
    if (a.get_den() != 1) s += "/" + a.get_den().get_str();
    return s + "}";
  }

  static void append_term(std::string& out, const Rational& c, const std::vector<std::string>& factors) {
    std::string body;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i > 0) body += "*";
      body += factors[i];
    }
    const bool negative = c < 0;
    Rational a = abs(c);
    std::string coef;
    if (body.empty()) {
      coef = a.get_str();
    } else if (a == 1) {
      coef = "";
    } else if (a.get_den() == 1) {
      coef = a.get_str();
    } else {
      coef = a.get_str() + "*";
    }
    if (negative) {
      out += "-";
    } else if (!out.empty()) {
      out += "+";
    }
    out += coef + body;
  }

  TermMap terms_;
};

inline ExpPoly add(const ExpPoly& x, const ExpPoly& y) { return x + y; }
inline ExpPoly mul(const ExpPoly& x, const ExpPoly& y) { return x * y; }
inline ExpPoly integrate_from_zero(const ExpPoly& x, const Rational& initial) {
  return x.integrate_from_zero(initial);
}
inline BigFloat eval(const ExpPoly& x, double t, mpfr_prec_t bits) { return x.evaluate(t, bits); }
inline double eval(const ExpPoly& x, Time t) { return x.evaluate(t); }

}  // namespace liberty
