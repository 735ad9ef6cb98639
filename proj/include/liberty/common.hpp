#pragma once

#include <algorithm>
#include <charconv>
#include <exception>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

namespace liberty {

using Rational = mpq_class;

/// Raised when a numerical procedure (root finder, eigensolver, ...) fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an asymptotic limit does not exist (e.g. t -> inf on e^{t}).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A time value in [0, +inf]. Infinity is a first-class value because the
/// free limit (t -> inf) is evaluated symbolically, not by large t.
class Time {
 public:
  constexpr Time() = default;
  constexpr Time(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  static constexpr Time infinity() {
    Time t;
    t.infinite_ = true;
    t.value_ = std::numeric_limits<double>::infinity();
    return t;
  }

  /// Accepts a decimal literal or "inf" / "infinity".
  static Time parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "+inf") return infinity();
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("not a time value: '" + std::string(text) + "'");
    }
    if (!(v >= 0.0) || v == std::numeric_limits<double>::infinity()) {
      if (v == std::numeric_limits<double>::infinity()) return infinity();
      throw std::invalid_argument("time must be non-negative: '" + std::string(text) + "'");
    }
    return Time(v);
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr double value() const { return value_; }

  std::string to_string() const {
    if (infinite_) return "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value_);
    return std::string(buf, ptr);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// RAII wrapper over an MPFR value with its own precision.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits = 128) {
    mpfr_init2(value_, bits);
    mpfr_set_zero(value_, 1);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
  }
  BigFloat& operator=(BigFloat other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(value_); }

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits = 20) const {
    char* raw = nullptr;
    std::string fmt = "%." + std::to_string(std::max(1, digits - 1)) + "Re";
    mpfr_asprintf(&raw, fmt.c_str(), value_);
    std::string out(raw);
    mpfr_free_str(raw);
    return out;
  }

 private:
  mpfr_t value_;
};

/// Worker count for parallel loops: hardware concurrency, capped by the
/// LIBERTY_THREADS environment variable when it is set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIBERTY_THREADS")) {
    unsigned cap = 0;
    std::string_view sv(env);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
    if (ec == std::errc{} && cap > 0) n = std::min(n, cap);
  }
  return n;
}

/// Runs f(i) for i in [0, n) over worker_count() threads in contiguous chunks.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_from_string(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: '" + s + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace liberty
