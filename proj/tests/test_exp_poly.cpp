#include <liberty/exp_poly.hpp>

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

using liberty::ExpPoly;
using liberty::Rational;
using liberty::Time;

namespace {

ExpPoly e(long num, long den = 1) { return ExpPoly::exponential(Rational(num, den)); }
ExpPoly t_pow(std::size_t k) { return ExpPoly::t_power(k); }

ExpPoly random_exp_poly(std::mt19937_64& rng, long height = 1000000) {
  std::uniform_int_distribution<long> coeff(-height, height);
  std::uniform_int_distribution<long> den(1, 7);
  std::uniform_int_distribution<int> lam(-8, 2);
  std::uniform_int_distribution<int> pow(0, 3);
  std::uniform_int_distribution<int> count(0, 5);
  ExpPoly x;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    x += ExpPoly::monomial(Rational(coeff(rng), den(rng)), static_cast<std::size_t>(pow(rng)), Rational(lam(rng), 2));
  }
  return x;
}

}  // namespace

TEST(ExpPolyArithmetic, AdditiveInverseCancels) {
  EXPECT_TRUE((e(-1) + (-e(-1))).is_zero());
  EXPECT_EQ(ExpPoly(1) + (-e(-2)), ExpPoly(1) - e(-2));
  EXPECT_EQ((ExpPoly(1) - e(-1)) + e(-1), ExpPoly(1));
}

TEST(ExpPolyArithmetic, ProductsAddExponents) {
  EXPECT_EQ(e(-1) * (t_pow(1) * e(-1)), t_pow(1) * e(-2));
  EXPECT_EQ(e(1) * e(-2), e(-1));
  EXPECT_EQ((ExpPoly(1) - e(-1)) * (ExpPoly(1) + e(-1)), ExpPoly(1) - e(-2));
}

TEST(ExpPolyArithmetic, ZeroIsCanonical) {
  ExpPoly x = t_pow(2) * e(-3) - t_pow(2) * e(-3);
  EXPECT_TRUE(x.is_zero());
  EXPECT_TRUE(x.terms().empty());
  EXPECT_EQ(x, ExpPoly());
}

TEST(ExpPolyCalculus, IntegrateExamples) {
  EXPECT_EQ(integrate_from_zero(e(1), 0), e(1) - 1);
  EXPECT_EQ(integrate_from_zero(t_pow(1), 0), ExpPoly::t_power(2, Rational(1, 2)));
  EXPECT_EQ(integrate_from_zero(-e(-1), 1), e(-1));
}

TEST(ExpPolyCalculus, IntegrateHigherPowerWithExponential) {
  // d/dt [ -(t+1) e^{-t} ] = t e^{-t}
  ExpPoly f = integrate_from_zero(t_pow(1) * e(-1), 0);
  EXPECT_EQ(f, ExpPoly(1) - (t_pow(1) + 1) * e(-1));
}

TEST(ExpPolyEval, BoundaryValues) {
  ExpPoly x = e(-1) * (ExpPoly(1) - t_pow(1));
  EXPECT_DOUBLE_EQ(eval(x, Time(0.0)), 1.0);
  EXPECT_DOUBLE_EQ(eval(x, Time::infinity()), 0.0);
  EXPECT_DOUBLE_EQ(eval(ExpPoly(1) - e(-2), Time::infinity()), 1.0);
  EXPECT_NEAR(eval(x, Time(1.0)), 0.0, 1e-300);
  EXPECT_NEAR(eval(x, Time(2.0)), -std::exp(-2.0), 1e-16);
}

TEST(ExpPolyEval, InfinityOnGrowingTermThrows) {
  EXPECT_THROW(eval(e(1), Time::infinity()), liberty::DivergenceError);
  EXPECT_THROW(eval(t_pow(1), Time::infinity()), liberty::DivergenceError);
  EXPECT_NO_THROW(eval(t_pow(3) * e(-1, 2), Time::infinity()));
}

TEST(ExpPolyEval, AlternatingSumStaysAccurate) {
  // (1 - e^{-t})^30 at t = 1e-3 is about 1e-90; naive double evaluation of
  // the expanded form loses everything.
  ExpPoly base = ExpPoly(1) - e(-1);
  ExpPoly p = 1;
  for (int i = 0; i < 30; ++i) p *= base;
  liberty::BigFloat v = eval(p, 1e-3, 200);
  double expected = std::pow(-std::expm1(-1e-3), 30);
  EXPECT_NEAR(v.to_double() / expected, 1.0, 1e-12);
}

TEST(ExpPolyRendering, ExpandedAndFactored) {
  EXPECT_EQ((e(-1) - t_pow(1) * e(-1)).to_string(), "e^{-t}-t*e^{-t}");
  EXPECT_EQ(ExpPoly(0).to_string(), "0");
  EXPECT_EQ(e(-1, 2).to_string(), "e^{-t/2}");
  EXPECT_EQ(ExpPoly::exponential(Rational(-3, 2), 2).to_string(), "2e^{-3t/2}");
  ExpPoly c22 = ExpPoly(-4) - 2 * e(-2);
  EXPECT_EQ(c22.to_factored_string(), "-2(2+e^{-2t})");
  ExpPoly x3 = e(-3);
  ExpPoly diff = 24 * x3 * (ExpPoly(1) - e(-1)) * (ExpPoly(1) - e(-1));
  EXPECT_EQ(diff.to_factored_string(), "24*e^{-3t}*(1-e^{-t})^2");
  EXPECT_EQ(ExpPoly(-1).to_factored_string(), "-1");
}

TEST(ExpPolyJson, RoundTrip) {
  ExpPoly x = ExpPoly::monomial(Rational(3, 7), 2, Rational(-1, 2)) + 5 - e(-2);
  nlohmann::json j = x;
  EXPECT_EQ(j["-1/2"][2], "3/7");
  EXPECT_EQ(j["0"][0], "5");
  EXPECT_EQ(j.get<ExpPoly>(), x);
}

TEST(ExpPolyProperties, DerivativeInvertsIntegration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    ExpPoly x = random_exp_poly(rng);
    Rational c(static_cast<long>(trial) - 100, 3);
    c.canonicalize();
    ExpPoly f = integrate_from_zero(x, c);
    EXPECT_EQ(f.derivative(), x);
    EXPECT_EQ(f.value_at_zero(), c);
  }
}

TEST(ExpPolyProperties, RingAxioms) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    ExpPoly x = random_exp_poly(rng, 50), y = random_exp_poly(rng, 50), z = random_exp_poly(rng, 50);
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ(x + y, y + x);
    EXPECT_EQ(x * y, y * x);
  }
}

TEST(ExpPolyProperties, EvaluationMatchesTermwiseOracle) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> tdist(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    ExpPoly x = random_exp_poly(rng);
    double t = tdist(rng);
    Big sum = 0, scale = 1;
    for (const auto& [lambda, poly] : x.terms()) {
      Big lam = Big(lambda.get_num().get_str()) / Big(lambda.get_den().get_str());
      for (std::size_t j = 0; j < poly.size(); ++j) {
        Big c = Big(poly[j].get_num().get_str()) / Big(poly[j].get_den().get_str());
        Big term = c * boost::multiprecision::pow(Big(t), static_cast<int>(j)) * boost::multiprecision::exp(lam * Big(t));
        sum += term;
        scale += boost::multiprecision::abs(term);
      }
    }
    liberty::BigFloat v = eval(x, t, 128);
    Big got(v.to_string(45));
    EXPECT_LE(static_cast<double>(boost::multiprecision::abs(got - sum) / scale), std::ldexp(1.0, -100))
        << x.to_string() << " at t=" << t;
  }
}

TEST(ExpPolyScaling, ScaleTimeSubstitutes) {
  // f(t) = t e^{-t}  ->  f(4t) = 4t e^{-4t}
  ExpPoly f = t_pow(1) * e(-1);
  EXPECT_EQ(f.scale_time(4), 4 * t_pow(1) * e(-4));
}
