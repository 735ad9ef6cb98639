#include <liberty/matrix_model.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace liberty;

namespace {

SimulationConfig bernoulli_config(int n, double t, int samples, std::uint64_t seed) {
  SimulationConfig c;
  c.n = n;
  c.t = t;
  c.samples = samples;
  c.seed = seed;
  c.spectra_a = bernoulli_spectrum(n);
  c.spectra_b = bernoulli_spectrum(n);
  return c;
}

double normalized_trace_of_square(const CMatrix& h) { return (h * h).trace().real() / static_cast<double>(h.rows()); }

}  // namespace

TEST(HermitianIncrement, ExactlyHermitian) {
  Rng rng(7);
  CMatrix h = sample_hermitian_increment(30, 0.1, rng);
  EXPECT_EQ(h, h.adjoint());
}

TEST(HermitianIncrement, NormalizationAndCentering) {
  Rng rng(11);
  const int n = 50, reps = 10000;
  const double dt = 0.05;
  std::vector<double> sq, tr;
  for (int i = 0; i < reps; ++i) {
    CMatrix h = sample_hermitian_increment(n, dt, rng);
    sq.push_back(normalized_trace_of_square(h));
    tr.push_back(h.trace().real() / n);
  }
  MeanEstimate e2 = estimate_mean(sq), e1 = estimate_mean(tr);
  EXPECT_TRUE(e2.within(dt)) << e2.mean << " +- " << e2.stderr_;
  EXPECT_TRUE(e1.within(0.0)) << e1.mean << " +- " << e1.stderr_;
}

TEST(UnitaryPath, IdentityAtTimeZeroAndUnitarity) {
  Rng rng(3);
  EXPECT_EQ(unitary_brownian_path(20, 0.0, 0.01, rng), CMatrix::Identity(20, 20));
  CMatrix u = unitary_brownian_path(120, 0.5, 0.01, rng);
  EXPECT_LT((u * u.adjoint() - CMatrix::Identity(120, 120)).cwiseAbs().maxCoeff(), 1e-10);
  // dt not dividing t: the last step is shortened.
  CMatrix v = unitary_brownian_path(10, 0.055, 0.01, rng);
  EXPECT_LT((v * v.adjoint() - CMatrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UnitaryPath, TraceMomentsMatchFreeUnitaryBrownianMotion) {
  const double t = 1.0;
  std::vector<double> m1, m2;
  for (std::uint64_t r = 0; r < 200; ++r) {
    Rng rng = replica_rng(5, r);
    auto tr = trace_powers(unitary_brownian_path(100, t, 0.01, rng), 2);
    m1.push_back(tr[0].real());
    m2.push_back(tr[1].real());
  }
  MeanEstimate e1 = estimate_mean(m1), e2 = estimate_mean(m2);
  EXPECT_TRUE(e1.within(std::exp(-t / 2))) << e1.mean << " +- " << e1.stderr_;
  EXPECT_TRUE(e2.within(std::exp(-t) * (1 - t))) << e2.mean << " +- " << e2.stderr_;
}

TEST(Simulation, ClassicalLimitAtTimeZero) {
  auto runs = simulate_tfree_sum(bernoulli_config(200, 0.0, 200, 17));
  ASSERT_EQ(runs.size(), 200u);
  std::vector<double> w_minus, w_zero, w_plus;
  for (const auto& r : runs) {
    ASSERT_EQ(r.eigenvalues.size(), 200u);
    double a = 0, b = 0, c = 0;
    for (double x : r.eigenvalues) {
      if (std::abs(x + 2) < 1e-9) a += 1;
      else if (std::abs(x) < 1e-9) b += 1;
      else if (std::abs(x - 2) < 1e-9) c += 1;
      else ADD_FAILURE() << "unexpected eigenvalue " << x;
    }
    w_minus.push_back(a / 200);
    w_zero.push_back(b / 200);
    w_plus.push_back(c / 200);
  }
  EXPECT_TRUE(estimate_mean(w_minus).within(0.25));
  EXPECT_TRUE(estimate_mean(w_zero).within(0.5));
  EXPECT_TRUE(estimate_mean(w_plus).within(0.25));
}

TEST(Simulation, OddMomentsVanish) {
  auto runs = simulate_tfree_sum(bernoulli_config(40, 0.5, 100, 23));
  for (int k : {1, 3}) {
    MeanEstimate e = spectral_moment(runs, k);
    EXPECT_TRUE(e.within(0.0)) << k << ": " << e.mean << " +- " << e.stderr_;
  }
}

TEST(Simulation, Reproducible) {
  auto c = bernoulli_config(16, 0.3, 6, 99);
  auto x = simulate_tfree_sum(c), y = simulate_tfree_sum(c);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].eigenvalues, y[i].eigenvalues);
  c.seed = 100;
  EXPECT_NE(simulate_tfree_sum(c)[0].eigenvalues, x[0].eigenvalues);
}

TEST(Simulation, HalvingStepChangesLittle) {
  auto c = bernoulli_config(24, 1.0, 300, 5);
  c.dt = 0.02;
  auto coarse = simulate_tfree_sum(c);
  c.dt = 0.01;
  auto fine = simulate_tfree_sum(c);
  for (int k : {2, 4}) {
    MeanEstimate a = spectral_moment(coarse, k), b = spectral_moment(fine, k);
    double se = std::hypot(a.stderr_, b.stderr_);
    EXPECT_LT(std::abs(a.mean - b.mean), 3 * se) << k;
  }
}

TEST(Simulation, ConfigValidationAndOutput) {
  auto c = bernoulli_config(4, 1.0, 2, 1);
  c.spectra_b.pop_back();
  EXPECT_THROW(simulate_tfree_sum(c), std::invalid_argument);
  c = bernoulli_config(4, -1.0, 2, 1);
  EXPECT_THROW(simulate_tfree_sum(c), std::invalid_argument);
  c = bernoulli_config(4, 1.0, 2, 1);
  EXPECT_DOUBLE_EQ(c.step(), 0.01);
  c.t = 0.5;
  EXPECT_DOUBLE_EQ(c.step(), 0.005);
  auto runs = simulate_replicas(c);
  std::string csv = spectra_csv({runs[0].spectrum});
  EXPECT_EQ(csv.rfind("replica,index,eigenvalue\n", 0), 0u);
  nlohmann::json j = simulation_summary(runs);
  EXPECT_TRUE(j.contains("moment_4"));
  EXPECT_TRUE(j["trace_u_1"].contains("stderr"));
}
