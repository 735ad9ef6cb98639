#pragma once

// Monte Carlo for the matrix model A + U S B S^{-1} U*: U is a Brownian
// motion on U(n) at time t, S a uniform permutation matrix, A and B fixed
// real diagonal matrices.

#include <liberty/common.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liberty {

using CMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

struct SimulationConfig {
  int n = 100;
  double t = 1.0;
  std::optional<double> dt;  // defaults to min(0.01, t/100)
  int samples = 100;
  std::uint64_t seed = 1;
  std::vector<double> spectra_a;
  std::vector<double> spectra_b;

  double step() const { return dt ? *dt : std::min(0.01, t / 100.0); }

  void validate() const {
    if (n < 1) throw std::invalid_argument("simulation: n must be at least 1");
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("simulation: t must be finite and non-negative");
    if (t > 0.0 && !(step() > 0.0)) throw std::invalid_argument("simulation: dt must be positive");
    if (samples < 1) throw std::invalid_argument("simulation: samples must be at least 1");
    if (spectra_a.size() != static_cast<std::size_t>(n) || spectra_b.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("simulation: spectra_a and spectra_b must have n entries");
    }
  }
};

/// n entries, the first half +1 and the rest -1 (n even for an exact balance).
inline std::vector<double> bernoulli_spectrum(int n) {
  std::vector<double> d(static_cast<std::size_t>(n), -1.0);
  std::fill(d.begin(), d.begin() + n / 2, 1.0);
  return d;
}

struct EmpiricalSpectralMeasure {
  std::vector<double> eigenvalues;  // sorted ascending, weight 1/n each

  /// (1/n) sum lambda_i^k
  double moment(int k) const {
    double acc = 0.0;
    for (double x : eigenvalues) acc += std::pow(x, k);
    return acc / static_cast<double>(eigenvalues.size());
  }
};

/// Independent generator for replica `replica` of a run seeded with `seed`.
inline Rng replica_rng(std::uint64_t seed, std::uint64_t replica) {
  // splitmix64 over (seed, replica)
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::seed_seq seq{mix(seed), mix(seed ^ mix(replica + 1))};
  return Rng(seq);
}

/// Hermitian increment of the Brownian motion on the Lie algebra of U(n):
/// diagonal entries N(0, dt/n), off-diagonal entries complex Gaussian with
/// E|H_ij|^2 = dt/n, so that E[tr H^2] = dt with tr the normalized trace.
inline CMatrix sample_hermitian_increment(int n, double dt, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double diag_sd = std::sqrt(dt / n);
  const double off_sd = std::sqrt(dt / (2.0 * n));
  CMatrix h(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = diag_sd * normal(rng);
    for (int i = j + 1; i < n; ++i) {
      std::complex<double> z(off_sd * normal(rng), off_sd * normal(rng));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

/// exp(iH) for Hermitian H via its eigendecomposition.
inline CMatrix exp_i_hermitian(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("exp_i_hermitian: eigensolver failed");
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phase = es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return v * phase.asDiagonal() * v.adjoint();
}

/// U_{n,t} as the product of steps exp(i dH) U, starting from the identity;
/// the last step is shortened when dt does not divide t.
inline CMatrix unitary_brownian_path(int n, double t, double dt, Rng& rng) {
  if (n < 1) throw std::invalid_argument("unitary_brownian_path: n must be at least 1");
  if (!(t >= 0.0)) throw std::invalid_argument("unitary_brownian_path: t must be non-negative");
  CMatrix u = CMatrix::Identity(n, n);
  if (t == 0.0) return u;
  if (!(dt > 0.0)) throw std::invalid_argument("unitary_brownian_path: dt must be positive");
  double elapsed = 0.0;
  while (elapsed < t * (1.0 - 1e-12)) {
    double h = std::min(dt, t - elapsed);
    u = exp_i_hermitian(sample_hermitian_increment(n, h, rng)) * u;
    elapsed += h;
  }
  return u;
}

/// Normalized trace moments tr(U^k), k = 1..k_max.
inline std::vector<std::complex<double>> trace_powers(const CMatrix& u, int k_max) {
  std::vector<std::complex<double>> out;
  CMatrix p = u;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) p = p * u;
    out.push_back(p.trace() / static_cast<double>(u.rows()));
  }
  return out;
}

struct ReplicaResult {
  EmpiricalSpectralMeasure spectrum;
  std::vector<std::complex<double>> unitary_traces;  // tr(U^k), k = 1, 2
};

/// One replica: draws S and U from replica_rng(seed, index) and diagonalizes
/// diag(a) + U S diag(b) S^{-1} U*.
inline ReplicaResult simulate_replica(const SimulationConfig& config, std::uint64_t index) {
  Rng rng = replica_rng(config.seed, index);
  const int n = config.n;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  CMatrix u = unitary_brownian_path(n, config.t, config.step(), rng);
  // U S diag(b) S^{-1} U* = sum_i b_{perm(i)} u_i u_i^*, u_i the columns of U.
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = config.spectra_b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  CMatrix m = u * b.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  for (int i = 0; i < n; ++i) m(i, i) += config.spectra_a[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("simulate_tfree_sum: eigensolver failed on replica " + std::to_string(index));
  }
  ReplicaResult r;
  r.spectrum.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(r.spectrum.eigenvalues.begin(), r.spectrum.eigenvalues.end());
  r.unitary_traces = trace_powers(u, 2);
  return r;
}

inline std::vector<ReplicaResult> simulate_replicas(const SimulationConfig& config) {
  config.validate();
  std::vector<ReplicaResult> out(static_cast<std::size_t>(config.samples));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = simulate_replica(config, i); });
  return out;
}

inline std::vector<EmpiricalSpectralMeasure> simulate_tfree_sum(const SimulationConfig& config) {
  std::vector<EmpiricalSpectralMeasure> out;
  for (auto& r : simulate_replicas(config)) out.push_back(std::move(r.spectrum));
  return out;
}

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;

  bool within(double target, double sigmas = 3.0) const {
    // A zero standard error (e.g. deterministic spectra) still allows round-off.
    return std::abs(mean - target) <= sigmas * stderr_ + 1e-12 * std::max(1.0, std::abs(target));
  }
};

inline MeanEstimate estimate_mean(const std::vector<double>& xs) {
  MeanEstimate e;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

/// Replica mean and standard error of the k-th spectral moment.
inline MeanEstimate spectral_moment(const std::vector<EmpiricalSpectralMeasure>& runs, int k) {
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(r.moment(k));
  return estimate_mean(xs);
}

/// Replica mean and standard error of Re tr(U^k), k = 1, 2.
inline MeanEstimate unitary_trace_moment(const std::vector<ReplicaResult>& runs, int k) {
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(r.unitary_traces.at(static_cast<std::size_t>(k - 1)).real());
  return estimate_mean(xs);
}

inline std::string spectra_csv(const std::vector<EmpiricalSpectralMeasure>& runs) {
  std::ostringstream out;
  out.precision(17);
  out << "replica,index,eigenvalue\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t i = 0; i < runs[r].eigenvalues.size(); ++i) out << r << "," << i << "," << runs[r].eigenvalues[i] << "\n";
  }
  return out.str();
}

/// {"moment_k": {"mean": ..., "stderr": ...}} for k = 1..k_max, plus the
/// unitary trace moments when replica results are available.
inline nlohmann::json simulation_summary(const std::vector<ReplicaResult>& runs, int k_max = 4) {
  std::vector<EmpiricalSpectralMeasure> spectra;
  for (const auto& r : runs) spectra.push_back(r.spectrum);
  nlohmann::json j = nlohmann::json::object();
  for (int k = 1; k <= k_max; ++k) {
    MeanEstimate e = spectral_moment(spectra, k);
    j["moment_" + std::to_string(k)] = {{"mean", e.mean}, {"stderr", e.stderr_}};
  }
  for (int k = 1; k <= 2; ++k) {
    MeanEstimate e = unitary_trace_moment(runs, k);
    j["trace_u_" + std::to_string(k)] = {{"mean", e.mean}, {"stderr", e.stderr_}};
  }
  return j;
}

}  // namespace liberty
