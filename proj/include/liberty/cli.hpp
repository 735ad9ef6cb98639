#pragma once

// Command-line front end. `run` is the whole program; tools/liberty_cli.cpp
// only forwards argv and the standard streams.

#include <liberty/convolutions.hpp>
#include <liberty/cumulants.hpp>
#include <liberty/fubm.hpp>
#include <liberty/matrix_model.hpp>
#include <liberty/moment_engine.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace liberty::cli {

namespace detail {

/// A flag value that parsed but is out of range; reported with exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Time parse_time_flag(const std::string& text, const std::string& flag) {
  try {
    return Time::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

inline std::vector<Rational> parse_moment_list(const std::string& text, const std::string& flag) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    try {
      out.push_back(rational_from_string(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(flag + ": " + e.what());
    }
  }
  if (out.empty()) throw UsageError(flag + ": empty moment list");
  return out;
}

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

}  // namespace detail

inline constexpr const char* kWordHelp =
    "Word grammar: space-separated letters, each a product of generators of one family, "
    "e.g. \"a1 b1 a2 b1\" or \"a1a2 b3\". The word reads x1 u x2 u* x3 u ...; two adjacent letters "
    "of the same family are separated by an implicit identity, and \"1\" is the identity letter.";

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments, cumulants, densities and matrix-model simulations for t-freeness", "liberty"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  bool json = false;
  auto add_json = [&json](CLI::App* sub) { sub->add_flag("--json", json, "Emit JSON instead of CSV/text"); };

  // density
  std::string density_t;
  std::size_t density_grid = 2048;
  auto* density = app.add_subcommand("density", "Density of the free unitary Brownian motion on the circle (theta, rho)");
  density->add_option("--t", density_t, "Time (decimal or inf)")->required();
  density->add_option("--grid", density_grid, "Number of midpoint samples on (-pi, pi]")->check(CLI::PositiveNumber);
  add_json(density);

  // convolve
  std::string conv_kind = "add", conv_t;
  std::size_t conv_grid = 2048;
  std::string conv_mu, conv_nu;
  int conv_k_max = 4;
  auto* convolve = app.add_subcommand(
      "convolve",
      "t-free convolution. Without --mu/--nu: density of Bernoulli *_t Bernoulli (add, columns x,eta) or "
      "Bernoulli (.)_t Bernoulli (mult, columns theta,rho). With --mu and --nu: exact moments 1..k-max");
  convolve->add_option("--kind", conv_kind, "add or mult")->check(CLI::IsMember({"add", "additive", "mult", "multiplicative"}));
  convolve->add_option("--t", conv_t, "Time (decimal or inf)")->required();
  convolve->add_option("--grid", conv_grid, "Number of midpoint samples")->check(CLI::PositiveNumber);
  auto* mu_opt = convolve->add_option("--mu", conv_mu, "Moments m_1,m_2,... of the first law (rationals, comma-separated)");
  auto* nu_opt = convolve->add_option("--nu", conv_nu, "Moments of the second law");
  mu_opt->needs(nu_opt);
  nu_opt->needs(mu_opt);
  convolve->add_option("--k-max", conv_k_max, "Highest moment computed (at most 8)")->check(CLI::Range(1, kMaxConvolutionOrder));
  add_json(convolve);

  // cumulants
  int cum_n = 4;
  bool cum_verify = false;
  auto* cumulants = app.add_subcommand("cumulants", "Table of the conjugation-invariant t-free cumulant of order n (2..6)");
  cumulants->add_option("--n", cum_n, "Order")->required()->check(CLI::Range(2, 6));
  cumulants->add_flag("--verify", cum_verify, "Re-check the vanishing property on generic mixed arguments");
  add_json(cumulants);

  // obstruction
  bool obs_details = false;
  auto* obstruction = app.add_subcommand("obstruction", "Difference of the two values of c_322 forced at order 7");
  obstruction->add_flag("--details", obs_details, "Also print c_52, c_43 and both c_322 candidates");
  add_json(obstruction);

  // moments
  std::string word_spec, moments_t;
  bool joint = false;
  auto* moments = app.add_subcommand("moments", std::string("Exact mixed moment tau(x1 u x2 u* ...). ") + kWordHelp);
  moments->add_option("--word", word_spec, "Word, e.g. \"a1 b1 a2 b1\"")->required();
  moments->add_option("--t", moments_t, "Evaluate the coefficients at this time");
  moments->add_flag("--joint", joint, "Start from the joint moment tau(all a)*... (commuting families) rather than independence");
  add_json(moments);

  // simulate
  int sim_n = 100, sim_samples = 100;
  std::string sim_t;
  double sim_dt = 0.0;
  std::uint64_t sim_seed = 1;
  bool sim_spectra = false;
  auto* simulate = app.add_subcommand("simulate", "Matrix model A + U S B S^-1 U* with Bernoulli (+-1) spectra");
  simulate->add_option("--n", sim_n, "Matrix size")->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim_t, "Time")->required();
  simulate->add_option("--samples", sim_samples, "Number of replicas")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--dt", sim_dt, "Step size (default min(0.01, t/100))")->check(CLI::PositiveNumber);
  simulate->add_flag("--spectra", sim_spectra, "Emit every eigenvalue instead of the moment summary");
  add_json(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (density->parsed()) {
      Time t = detail::parse_time_flag(density_t, "--t");
      if (!t.is_infinite() && !(t.value() > 0.0)) throw detail::UsageError("--t: density needs t > 0");
      CircleDensity d = liberty::density(t, density_grid);
      for (const auto& s : d.samples) {
        if (!s.converged) err << "warning: theta=" << detail::fmt(s.theta) << " residual " << s.residual << "\n";
      }
      if (json) {
        out << nlohmann::json(d).dump(2) << "\n";
      } else {
        out << d.to_csv();
      }
    } else if (convolve->parsed()) {
      Time t = detail::parse_time_flag(conv_t, "--t");
      ConvolutionKind kind = parse_convolution_kind(conv_kind);
      if (!conv_mu.empty()) {
        auto mu = detail::parse_moment_list(conv_mu, "--mu");
        auto nu = detail::parse_moment_list(conv_nu, "--nu");
        if (mu.size() < static_cast<std::size_t>(conv_k_max) || nu.size() < static_cast<std::size_t>(conv_k_max)) {
          throw detail::UsageError("--mu/--nu: need at least k-max = " + std::to_string(conv_k_max) + " moments");
        }
        MomentSequence seq = tfree_convolve_moments(mu, nu, kind, conv_k_max);
        if (json) {
          nlohmann::json j = {{"t", t.to_string()}, {"moments", seq}, {"values", seq.evaluate(t)}};
          out << j.dump(2) << "\n";
        } else {
          out << "k,moment,exact\n";
          for (std::size_t k = 1; k <= seq.size(); ++k) {
            out << k << "," << detail::fmt(seq[k].evaluate(t)) << ",\"" << seq[k].to_string() << "\"\n";
          }
        }
      } else {
        if (!t.is_infinite() && !(t.value() > 0.0)) throw detail::UsageError("--t: densities need t > 0");
        if (kind == ConvolutionKind::additive) {
          RealDensity d = bernoulli_add_density(t, conv_grid);
          out << (json ? nlohmann::json(d).dump(2) + "\n" : d.to_csv());
        } else {
          CircleDensity d = bernoulli_mult_density(t, conv_grid);
          out << (json ? nlohmann::json(d).dump(2) + "\n" : d.to_csv());
        }
      }
    } else if (cumulants->parsed()) {
      CumulantTable table = solve_cumulant(cum_n, cum_verify);
      out << (json ? nlohmann::json(table).dump(2) + "\n" : table.to_string());
    } else if (obstruction->parsed()) {
      Order7Obstruction r = order7_analysis();
      if (json) {
        nlohmann::json j = {{"c52", r.c52},
                            {"c43", r.c43},
                            {"c322_from_pair_triple", r.c322_from_pair_triple},
                            {"c322_from_pair_pair", r.c322_from_pair_pair},
                            {"difference", r.difference},
                            {"text", r.difference.to_factored_string()}};
        out << j.dump(2) << "\n";
      } else {
        if (obs_details) {
          out << "c52 : " << r.c52.to_factored_string() << "\n";
          out << "c43 : " << r.c43.to_factored_string() << "\n";
          out << "c322 from D({1,2},{3,4}{5,6,7}) : " << r.c322_from_pair_triple.to_factored_string() << "\n";
          out << "c322 from D({1,2,3},{4,5}{6,7}) : " << r.c322_from_pair_pair.to_factored_string() << "\n";
          out << "difference : ";
        }
        out << r.difference.to_factored_string() << "\n";
      }
    } else if (moments->parsed()) {
      Word w;
      try {
        w = Word::parse(word_spec);
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(std::string("--word: ") + e.what());
      }
      std::optional<Time> t;
      if (!moments_t.empty()) t = detail::parse_time_flag(moments_t, "--t");
      MomentEngine engine(joint ? InitialCondition::joint : InitialCondition::independent);
      MomentPolynomial p = engine.mixed_moment(w);
      if (json) {
        nlohmann::json j = {{"word", w.to_string()}, {"moment", p}};
        if (t) {
          nlohmann::json values = nlohmann::json::array();
          for (const auto& [m, c] : p.terms()) {
            values.push_back({{"monomial", MomentPolynomial::monomial_string(m)}, {"value", c.evaluate(*t)}});
          }
          j["t"] = t->to_string();
          j["values"] = values;
        }
        out << j.dump(2) << "\n";
      } else if (t) {
        out << "monomial,coefficient\n";
        for (const auto& [m, c] : p.terms()) {
          out << MomentPolynomial::monomial_string(m) << "," << detail::fmt(c.evaluate(*t)) << "\n";
        }
      } else {
        out << p.to_string() << "\n";
      }
    } else if (simulate->parsed()) {
      Time t = detail::parse_time_flag(sim_t, "--t");
      if (t.is_infinite()) throw detail::UsageError("--t: the simulation needs a finite time");
      SimulationConfig config;
      config.n = sim_n;
      config.t = t.value();
      if (sim_dt > 0.0) config.dt = sim_dt;
      config.samples = sim_samples;
      config.seed = sim_seed;
      config.spectra_a = bernoulli_spectrum(sim_n);
      config.spectra_b = bernoulli_spectrum(sim_n);
      try {
        config.validate();
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(e.what());
      }
      auto runs = simulate_replicas(config);
      if (sim_spectra) {
        std::vector<EmpiricalSpectralMeasure> spectra;
        for (const auto& r : runs) spectra.push_back(r.spectrum);
        if (json) {
          nlohmann::json j = nlohmann::json::array();
          for (const auto& s : spectra) j.push_back(s.eigenvalues);
          out << j.dump() << "\n";
        } else {
          out << spectra_csv(spectra);
        }
      } else {
        nlohmann::json summary = simulation_summary(runs);
        if (json) {
          out << summary.dump(2) << "\n";
        } else {
          out << "statistic,mean,stderr\n";
          for (const auto& [key, v] : summary.items()) {
            out << key << "," << detail::fmt(v["mean"].get<double>()) << "," << detail::fmt(v["stderr"].get<double>())
                << "\n";
          }
        }
      }
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const LimitError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace liberty::cli
