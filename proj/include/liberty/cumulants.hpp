#pragma once

// Conjugation-invariant cumulants c_lambda (lambda a partition of n) for
// which sum_sigma c(sigma) phi_sigma vanishes on mixed arguments from two
// t-free families, normalized by c_n = 1.

#include <liberty/combinatorics.hpp>
#include <liberty/exp_poly.hpp>
#include <liberty/moment_engine.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liberty {

/// Raised when the vanishing conditions admit no solution.
class InconsistentSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CumulantTable {
 public:
  CumulantTable() = default;
  CumulantTable(int order, std::map<IntegerPartition, ExpPoly> coefficients)
      : order_(order), coefficients_(std::move(coefficients)) {}

  int order() const { return order_; }
  const std::map<IntegerPartition, ExpPoly>& coefficients() const { return coefficients_; }
  bool contains(const IntegerPartition& lambda) const { return coefficients_.contains(lambda); }
  const ExpPoly& at(const IntegerPartition& lambda) const {
    auto it = coefficients_.find(lambda);
    if (it == coefficients_.end()) throw std::out_of_range("CumulantTable: no coefficient for " + lambda.to_string());
    return it->second;
  }

  /// Rows "lambda : coefficient", partitions in reverse lexicographic order
  /// (n first).
  std::string to_string() const {
    std::ostringstream out;
    for (const auto& lambda : integer_partitions(order_)) {
      auto it = coefficients_.find(lambda);
      if (it == coefficients_.end()) continue;
      out << lambda.to_string() << " : " << it->second.to_factored_string() << "\n";
    }
    return out.str();
  }

  friend void to_json(nlohmann::json& j, const CumulantTable& table) {
    j = nlohmann::json::object();
    j["order"] = table.order_;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& lambda : integer_partitions(table.order_)) {
      auto it = table.coefficients_.find(lambda);
      if (it == table.coefficients_.end()) continue;
      rows.push_back({{"partition", lambda.parts()},
                      {"label", lambda.to_string()},
                      {"coefficient", it->second},
                      {"text", it->second.to_factored_string()}});
    }
    j["coefficients"] = rows;
  }

 private:
  int order_ = 0;
  std::map<IntegerPartition, ExpPoly> coefficients_;
};

/// Fills in every c_lambda with a part equal to 1 from the singleton-free
/// values, using c_{mu + delta_{l+1}} = -sum_{i <= l} mu_i c_{mu + delta_i}
/// for mu a partition of n-1 with l parts.
inline CumulantTable extend_with_singletons(int n, const std::map<IntegerPartition, ExpPoly>& partial) {
  std::map<IntegerPartition, ExpPoly> table;
  for (const auto& lambda : integer_partitions(n)) {
    if (!lambda.has_no_singletons()) continue;
    auto it = partial.find(lambda);
    if (it == partial.end()) {
      throw std::invalid_argument("extend_with_singletons: missing c_" + lambda.to_string());
    }
    table.emplace(lambda, it->second);
  }
  // Increasing number of parts equal to 1; each right-hand side has fewer.
  for (int ones = 1; ones <= n; ++ones) {
    for (const auto& lambda : integer_partitions(n)) {
      if (static_cast<int>(lambda.count(1)) != ones) continue;
      std::vector<int> parts = lambda.parts();
      parts.pop_back();  // remove one part equal to 1
      IntegerPartition mu(parts);
      ExpPoly value;
      for (std::size_t i = 1; i <= mu.length(); ++i) value -= ExpPoly(mu.part(i)) * table.at(add_delta(mu, i));
      table.emplace(lambda, value);
    }
  }
  return CumulantTable(n, std::move(table));
}

namespace detail {

/// An affine equation sum_lambda coeff_lambda c_lambda + constant = 0.
struct AffineEquation {
  LinearForm coefficients;
  ExpPoly constant;
  std::string origin;
};

inline void substitute(AffineEquation& eq, const IntegerPartition& lambda, const ExpPoly& value) {
  auto it = eq.coefficients.find(lambda);
  if (it == eq.coefficients.end()) return;
  eq.constant += it->second * value;
  eq.coefficients.erase(it);
}

/// Solves for the unknowns by repeated substitution, pivoting only on
/// coefficients that are units of the ring (c * e^{lambda t}). Every leftover
/// equation must reduce to 0 = 0.
inline std::map<IntegerPartition, ExpPoly> solve_affine(std::vector<AffineEquation> equations,
                                                        std::map<IntegerPartition, ExpPoly> known) {
  for (auto& eq : equations) {
    for (const auto& [lambda, value] : known) substitute(eq, lambda, value);
  }
  // Each pass solves one equation that has a single unknown left.
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (auto& eq : equations) {
      std::erase_if(eq.coefficients, [](const auto& kv) { return kv.second.is_zero(); });
      if (eq.coefficients.size() != 1 || !eq.coefficients.begin()->second.is_unit()) continue;
      auto [lambda, coeff] = *eq.coefficients.begin();
      ExpPoly value = -eq.constant * coeff.inverse();
      known.emplace(lambda, value);
      for (auto& other : equations) substitute(other, lambda, value);
      progressed = true;
      break;
    }
  }
  for (const auto& eq : equations) {
    if (!eq.coefficients.empty()) {
      throw InconsistentSystem("could not isolate unknowns in " + eq.origin);
    }
    if (!eq.constant.is_zero()) {
      throw InconsistentSystem("inconsistent condition " + eq.origin + ": residual " + eq.constant.to_string());
    }
  }
  return known;
}

inline std::string pattern_name(const SetPartition& pi, const SetPartition& pi_prime) {
  return "D(" + pi.to_string() + ", " + pi_prime.to_string() + ")";
}

}  // namespace detail

/// Checks that sum_sigma c(sigma) phi_sigma(a_1..a_k, b_{k+1}..b_n) is the
/// zero moment polynomial for every split 1 <= k < n, with generic (not
/// centered) arguments.
inline bool vanishes_on_mixed_arguments(const CumulantTable& table, MomentEngine& engine = default_engine()) {
  const int n = table.order();
  auto perms = all_permutations(n);
  for (int k = 1; k < n; ++k) {
    std::vector<Letter> slots;
    for (int i = 1; i <= n; ++i) slots.push_back(Letter::single(i <= k ? Family::A : Family::B, i));
    MomentPolynomial total;
    for (const auto& sigma : perms) total += table.at(cycle_type(sigma)) * engine.phi_sigma(sigma, slots);
    if (!total.is_zero()) return false;
  }
  return true;
}

/// The unique conjugation-invariant cumulant of order n (2 <= n <= 6) with
/// c_n = 1. The singleton-free coefficients come from D(pi, pi') = 0 over
/// every mixed pattern of singleton-free partitions; the rest from
/// extend_with_singletons. With `verify`, the full vanishing property is
/// re-checked on generic arguments.
inline CumulantTable solve_cumulant(int n, bool verify = false, MomentEngine& engine = default_engine()) {
  if (n < 2 || n > 6) throw std::invalid_argument("solve_cumulant: order must lie in 2..6, got " + std::to_string(n));
  std::vector<detail::AffineEquation> equations;
  for (int k = 2; k + 2 <= n; ++k) {
    for (const auto& pi : set_partitions_without_singletons(range_inclusive(1, k))) {
      for (const auto& pi_prime : set_partitions_without_singletons(range_inclusive(k + 1, n))) {
        equations.push_back({engine.D_coefficient(pi, pi_prime), ExpPoly(), detail::pattern_name(pi, pi_prime)});
      }
    }
  }
  std::map<IntegerPartition, ExpPoly> known{{IntegerPartition{n}, ExpPoly(1)}};
  auto solved = detail::solve_affine(std::move(equations), std::move(known));
  for (const auto& lambda : integer_partitions(n)) {
    if (lambda.has_no_singletons() && !solved.contains(lambda)) {
      throw InconsistentSystem("c_" + lambda.to_string() + " is not determined by the vanishing conditions");
    }
  }
  CumulantTable table = extend_with_singletons(n, solved);
  if (verify && !vanishes_on_mixed_arguments(table, engine)) {
    throw InconsistentSystem("order " + std::to_string(n) + " table does not vanish on mixed arguments");
  }
  return table;
}

/// The four order-7 vanishing conditions that single out c_52, c_43 and,
/// in two incompatible ways, c_322.
struct Order7Obstruction {
  LinearForm d_pair_quintuple;     // D({12}, {34567})
  LinearForm d_pair_pair_triple;   // D({12}, {34}{567})
  LinearForm d_triple_quadruple;   // D({123}, {4567})
  LinearForm d_triple_pair_pair;   // D({123}, {45}{67})
  ExpPoly c52;
  ExpPoly c43;
  ExpPoly c322_from_pair_triple;   // from D({12}, {34}{567}) = 0
  ExpPoly c322_from_pair_pair;     // from D({123}, {45}{67}) = 0
  ExpPoly difference;              // first minus second
};

namespace detail {

/// Solves form + 0 = 0 for `target`, given values of the other unknowns.
inline ExpPoly solve_for(const LinearForm& form, const IntegerPartition& target,
                         const std::map<IntegerPartition, ExpPoly>& known) {
  ExpPoly rest;
  std::optional<ExpPoly> pivot;
  for (const auto& [lambda, coeff] : form) {
    if (lambda == target) {
      pivot = coeff;
    } else {
      auto it = known.find(lambda);
      if (it == known.end()) throw InconsistentSystem("unknown c_" + lambda.to_string() + " while solving for c_" + target.to_string());
      rest += coeff * it->second;
    }
  }
  if (!pivot || !pivot->is_unit()) throw InconsistentSystem("c_" + target.to_string() + " cannot be isolated");
  return -rest * pivot->inverse();
}

}  // namespace detail

inline Order7Obstruction order7_analysis(MomentEngine& engine = default_engine()) {
  Order7Obstruction r;
  r.d_pair_quintuple = engine.D_coefficient(SetPartition{{1, 2}}, SetPartition{{3, 4, 5, 6, 7}});
  r.d_pair_pair_triple = engine.D_coefficient(SetPartition{{1, 2}}, SetPartition{{3, 4}, {5, 6, 7}});
  r.d_triple_quadruple = engine.D_coefficient(SetPartition{{1, 2, 3}}, SetPartition{{4, 5, 6, 7}});
  r.d_triple_pair_pair = engine.D_coefficient(SetPartition{{1, 2, 3}}, SetPartition{{4, 5}, {6, 7}});
  std::map<IntegerPartition, ExpPoly> known{{IntegerPartition{7}, ExpPoly(1)}};
  r.c52 = detail::solve_for(r.d_pair_quintuple, {5, 2}, known);
  known.emplace(IntegerPartition{5, 2}, r.c52);
  r.c43 = detail::solve_for(r.d_triple_quadruple, {4, 3}, known);
  known.emplace(IntegerPartition{4, 3}, r.c43);
  r.c322_from_pair_triple = detail::solve_for(r.d_pair_pair_triple, {3, 2, 2}, known);
  r.c322_from_pair_pair = detail::solve_for(r.d_triple_pair_pair, {3, 2, 2}, known);
  r.difference = r.c322_from_pair_triple - r.c322_from_pair_pair;
  return r;
}

/// Difference between the two values of c_322 forced at order 7; it is zero
/// only at t = 0 and in the limit t -> inf.
inline ExpPoly order7_obstruction(MomentEngine& engine = default_engine()) { return order7_analysis(engine).difference; }

}  // namespace liberty
