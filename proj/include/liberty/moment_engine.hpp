#pragma once

// Exact mixed moments of two commutative families A and B, where B is
// conjugated by a free unitary Brownian motion u_t that is free from both.
//
// For letters x_1..x_{2n} (alternating families) put
//   f(x_1, ..., x_{2n}) = e^{n t} tau(x_1 u x_2 u* ... x_{2n-1} u x_{2n} u*).
// Its time derivative is a sum of products of f on strictly shorter words, so
// every f is an exponential polynomial obtained by exact integration, starting
// from the t = 0 value tau(x_1 ... x_{2n}).

#include <liberty/combinatorics.hpp>
#include <liberty/common.hpp>
#include <liberty/exp_poly.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace liberty {

enum class Family : unsigned char { A = 0, B = 1 };

inline char family_char(Family f) { return f == Family::A ? 'a' : 'b'; }
inline Family other(Family f) { return f == Family::A ? Family::B : Family::A; }

struct Generator {
  Family family = Family::A;
  int index = 1;
  auto operator<=>(const Generator&) const = default;
};

/// A product of generators from one family. The empty letter is the identity.
class Letter {
 public:
  Letter() = default;
  Letter(Family family, std::vector<int> generators) : family_(family), generators_(std::move(generators)) {
    std::sort(generators_.begin(), generators_.end());
  }
  static Letter single(Family family, int index) { return Letter(family, {index}); }
  static Letter identity(Family family) { return Letter(family, {}); }

  Family family() const { return family_; }
  const std::vector<int>& generators() const { return generators_; }
  bool is_identity() const { return generators_.empty(); }

  /// Product of two letters of the same family (multiset union).
  Letter times(const Letter& other) const {
    if (other.family_ != family_) throw std::invalid_argument("Letter::times: families differ");
    std::vector<int> g;
    g.reserve(generators_.size() + other.generators_.size());
    std::merge(generators_.begin(), generators_.end(), other.generators_.begin(), other.generators_.end(),
               std::back_inserter(g));
    Letter out;
    out.family_ = family_;
    out.generators_ = std::move(g);
    return out;
  }

  std::string to_string() const {
    if (generators_.empty()) return "1";
    std::string out;
    for (int g : generators_) {
      out += family_char(family_);
      out += std::to_string(g);
    }
    return out;
  }

  auto operator<=>(const Letter&) const = default;

 private:
  Family family_ = Family::A;
  std::vector<int> generators_;
};

/// A cyclic word in the two families: empty (the identity), a single letter,
/// or an even number of non-identity letters alternating between A and B.
class Word {
 public:
  Word() = default;

  /// Drops identity letters and merges cyclically adjacent letters of the
  /// same family. This is the identity padding rule: u_t 1 u_t* = 1.
  static Word from_letters(std::vector<Letter> letters) {
    std::vector<Letter> kept;
    for (auto& l : letters) {
      if (l.is_identity()) continue;
      if (!kept.empty() && kept.back().family() == l.family()) {
        kept.back() = kept.back().times(l);
      } else {
        kept.push_back(std::move(l));
      }
    }
    while (kept.size() > 1 && kept.front().family() == kept.back().family()) {
      kept.front() = kept.back().times(kept.front());
      kept.pop_back();
    }
    Word w;
    w.letters_ = std::move(kept);
    return w;
  }

  /// Strict form x_1 u x_2 u* ...: letter i must belong to family A for odd i
  /// and B for even i, identity letters being allowed anywhere as padding.
  static Word alternating(const std::vector<Letter>& letters) {
    if (letters.size() % 2 != 0) throw std::invalid_argument("Word::alternating: odd number of letters");
    for (std::size_t i = 0; i < letters.size(); ++i) {
      Family expected = i % 2 == 0 ? Family::A : Family::B;
      if (!letters[i].is_identity() && letters[i].family() != expected) {
        throw std::invalid_argument("Word::alternating: letter " + std::to_string(i + 1) + " (" +
                                    letters[i].to_string() + ") breaks the A/B alternation");
      }
    }
    return from_letters(letters);
  }

  /// Parses "a1 b1 a2 b1". Tokens are products of generators of one family,
  /// e.g. "a1a2"; "1" is the identity. Adjacent tokens of the same family are
  /// separated by an implicit identity letter of the other family.
  static Word parse(const std::string& spec) {
    std::istringstream in(spec);
    std::string token;
    std::vector<Letter> letters;
    while (in >> token) {
      if (token == "1") continue;
      std::vector<int> gens;
      std::optional<Family> family;
      std::size_t i = 0;
      while (i < token.size()) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(token[i])));
        if (c != 'a' && c != 'b') throw std::invalid_argument("Word::parse: bad token '" + token + "'");
        Family f = c == 'a' ? Family::A : Family::B;
        if (family && *family != f) {
          throw std::invalid_argument("Word::parse: token '" + token + "' mixes families");
        }
        family = f;
        std::size_t j = i + 1;
        while (j < token.size() && std::isdigit(static_cast<unsigned char>(token[j]))) ++j;
        if (j == i + 1) throw std::invalid_argument("Word::parse: missing generator index in '" + token + "'");
        int index = std::stoi(token.substr(i + 1, j - i - 1));
        if (index < 1) throw std::invalid_argument("Word::parse: generator indices start at 1");
        gens.push_back(index);
        i = j;
      }
      letters.emplace_back(*family, std::move(gens));
    }
    return from_letters(std::move(letters));
  }

  const std::vector<Letter>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }
  std::size_t half_length() const { return letters_.size() / 2; }

  Word rotated(std::size_t shift) const {
    Word w = *this;
    if (!letters_.empty()) std::rotate(w.letters_.begin(), w.letters_.begin() + static_cast<std::ptrdiff_t>(shift % letters_.size()), w.letters_.end());
    return w;
  }

  /// Exchanges the roles of A and B.
  Word swapped_families() const {
    Word w;
    for (const auto& l : letters_) w.letters_.emplace_back(other(l.family()), l.generators());
    return w;
  }

  std::string to_string() const {
    if (letters_.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i > 0) out += " ";
      out += letters_[i].to_string();
    }
    return out;
  }

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

/// phi(product of the listed generators). Generators normally share a family;
/// symbols mixing both families only arise from a joint initial law.
class MomentSymbol {
 public:
  MomentSymbol() = default;
  explicit MomentSymbol(std::vector<Generator> generators) : generators_(std::move(generators)) {
    std::sort(generators_.begin(), generators_.end());
  }
  static MomentSymbol of(const Letter& letter) {
    std::vector<Generator> g;
    for (int i : letter.generators()) g.push_back({letter.family(), i});
    return MomentSymbol(std::move(g));
  }

  const std::vector<Generator>& generators() const { return generators_; }
  bool empty() const { return generators_.empty(); }
  bool is_mixed() const {
    return !generators_.empty() && generators_.front().family != generators_.back().family;
  }
  Family family() const { return generators_.empty() ? Family::A : generators_.front().family; }

  /// "a1a2", "b3", "a1b2" (mixed).
  std::string content() const {
    std::string out;
    for (const auto& g : generators_) {
      out += family_char(g.family);
      out += std::to_string(g.index);
    }
    return out;
  }
  std::string to_string() const { return "tau(" + content() + ")"; }

  auto operator<=>(const MomentSymbol&) const = default;

 private:
  std::vector<Generator> generators_;
};

/// A product of moment symbols, kept sorted; identity symbols are dropped.
using Monomial = std::vector<MomentSymbol>;

inline Monomial monomial_product(const Monomial& x, const Monomial& y) {
  Monomial out;
  out.reserve(x.size() + y.size());
  std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

inline Monomial make_monomial(std::vector<MomentSymbol> symbols) {
  std::erase_if(symbols, [](const MomentSymbol& s) { return s.empty(); });
  std::sort(symbols.begin(), symbols.end());
  return symbols;
}

/// Formal linear combination of monomials in the moments, with exponential
/// polynomial coefficients.
class MomentPolynomial {
 public:
  using TermMap = std::map<Monomial, ExpPoly>;

  MomentPolynomial() = default;
  static MomentPolynomial constant(const ExpPoly& c) { return term(Monomial{}, c); }
  static MomentPolynomial term(Monomial m, const ExpPoly& c) {
    MomentPolynomial p;
    if (!c.is_zero()) p.terms_.emplace(make_monomial(std::move(m)), c);
    return p;
  }
  static MomentPolynomial symbol(const MomentSymbol& s) { return term(Monomial{s}, ExpPoly(1)); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  ExpPoly coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ExpPoly() : it->second;
  }

  MomentPolynomial& operator+=(const MomentPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MomentPolynomial& operator-=(const MomentPolynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend MomentPolynomial operator+(MomentPolynomial x, const MomentPolynomial& y) { return x += y; }
  friend MomentPolynomial operator-(MomentPolynomial x, const MomentPolynomial& y) { return x -= y; }

  friend MomentPolynomial operator*(const MomentPolynomial& x, const MomentPolynomial& y) {
    MomentPolynomial out;
    for (const auto& [mx, cx] : x.terms_) {
      for (const auto& [my, cy] : y.terms_) out.add_term(monomial_product(mx, my), cx * cy);
    }
    return out;
  }
  friend MomentPolynomial operator*(const ExpPoly& s, const MomentPolynomial& x) {
    MomentPolynomial out;
    if (s.is_zero()) return out;
    for (const auto& [m, c] : x.terms_) out.add_term(m, s * c);
    return out;
  }
  MomentPolynomial& operator*=(const MomentPolynomial& o) { return *this = *this * o; }

  friend bool operator==(const MomentPolynomial&, const MomentPolynomial&) = default;

  /// Termwise antiderivative with F(0) = initial.
  static MomentPolynomial integrate_from_zero(const MomentPolynomial& derivative, const MomentPolynomial& initial) {
    MomentPolynomial out;
    for (const auto& [m, c] : derivative.terms_) out.add_term(m, c.integrate_from_zero(0) + initial.coefficient(m));
    for (const auto& [m, c] : initial.terms_) {
      if (!derivative.terms_.contains(m)) out.add_term(m, c);
    }
    return out;
  }

  /// Replaces every moment symbol by a number; the result depends on t only.
  ExpPoly substitute(const std::function<Rational(const MomentSymbol&)>& moment) const {
    ExpPoly out;
    std::map<MomentSymbol, Rational> cache;
    for (const auto& [m, c] : terms_) {
      Rational prod = 1;
      for (const auto& s : m) {
        auto it = cache.find(s);
        if (it == cache.end()) it = cache.emplace(s, moment(s)).first;
        prod *= it->second;
        if (prod == 0) break;
      }
      if (prod != 0) out += ExpPoly(prod) * c;
    }
    return out;
  }

  /// Limit of every coefficient as t -> inf.
  std::map<Monomial, Rational> limit_at_infinity() const {
    std::map<Monomial, Rational> out;
    for (const auto& [m, c] : terms_) {
      Rational v = c.limit_at_infinity();
      if (v != 0) out.emplace(m, v);
    }
    return out;
  }

  static std::string monomial_string(const Monomial& m) {
    if (m.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i > 0) out += " ";
      out += m[i].to_string();
    }
    return out;
  }

  /// One "coefficient : monomial" line per term.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      out += c.to_factored_string() + " : " + monomial_string(m) + "\n";
    }
    out.pop_back();
    return out;
  }

  friend void to_json(nlohmann::json& j, const MomentPolynomial& p) {
    j = nlohmann::json::array();
    for (const auto& [m, c] : p.terms_) {
      nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array(), mixed = nlohmann::json::array();
      for (const auto& s : m) {
        if (s.is_mixed()) {
          mixed.push_back(s.content());
        } else {
          (s.family() == Family::A ? a : b).push_back(s.content());
        }
      }
      nlohmann::json row;
      row["A_moments"] = a;
      row["B_moments"] = b;
      if (!mixed.empty()) row["AB_moments"] = mixed;
      row["coeff"] = c;
      j.push_back(row);
    }
  }

 private:
  void add_term(const Monomial& m, const ExpPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  TermMap terms_;
};

/// Law of the letters at t = 0: the two families independent (the t-free
/// setting), or an arbitrary joint law in which A and B commute.
enum class InitialCondition { independent, joint };

/// Coefficients of a linear expression in the unknowns c_lambda.
using LinearForm = std::map<IntegerPartition, ExpPoly>;

inline ExpPoly evaluate_form(const LinearForm& form, const std::map<IntegerPartition, ExpPoly>& table) {
  ExpPoly out;
  for (const auto& [lambda, coeff] : form) {
    auto it = table.find(lambda);
    if (it == table.end()) throw std::out_of_range("evaluate_form: table has no entry for " + lambda.to_string());
    out += coeff * it->second;
  }
  return out;
}

/// Memoized solver for the moment recursion. Safe to share between threads.
class MomentEngine {
 public:
  explicit MomentEngine(InitialCondition initial = InitialCondition::independent) : initial_(initial) {}

  MomentEngine(const MomentEngine&) = delete;
  MomentEngine& operator=(const MomentEngine&) = delete;

  InitialCondition initial_condition() const { return initial_; }

  /// tau(x_1 u x_2 u* ... x_{2n} u*) as an exact moment polynomial.
  MomentPolynomial mixed_moment(const Word& w) {
    if (w.is_identity()) return MomentPolynomial::constant(1);
    const auto& letters = w.letters();
    if (letters.size() == 1) return MomentPolynomial::symbol(MomentSymbol::of(letters.front()));
    return ExpPoly::exponential(-static_cast<long>(w.half_length())) * scaled(letters);
  }

  /// e^{n t} times the moment; this is the quantity the recursion integrates.
  MomentPolynomial scaled_moment(const Word& w) {
    if (w.is_identity()) return MomentPolynomial::constant(1);
    return scaled(w.letters());
  }

  /// Product over the cycles (i, sigma(i), sigma^2(i), ...) of the moment of
  /// the product of the slot letters along the cycle.
  MomentPolynomial phi_sigma(const Permutation& sigma, std::span<const Letter> slots) {
    check_slots(sigma, slots);
    MomentPolynomial out = MomentPolynomial::constant(1);
    for (const auto& cycle : sigma.cycles()) out *= mixed_moment(cycle_word(cycle, slots));
    return out;
  }

  /// Coefficient of phi_pi(a) phi_pi'(b) in phi_sigma(a_1.., b_1..), where the
  /// A slots are the ground set of pi, the B slots that of pi', and slot i
  /// carries its own formal generator. Zero unless both partitions refine the
  /// cycle partition of sigma.
  ExpPoly expansion_coefficient(const Permutation& sigma, const SetPartition& pi, const SetPartition& pi_prime) {
    const int n = sigma.size();
    std::vector<Letter> slots = slot_letters(n, pi, pi_prime);
    SetPartition cycles = SetPartition::of_cycles(sigma);
    if (!pi.refines(cycles) || !pi_prime.refines(cycles)) return ExpPoly();
    // The target monomial factorizes over the cycles of sigma, and each cycle
    // only involves its own generators.
    ExpPoly out = 1;
    for (const auto& cycle : sigma.cycles()) {
      Monomial target;
      for (const auto* part : {&pi, &pi_prime}) {
        for (const auto& block : part->blocks()) {
          if (std::find(cycle.begin(), cycle.end(), block.front()) == cycle.end()) continue;
          std::vector<Generator> gens;
          for (int x : block) gens.push_back({slots[static_cast<std::size_t>(x - 1)].family(), x});
          target.push_back(MomentSymbol(std::move(gens)));
        }
      }
      target = make_monomial(std::move(target));
      ExpPoly c = mixed_moment(cycle_word(cycle, slots)).coefficient(target);
      if (c.is_zero()) return ExpPoly();
      out *= c;
    }
    return out;
  }

  /// sum over sigma of c(sigma) C(sigma, pi, pi'), as a linear form in the
  /// conjugation-invariant unknowns c_lambda. With `prune` false every
  /// permutation is expanded in full, which is slower but assumption-free.
  LinearForm D_coefficient(const SetPartition& pi, const SetPartition& pi_prime, bool prune = true) {
    std::vector<int> ground = pi.ground_set();
    std::vector<int> other_ground = pi_prime.ground_set();
    ground.insert(ground.end(), other_ground.begin(), other_ground.end());
    std::sort(ground.begin(), ground.end());
    const int n = static_cast<int>(ground.size());
    if (ground != range_inclusive(1, n)) {
      throw std::invalid_argument("D_coefficient: the two partitions must cover 1..n disjointly");
    }
    std::vector<Permutation> perms = all_permutations(n);
    std::vector<Letter> slots = slot_letters(n, pi, pi_prime);
    Monomial full_target = target_monomial(pi, pi_prime, slots);

    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(perms.size()));
    std::vector<LinearForm> partial(workers);
    auto job = [&](unsigned w) {
      for (std::size_t i = w; i < perms.size(); i += workers) {
        const auto& sigma = perms[i];
        ExpPoly c = prune ? expansion_coefficient(sigma, pi, pi_prime)
                          : phi_sigma(sigma, slots).coefficient(full_target);
        if (!c.is_zero()) partial[w][cycle_type(sigma)] += c;
      }
    };
    run_parallel(workers, job);
    LinearForm out;
    for (auto& p : partial) {
      for (auto& [lambda, c] : p) out[lambda] += c;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
  }

  ExpPoly D_coefficient(const std::map<IntegerPartition, ExpPoly>& table, const SetPartition& pi,
                        const SetPartition& pi_prime) {
    return evaluate_form(D_coefficient(pi, pi_prime), table);
  }

  std::size_t memo_size() const {
    std::shared_lock lock(mutex_);
    return memo_.size();
  }

  /// Slot i gets generator i of family A if i lies in pi's ground set, of B otherwise.
  static std::vector<Letter> slot_letters(int n, const SetPartition& pi, const SetPartition& pi_prime) {
    std::vector<Letter> slots(static_cast<std::size_t>(n));
    for (int x : pi.ground_set()) slots.at(static_cast<std::size_t>(x - 1)) = Letter::single(Family::A, x);
    for (int x : pi_prime.ground_set()) slots.at(static_cast<std::size_t>(x - 1)) = Letter::single(Family::B, x);
    return slots;
  }

  static Monomial target_monomial(const SetPartition& pi, const SetPartition& pi_prime, const std::vector<Letter>& slots) {
    Monomial target;
    for (const auto* part : {&pi, &pi_prime}) {
      for (const auto& block : part->blocks()) {
        std::vector<Generator> gens;
        for (int x : block) gens.push_back({slots[static_cast<std::size_t>(x - 1)].family(), x});
        target.push_back(MomentSymbol(std::move(gens)));
      }
    }
    return make_monomial(std::move(target));
  }

  static Word cycle_word(const std::vector<int>& cycle, std::span<const Letter> slots) {
    std::vector<Letter> letters;
    letters.reserve(cycle.size());
    for (int i : cycle) letters.push_back(slots[static_cast<std::size_t>(i - 1)]);
    return Word::from_letters(std::move(letters));
  }

 private:
  using Letters = std::vector<Letter>;

  struct LettersHash {
    std::size_t operator()(const Letters& w) const {
      std::size_t h = 0x9e3779b97f4a7c15ull;
      for (const auto& l : w) {
        h ^= static_cast<std::size_t>(l.family()) + 0x9e3779b9 + (h << 6) + (h >> 2);
        for (int g : l.generators()) h ^= std::hash<int>{}(g) + 0x9e3779b9 + (h << 6) + (h >> 2);
        h ^= 0xabcdef + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  static void check_slots(const Permutation& sigma, std::span<const Letter> slots) {
    if (static_cast<int>(slots.size()) != sigma.size()) {
      throw std::invalid_argument("phi_sigma: " + std::to_string(slots.size()) + " slots for a permutation of " +
                                  std::to_string(sigma.size()) + " points");
    }
  }

  template <class Job>
  static void run_parallel(unsigned workers, Job&& job) {
    if (workers <= 1) {
      job(0u);
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& th : pool) th.join();
  }

  /// Minimal rotation. Every rotation has the same value: even rotations by
  /// traciality, odd ones because (u, u*) and (u*, u) have the same law.
  static Letters canonical(const Letters& w) {
    Letters best = w;
    Letters cur = w;
    for (std::size_t r = 1; r < w.size(); ++r) {
      std::rotate(cur.begin(), cur.begin() + 1, cur.end());
      if (cur < best) best = cur;
    }
    return best;
  }

  MomentPolynomial initial_value(const Letters& w) const {
    if (initial_ == InitialCondition::joint) {
      std::vector<Generator> all;
      for (const auto& l : w) {
        for (int g : l.generators()) all.push_back({l.family(), g});
      }
      return MomentPolynomial::symbol(MomentSymbol(std::move(all)));
    }
    Letter a = Letter::identity(Family::A), b = Letter::identity(Family::B);
    for (const auto& l : w) {
      if (l.family() == Family::A) {
        a = a.times(l);
      } else {
        b = b.times(l);
      }
    }
    return MomentPolynomial::term(Monomial{MomentSymbol::of(a), MomentSymbol::of(b)}, 1);
  }

  /// f on an alternating word of length >= 2, or tau of a single letter.
  MomentPolynomial scaled(const Letters& w) {
    if (w.size() == 1) return MomentPolynomial::symbol(MomentSymbol::of(w.front()));
    Letters key = canonical(w);
    {
      std::shared_lock lock(mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    MomentPolynomial value = solve(key);
    std::unique_lock lock(mutex_);
    return memo_.try_emplace(std::move(key), std::move(value)).first->second;
  }

  MomentPolynomial solve(const Letters& w) {
    const std::size_t N = w.size();
    MomentPolynomial same_parity, cross_parity;
    // 1-based k < l as in the recursion; letters are w[k-1].
    for (std::size_t k = 1; k < N; ++k) {
      for (std::size_t l = k + 1; l <= N; ++l) {
        if ((l - k) % 2 == 0) {
          Letters outer(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
          outer.insert(outer.end(), w.begin() + static_cast<std::ptrdiff_t>(l), w.end());
          Letters inner(w.begin() + static_cast<std::ptrdiff_t>(k), w.begin() + static_cast<std::ptrdiff_t>(l));
          same_parity += scaled(outer) * scaled(inner);
        } else {
          Letters inner;
          if (l == k + 1) {
            inner = {w[k]};
          } else {
            inner.push_back(w[l - 1].times(w[k]));
            inner.insert(inner.end(), w.begin() + static_cast<std::ptrdiff_t>(k + 1),
                         w.begin() + static_cast<std::ptrdiff_t>(l - 1));
          }
          Letters outer;
          if (l < N) {
            outer.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k - 1));
            outer.push_back(w[k - 1].times(w[l]));
            outer.insert(outer.end(), w.begin() + static_cast<std::ptrdiff_t>(l + 1), w.end());
          } else if (k == 1) {
            outer = {w[0]};
          } else {
            outer.push_back(w[k - 1].times(w[0]));
            outer.insert(outer.end(), w.begin() + 1, w.begin() + static_cast<std::ptrdiff_t>(k - 1));
          }
          cross_parity += scaled(outer) * scaled(inner);
        }
      }
    }
    MomentPolynomial derivative = ExpPoly::exponential(1) * cross_parity - same_parity;
    return MomentPolynomial::integrate_from_zero(derivative, initial_value(w));
  }

  InitialCondition initial_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<Letters, MomentPolynomial, LettersHash> memo_;
};

/// Process-wide engine for the t-free (independent) setting.
inline MomentEngine& default_engine() {
  static MomentEngine engine(InitialCondition::independent);
  return engine;
}

inline MomentPolynomial mixed_moment(const Word& w) { return default_engine().mixed_moment(w); }

inline MomentPolynomial phi_sigma(const Permutation& sigma, std::span<const Letter> slots) {
  return default_engine().phi_sigma(sigma, slots);
}

inline LinearForm D_coefficient(const SetPartition& pi, const SetPartition& pi_prime) {
  return default_engine().D_coefficient(pi, pi_prime);
}

inline ExpPoly D_coefficient(const std::map<IntegerPartition, ExpPoly>& table, const SetPartition& pi,
                             const SetPartition& pi_prime) {
  return default_engine().D_coefficient(table, pi, pi_prime);
}

/// g_{2n}(t) = e^{2nt} tau((a u b u*)^{2n}) for independent symmetric
/// Bernoulli a, b, from g_2 = 1 and g_{2n}' = -2n sum_{i=1}^{n-1} g_{2(n-i)} g_{2i},
/// g_{2n}(0) = 1. Entry n-1 holds g_{2n}.
inline std::vector<ExpPoly> bernoulli_g(int n_max) {
  if (n_max < 1) throw std::invalid_argument("bernoulli_g: n_max must be >= 1");
  std::vector<ExpPoly> g;
  g.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    ExpPoly rhs;
    for (int i = 1; i <= n - 1; ++i) rhs += g[static_cast<std::size_t>(n - i - 1)] * g[static_cast<std::size_t>(i - 1)];
    rhs *= ExpPoly(-2L * n);
    g.push_back(rhs.integrate_from_zero(1));
  }
  return g;
}

}  // namespace liberty
