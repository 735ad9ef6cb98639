#pragma once

// Permutations, set partitions and integer partitions. The public API is
// 1-based (points are 1..n); storage is 0-based.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace liberty {

class IntegerPartition {
 public:
  IntegerPartition() = default;
  explicit IntegerPartition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (int p : parts_) {
      if (p <= 0) throw std::invalid_argument("IntegerPartition: parts must be positive");
    }
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
  }
  IntegerPartition(std::initializer_list<int> parts) : IntegerPartition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  int size() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  int part(std::size_t i) const { return parts_.at(i - 1); }
  std::size_t count(int value) const {
    return static_cast<std::size_t>(std::count(parts_.begin(), parts_.end(), value));
  }
  /// No part equal to 1.
  bool has_no_singletons() const { return parts_.empty() || parts_.back() >= 2; }

  /// "322" when every part is a single digit, "10,2" otherwise.
  std::string to_string() const {
    bool compact = std::all_of(parts_.begin(), parts_.end(), [](int p) { return p < 10; });
    std::string out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (!compact && i > 0) out += ",";
      out += std::to_string(parts_[i]);
    }
    return out;
  }

  auto operator<=>(const IntegerPartition&) const = default;

 private:
  std::vector<int> parts_;
};

/// mu + delta_i: increment the i-th part (1-based), or append a part 1
/// when i = length + 1, then re-sort.
inline IntegerPartition add_delta(const IntegerPartition& mu, std::size_t i) {
  if (i < 1 || i > mu.length() + 1) {
    throw std::out_of_range("add_delta: index " + std::to_string(i) + " outside 1.." +
                            std::to_string(mu.length() + 1));
  }
  std::vector<int> parts = mu.parts();
  if (i == mu.length() + 1) {
    parts.push_back(1);
  } else {
    parts[i - 1] += 1;
  }
  return IntegerPartition(std::move(parts));
}

/// All partitions of n in reverse lexicographic order: (n), (n-1,1), ...
inline std::vector<IntegerPartition> integer_partitions(int n) {
  std::vector<IntegerPartition> out;
  std::vector<int> current;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.emplace_back(current);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      current.push_back(p);
      self(self, remaining - p, p);
      current.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n) {
    Permutation p;
    p.images_.resize(static_cast<std::size_t>(n));
    std::iota(p.images_.begin(), p.images_.end(), 0);
    return p;
  }

  /// images[i-1] = sigma(i), values in 1..n.
  static Permutation from_images(const std::vector<int>& images) {
    Permutation p;
    p.images_.reserve(images.size());
    for (int v : images) p.images_.push_back(v - 1);
    p.validate();
    return p;
  }

  /// Cycle notation on 1..n; fixed points may be omitted.
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    Permutation p = identity(n);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& c : cycles) {
      for (std::size_t k = 0; k < c.size(); ++k) {
        int from = c[k] - 1;
        int to = c[(k + 1) % c.size()] - 1;
        if (from < 0 || from >= n || seen[static_cast<std::size_t>(from)]) {
          throw std::invalid_argument("Permutation::from_cycles: invalid or repeated point");
        }
        seen[static_cast<std::size_t>(from)] = true;
        p.images_[static_cast<std::size_t>(from)] = to;
      }
    }
    return p;
  }

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_.at(static_cast<std::size_t>(i - 1)) + 1; }

  /// Cycles (1-based), each starting at its minimum, ordered by minimum.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(images_.size(), false);
    for (std::size_t start = 0; start < images_.size(); ++start) {
      if (seen[start]) continue;
      std::vector<int> cycle;
      for (std::size_t i = start; !seen[i]; i = static_cast<std::size_t>(images_[i])) {
        seen[i] = true;
        cycle.push_back(static_cast<int>(i) + 1);
      }
      out.push_back(std::move(cycle));
    }
    return out;
  }

  Permutation inverse() const {
    Permutation p;
    p.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) p.images_[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    return p;
  }

  /// (this o other)(i) = this(other(i))
  Permutation compose(const Permutation& other) const {
    if (other.size() != size()) throw std::invalid_argument("Permutation::compose: size mismatch");
    Permutation p;
    p.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
      p.images_[i] = images_[static_cast<std::size_t>(other.images_[i])];
    }
    return p;
  }

  /// rho sigma rho^{-1}
  Permutation conjugate_by(const Permutation& rho) const { return rho.compose(*this).compose(rho.inverse()); }

  auto operator<=>(const Permutation&) const = default;

 private:
  void validate() const {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
      if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)]) {
        throw std::invalid_argument("Permutation: images are not a bijection of 1..n");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  std::vector<int> images_;
};

inline IntegerPartition cycle_type(const Permutation& sigma) {
  std::vector<int> lengths;
  for (const auto& c : sigma.cycles()) lengths.push_back(static_cast<int>(c.size()));
  return IntegerPartition(std::move(lengths));
}

/// All n! permutations of 1..n in lexicographic order of their image lists.
inline std::vector<Permutation> all_permutations(int n) {
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 1);
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation::from_images(images));
  } while (std::next_permutation(images.begin(), images.end()));
  return out;
}

/// Permutations of 1..|lambda| with cycle type lambda. The smallest unused
/// point always opens the next cycle, and the cycle length is chosen among the
/// distinct remaining lengths, so every permutation is produced exactly once.
inline std::vector<Permutation> enumerate_by_cycle_type(const IntegerPartition& lambda) {
  const int n = lambda.size();
  std::vector<Permutation> out;
  std::vector<std::vector<int>> cycles;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<int> remaining = lambda.parts();

  auto fill = [&](auto&& self, int placed) -> void {
    if (placed == n) {
      out.push_back(Permutation::from_cycles(n, cycles));
      return;
    }
    int lead = 1;
    while (used[static_cast<std::size_t>(lead - 1)]) ++lead;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      if (r > 0 && remaining[r] == remaining[r - 1]) continue;
      const int len = remaining[r];
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(r));
      used[static_cast<std::size_t>(lead - 1)] = true;
      std::vector<int> cycle{lead};
      auto extend = [&](auto&& ext) -> void {
        if (static_cast<int>(cycle.size()) == len) {
          cycles.push_back(cycle);
          self(self, placed + len);
          cycles.pop_back();
          return;
        }
        for (int p = lead + 1; p <= n; ++p) {
          if (used[static_cast<std::size_t>(p - 1)]) continue;
          used[static_cast<std::size_t>(p - 1)] = true;
          cycle.push_back(p);
          ext(ext);
          cycle.pop_back();
          used[static_cast<std::size_t>(p - 1)] = false;
        }
      };
      extend(extend);
      used[static_cast<std::size_t>(lead - 1)] = false;
      remaining.insert(remaining.begin() + static_cast<std::ptrdiff_t>(r), len);
    }
  };
  fill(fill, 0);
  return out;
}

/// n! / prod_j (j^{m_j} m_j!)
inline long long count_by_cycle_type(const IntegerPartition& lambda) {
  long long num = 1;
  for (int k = 2; k <= lambda.size(); ++k) num *= k;
  long long den = 1;
  for (int value = 1; value <= lambda.size(); ++value) {
    auto m = static_cast<long long>(lambda.count(value));
    for (long long j = 0; j < m; ++j) den *= value * (j + 1);
  }
  return num / den;
}

/// A set partition of a finite set of positive integers (slot labels).
/// Blocks are sorted internally and ordered by their minimum.
class SetPartition {
 public:
  SetPartition() = default;
  explicit SetPartition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
    std::set<int> seen;
    for (auto& b : blocks_) {
      if (b.empty()) throw std::invalid_argument("SetPartition: empty block");
      std::sort(b.begin(), b.end());
      for (int x : b) {
        if (!seen.insert(x).second) throw std::invalid_argument("SetPartition: blocks overlap");
      }
    }
    std::sort(blocks_.begin(), blocks_.end());
  }
  SetPartition(std::initializer_list<std::vector<int>> blocks)
      : SetPartition(std::vector<std::vector<int>>(blocks)) {}

  /// The partition of 1..n into the supports of the cycles of sigma.
  static SetPartition of_cycles(const Permutation& sigma) { return SetPartition(sigma.cycles()); }

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  std::vector<int> ground_set() const {
    std::vector<int> out;
    for (const auto& b : blocks_) out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_singletons() const {
    return std::any_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.size() == 1; });
  }

  /// Index of the block containing x, or -1.
  int block_of(int x) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), x)) return static_cast<int>(i);
    }
    return -1;
  }

  /// Every block of *this lies inside some block of `coarser`.
  bool refines(const SetPartition& coarser) const {
    for (const auto& b : blocks_) {
      int target = coarser.block_of(b.front());
      if (target < 0) return false;
      for (int x : b) {
        if (coarser.block_of(x) != target) return false;
      }
    }
    return true;
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (i > 0) out += ",";
      out += "{";
      for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
        if (j > 0) out += ",";
        out += std::to_string(blocks_[i][j]);
      }
      out += "}";
    }
    return out + "}";
  }

  auto operator<=>(const SetPartition&) const = default;

 private:
  std::vector<std::vector<int>> blocks_;
};

/// All set partitions of `ground` (restricted growth enumeration).
inline std::vector<SetPartition> set_partitions(const std::vector<int>& ground) {
  std::vector<SetPartition> out;
  std::vector<std::vector<int>> blocks;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == ground.size()) {
      out.emplace_back(blocks);
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(ground[i]);
      self(self, i + 1);
      blocks[b].pop_back();
    }
    blocks.push_back({ground[i]});
    self(self, i + 1);
    blocks.pop_back();
  };
  rec(rec, 0);
  return out;
}

/// Set partitions of `ground` with no singleton block.
inline std::vector<SetPartition> set_partitions_without_singletons(const std::vector<int>& ground) {
  auto all = set_partitions(ground);
  std::vector<SetPartition> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const SetPartition& p) { return !p.has_singletons(); });
  return out;
}

inline std::vector<int> range_inclusive(int first, int last) {
  std::vector<int> out;
  for (int i = first; i <= last; ++i) out.push_back(i);
  return out;
}

}  // namespace liberty
