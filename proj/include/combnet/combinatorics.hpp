#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "combnet/errors.hpp"

namespace combnet {

// Sorted 1-based element list. Used for user sets, relay sets and subfile
// holder sets alike.
using Subset = std::vector<int>;

// C(66,33) still fits in 64 bits; beyond that we refuse rather than wrap.
inline constexpr int kBinomialMaxN = 66;

inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0) throw parameter_error("binomial: negative argument");
  if (k > n) return 0;
  if (n > kBinomialMaxN) throw parameter_error("binomial: n too large for 64-bit table");
  static const auto table = [] {
    std::vector<std::vector<std::uint64_t>> c(kBinomialMaxN + 1);
    for (int i = 0; i <= kBinomialMaxN; ++i) {
      c[i].assign(i + 1, 1);
      for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
  }();
  return table[n][k];
}

// Lexicographic rank of a sorted k-subset of [1..n], 0-based.
inline std::uint64_t rank_subset(const Subset& s, int n) {
  const int k = static_cast<int>(s.size());
  std::uint64_t rank = 0;
  int prev = 0;
  for (int i = 0; i < k; ++i) {
    if (s[i] <= prev || s[i] > n)
      throw parameter_error("rank_subset: elements must be sorted, distinct and in [1..n]");
    for (int j = prev + 1; j < s[i]; ++j) rank += binomial(n - j, k - 1 - i);
    prev = s[i];
  }
  return rank;
}

inline Subset unrank_subset(std::uint64_t rank, int n, int k) {
  if (k < 0 || k > n) throw parameter_error("unrank_subset: need 0 <= k <= n");
  if (rank >= binomial(n, k)) throw parameter_error("unrank_subset: rank out of range");
  Subset s;
  s.reserve(k);
  int next = 1;
  for (int i = 0; i < k; ++i) {
    for (;; ++next) {
      const std::uint64_t block = binomial(n - next, k - 1 - i);
      if (rank < block) break;
      rank -= block;
    }
    s.push_back(next++);
  }
  return s;
}

// Advances s to its lexicographic successor among k-subsets of [1..n].
// Returns false (leaving s at the first subset) after the last one.
inline bool next_subset(Subset& s, int n) {
  const int k = static_cast<int>(s.size());
  for (int i = k - 1; i >= 0; --i) {
    if (s[i] < n - (k - 1 - i)) {
      ++s[i];
      for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
      return true;
    }
  }
  std::iota(s.begin(), s.end(), 1);
  return false;
}

// Visits all k-subsets of [1..n] in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  Subset s(k);
  std::iota(s.begin(), s.end(), 1);
  do {
    fn(const_cast<const Subset&>(s));
  } while (next_subset(s, n));
}

inline std::uint64_t mask_of(const Subset& s) {
  std::uint64_t m = 0;
  for (int e : s) m |= std::uint64_t{1} << (e - 1);
  return m;
}

inline Subset subset_of_mask(std::uint64_t m) {
  Subset s;
  while (m) {
    const int b = std::countr_zero(m);
    s.push_back(b + 1);
    m &= m - 1;
  }
  return s;
}

// Lexicographic order on the element lists, e.g. {1,4} < {2,3}.
inline bool lex_less_masks(std::uint64_t a, std::uint64_t b) {
  while (a && b) {
    const int ea = std::countr_zero(a), eb = std::countr_zero(b);
    if (ea != eb) return ea < eb;
    a &= a - 1;
    b &= b - 1;
  }
  return b != 0;
}

inline std::string subset_string(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  out += '}';
  return out;
}

inline std::int64_t lcm_upto(int n) {
  std::int64_t l = 1;
  for (int i = 2; i <= n; ++i) l = std::lcm(l, static_cast<std::int64_t>(i));
  return l;
}

}  // namespace combnet
