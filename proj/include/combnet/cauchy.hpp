#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combnet/errors.hpp"
#include "combnet/gf.hpp"

namespace combnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable salt derivation for (stage, subset, relay)-style tuples.
inline std::uint64_t derive_salt(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                                 std::uint64_t d = 0) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::uint64_t x : {a, b, c, d}) h = splitmix64(h ^ x);
  return h;
}

// Deterministic replacement for "m random linear combinations": a Cauchy
// matrix with entries 1/(x_i + y_j) over salted, pairwise-distinct field
// points. Every square submatrix is invertible, so any set of at most `cols`
// rows is linearly independent with certainty instead of "with high
// probability".
class CauchyRows {
 public:
  CauchyRows(const Field& f, std::uint32_t rows, std::uint32_t cols, std::uint64_t salt)
      : field_(&f), rows_(rows), cols_(cols) {
    if (cols == 0) throw parameter_error("CauchyRows: need at least one column");
    if (static_cast<std::uint64_t>(rows) + cols > f.order())
      throw config_error(
          "CauchyRows: combination needs " + std::to_string(rows + cols) +
          " distinct points but GF(2^" + std::to_string(f.spec().degree) + ") has only " +
          std::to_string(f.order()) + "; use field degree 16");
    // Point map v -> a*v + b is a bijection on the field, so all row points
    // (index >= cols) stay distinct from all column points.
    a_ = f.exp(static_cast<std::uint32_t>(splitmix64(salt) % (f.order() - 1)));
    b_ = static_cast<Field::Elem>(splitmix64(salt ^ 0x5851F42D4C957F2Dull) & (f.order() - 1));
  }

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }

  Field::Elem entry(std::uint32_t i, std::uint32_t j) const {
    if (i >= rows_ || j >= cols_) throw internal_error("CauchyRows: index out of range");
    return field_->inv(static_cast<Field::Elem>(point(cols_ + i) ^ point(j)));
  }

  std::vector<Field::Elem> row(std::uint32_t i) const {
    std::vector<Field::Elem> r(cols_);
    for (std::uint32_t j = 0; j < cols_; ++j) r[j] = entry(i, j);
    return r;
  }

 private:
  Field::Elem point(std::uint32_t idx) const {
    return Field::add(field_->mul(a_, static_cast<Field::Elem>(idx)), b_);
  }

  const Field* field_;
  std::uint32_t rows_, cols_;
  Field::Elem a_, b_;
};

// MDS-style coefficient matrix for combining n_s source packets into m_c
// outputs; any m_c unknowns among the sources are solvable given the rest.
inline std::vector<std::vector<Field::Elem>> rlc_matrix(std::uint32_t m_c, std::uint32_t n_s,
                                                        const Field& f, std::uint64_t salt) {
  if (n_s == 0 || m_c == 0) throw parameter_error("rlc_matrix: empty matrix requested");
  CauchyRows view(f, m_c, n_s, salt);
  std::vector<std::vector<Field::Elem>> m;
  m.reserve(m_c);
  for (std::uint32_t i = 0; i < m_c; ++i) m.push_back(view.row(i));
  return m;
}

}  // namespace combnet
