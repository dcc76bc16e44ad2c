#pragma once

#include <cstdint>
#include <initializer_list>
#include <unordered_map>
#include <utility>
#include <vector>

#include "combnet/errors.hpp"
#include "combnet/gf.hpp"

namespace combnet {

// Index into the global packet basis (file, holder set, packet position).
using Coord = std::uint64_t;

// Sparse vector over GF(2^m) on the packet basis. Terms are kept sorted by
// coordinate with zero coefficients dropped, so equality is representational.
class SymbolVector {
 public:
  using Term = std::pair<Coord, Field::Elem>;

  SymbolVector() = default;

  static SymbolVector unit(Coord c) {
    SymbolVector v;
    v.terms_.emplace_back(c, 1);
    return v;
  }

  static SymbolVector xor_of_units(std::initializer_list<Coord> coords) {
    SymbolVector v;
    for (Coord c : coords) v.add_term(c, 1);
    return v;
  }

  bool empty() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  Coord leading_coord() const {
    if (terms_.empty()) throw internal_error("SymbolVector: leading coord of zero vector");
    return terms_.front().first;
  }
  Field::Elem leading_coeff() const { return terms_.front().second; }

  Field::Elem coeff(Coord c) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), c,
                               [](const Term& t, Coord x) { return t.first < x; });
    return (it != terms_.end() && it->first == c) ? it->second : 0;
  }

  // this += scale * other (char 2, so this also implements subtraction).
  void add_scaled(const SymbolVector& other, Field::Elem scale, const Field& f) {
    if (scale == 0 || other.terms_.empty()) return;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
      if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        merged.push_back(*a++);
      } else if (a == terms_.end() || b->first < a->first) {
        merged.emplace_back(b->first, f.mul(b->second, scale));
        ++b;
      } else {
        const Field::Elem c = Field::add(a->second, f.mul(b->second, scale));
        if (c != 0) merged.emplace_back(a->first, c);
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
  }

  void add(const SymbolVector& other, const Field& f) { add_scaled(other, 1, f); }

  void scale(Field::Elem s, const Field& f) {
    if (s == 0) {
      terms_.clear();
      return;
    }
    for (auto& t : terms_) t.second = f.mul(t.second, s);
  }

  // Appends/merges a single term; used by builders that emit sorted coords.
  void add_term(Coord c, Field::Elem coeff) {
    if (coeff == 0) return;
    if (!terms_.empty() && terms_.back().first >= c) {
      auto it = std::lower_bound(terms_.begin(), terms_.end(), c,
                                 [](const Term& t, Coord x) { return t.first < x; });
      if (it != terms_.end() && it->first == c) {
        it->second = Field::add(it->second, coeff);
        if (it->second == 0) terms_.erase(it);
      } else {
        terms_.insert(it, {c, coeff});
      }
      return;
    }
    terms_.emplace_back(c, coeff);
  }

  bool operator==(const SymbolVector&) const = default;

 private:
  std::vector<Term> terms_;
};

// Row-echelon basis over GF(2^m); the workhorse behind span queries and rank
// computations. Rows are normalized to leading coefficient 1.
class SpanBasis {
 public:
  explicit SpanBasis(const Field& f, Coord dimension) : field_(&f), dim_(dimension) {}

  // Reduces v against the current basis; the residual is zero iff v is in span.
  SymbolVector reduce(SymbolVector v) const {
    while (!v.empty()) {
      check_coord(v.leading_coord());
      auto it = pivot_.find(v.leading_coord());
      if (it == pivot_.end()) break;
      v.add_scaled(rows_[it->second], v.leading_coeff(), *field_);
    }
    return v;
  }

  bool contains(const SymbolVector& v) const { return reduce(v).empty(); }

  // Returns true if v enlarged the span.
  bool insert(SymbolVector v) {
    v = reduce(std::move(v));
    if (v.empty()) return false;
    v.scale(field_->inv(v.leading_coeff()), *field_);
    pivot_.emplace(v.leading_coord(), rows_.size());
    rows_.push_back(std::move(v));
    return true;
  }

  std::size_t rank() const { return rows_.size(); }
  Coord dimension() const { return dim_; }

 private:
  void check_coord(Coord c) const {
    if (c >= dim_) throw internal_error("SpanBasis: coordinate beyond basis dimension");
  }

  const Field* field_;
  Coord dim_;
  std::vector<SymbolVector> rows_;
  std::unordered_map<Coord, std::size_t> pivot_;
};

inline bool span_contains(const Field& f, Coord dimension,
                          const std::vector<SymbolVector>& known, const SymbolVector& target) {
  SpanBasis basis(f, dimension);
  for (const auto& v : known) basis.insert(v);
  return basis.contains(target);
}

}  // namespace combnet
