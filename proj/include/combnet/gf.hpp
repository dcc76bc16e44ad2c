#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "combnet/errors.hpp"

namespace combnet {

// Binary extension field selector. Degree 8 is the default; 16 is used when a
// single combination would need more distinct evaluation points than GF(2^8)
// offers.
struct FieldSpec {
  int degree = 8;               // m in GF(2^m)
  std::uint32_t reduction_poly = 0x11D;

  static FieldSpec gf256() { return {8, 0x11D}; }
  static FieldSpec gf65536() { return {16, 0x1100B}; }
  static FieldSpec for_degree(int m) {
    if (m == 8) return gf256();
    if (m == 16) return gf65536();
    throw parameter_error("FieldSpec: degree must be 8 or 16");
  }
  bool operator==(const FieldSpec&) const = default;
};

// GF(2^m) arithmetic through log/antilog tables. x = 2 must be primitive for
// the chosen reduction polynomial; the constructor verifies this.
class Field {
 public:
  using Elem = std::uint16_t;

  explicit Field(FieldSpec spec = FieldSpec::gf256()) : spec_(spec) {
    if (spec.degree != 8 && spec.degree != 16)
      throw parameter_error("Field: degree must be 8 or 16");
    order_ = std::uint32_t{1} << spec.degree;
    exp_.assign(2 * (order_ - 1), 0);
    log_.assign(order_, 0);
    std::uint32_t v = 1;
    for (std::uint32_t i = 0; i < order_ - 1; ++i) {
      if (v == 1 && i != 0)
        throw config_error("Field: x is not primitive for the given polynomial");
      exp_[i] = static_cast<Elem>(v);
      exp_[i + order_ - 1] = static_cast<Elem>(v);
      log_[v] = i;
      v <<= 1;
      if (v & order_) v ^= spec.reduction_poly;
    }
    if (v != 1) throw config_error("Field: reduction polynomial is not irreducible");
  }

  const FieldSpec& spec() const { return spec_; }
  std::uint32_t order() const { return order_; }

  static Elem add(Elem a, Elem b) { return a ^ b; }  // char 2: sub == add

  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  Elem inv(Elem a) const {
    if (a == 0) throw internal_error("Field: inverse of zero");
    return exp_[order_ - 1 - log_[a]];
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  // a = exp(i) for i in [0, order-1); never zero.
  Elem exp(std::uint32_t i) const { return exp_[i % (order_ - 1)]; }

 private:
  FieldSpec spec_;
  std::uint32_t order_;
  std::vector<Elem> exp_;
  std::vector<std::uint16_t> log_;
};

// Fields are immutable; shared instances avoid rebuilding the 2^16 tables.
inline const Field& field_for(const FieldSpec& spec) {
  static const Field f8{FieldSpec::gf256()};
  static const Field f16{FieldSpec::gf65536()};
  if (spec == FieldSpec::gf256()) return f8;
  if (spec == FieldSpec::gf65536()) return f16;
  thread_local std::unique_ptr<Field> custom;
  if (!custom || !(custom->spec() == spec)) custom = std::make_unique<Field>(spec);
  return *custom;
}

}  // namespace combnet
