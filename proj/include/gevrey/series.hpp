#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gevrey/poly.hpp"
#include "gevrey/rational.hpp"

namespace gevrey {

// Truncated formal power series: coefficients 0..N, all arithmetic exact
// modulo X^{N+1}.  Results carry the certified order so downstream checks
// never over-trust coefficients; in particular composition lowers the
// certified order to min(N_F * ord P, N_P).
template <typename K>
class TruncatedSeries {
 public:
  TruncatedSeries() : c_(1, K(0)) {}
  explicit TruncatedSeries(int trunc_order) : c_(static_cast<size_t>(trunc_order) + 1, K(0)) {
    if (trunc_order < 0) throw validation_error("trunc_order must be >= 0");
  }
  TruncatedSeries(std::vector<K> coeffs, int trunc_order) : c_(std::move(coeffs)) {
    if (trunc_order < 0) throw validation_error("trunc_order must be >= 0");
    c_.resize(static_cast<size_t>(trunc_order) + 1, K(0));
  }

  static TruncatedSeries from_poly(const Poly<K>& p, int trunc_order) {
    TruncatedSeries s(trunc_order);
    for (int n = 0; n <= std::min(trunc_order, p.degree()); ++n) s.c_[static_cast<size_t>(n)] = p[n];
    return s;
  }
  static TruncatedSeries constant(K v, int trunc_order) {
    TruncatedSeries s(trunc_order);
    s.c_[0] = std::move(v);
    return s;
  }
  static TruncatedSeries identity(int trunc_order) {
    return from_poly(Poly<K>::monomial(1), trunc_order);
  }

  int trunc_order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<K>& coeffs() const { return c_; }
  const K& operator[](int n) const {
    static const K kZero{0};
    return (n >= 0 && n <= trunc_order()) ? c_[static_cast<size_t>(n)] : kZero;
  }
  void set(int n, K v) { c_.at(static_cast<size_t>(n)) = std::move(v); }

  // Least n with nonzero coefficient; nullopt when zero to the certified order.
  std::optional<int> order() const {
    for (size_t n = 0; n < c_.size(); ++n)
      if (!is_zero(c_[n])) return static_cast<int>(n);
    return std::nullopt;
  }
  bool zero_to_trunc() const { return !order().has_value(); }

  TruncatedSeries truncate(int new_order) const {
    if (new_order > trunc_order())
      throw validation_error("cannot extend certified order by truncation");
    return TruncatedSeries(std::vector<K>(c_.begin(), c_.begin() + new_order + 1), new_order);
  }

  TruncatedSeries operator+(const TruncatedSeries& o) const {
    int n = std::min(trunc_order(), o.trunc_order());
    TruncatedSeries r(n);
    for (int i = 0; i <= n; ++i) r.c_[static_cast<size_t>(i)] = (*this)[i] + o[i];
    return r;
  }
  TruncatedSeries operator-(const TruncatedSeries& o) const {
    int n = std::min(trunc_order(), o.trunc_order());
    TruncatedSeries r(n);
    for (int i = 0; i <= n; ++i) r.c_[static_cast<size_t>(i)] = (*this)[i] - o[i];
    return r;
  }
  TruncatedSeries operator-() const {
    TruncatedSeries r(*this);
    for (auto& v : r.c_) v = -v;
    return r;
  }
  TruncatedSeries operator*(const TruncatedSeries& o) const {
    int n = std::min(trunc_order(), o.trunc_order());
    TruncatedSeries r(n);
    for (int i = 0; i <= n; ++i) {
      K acc{0};
      for (int j = 0; j <= i; ++j) acc = acc + (*this)[j] * o[i - j];
      r.c_[static_cast<size_t>(i)] = std::move(acc);
    }
    return r;
  }
  TruncatedSeries operator*(const K& s) const {
    TruncatedSeries r(*this);
    for (auto& v : r.c_) v = v * s;
    return r;
  }
  bool operator==(const TruncatedSeries& o) const {
    int n = std::min(trunc_order(), o.trunc_order());
    for (int i = 0; i <= n; ++i)
      if (!((*this)[i] == o[i])) return false;
    return trunc_order() == o.trunc_order();
  }

  // Coefficientwise equality up to the common certified order.
  bool agrees_with(const TruncatedSeries& o, int up_to = -1) const {
    int n = std::min(trunc_order(), o.trunc_order());
    if (up_to >= 0) n = std::min(n, up_to);
    for (int i = 0; i <= n; ++i)
      if (!((*this)[i] == o[i])) return false;
    return true;
  }

  TruncatedSeries derivative() const {
    if (trunc_order() == 0) return TruncatedSeries(0);
    TruncatedSeries r(trunc_order() - 1);
    for (int n = 1; n <= trunc_order(); ++n)
      r.c_[static_cast<size_t>(n - 1)] = c_[static_cast<size_t>(n)] * K(n);
    return r;
  }

  // Multiply by X^n; certified order grows with the shift.
  TruncatedSeries shift_up(int n) const {
    TruncatedSeries r(trunc_order() + n);
    for (int i = 0; i <= trunc_order(); ++i) r.c_[static_cast<size_t>(i + n)] = c_[static_cast<size_t>(i)];
    return r;
  }
  // Exact division by X^n; the low coefficients must vanish.
  TruncatedSeries shift_down(int n) const {
    for (int i = 0; i < std::min(n, trunc_order() + 1); ++i)
      if (!is_zero(c_[static_cast<size_t>(i)]))
        throw validation_error("shift_down: series not divisible by X^" + std::to_string(n));
    if (trunc_order() < n) return TruncatedSeries(0);
    return TruncatedSeries(std::vector<K>(c_.begin() + n, c_.end()), trunc_order() - n);
  }

  // Multiplicative inverse; requires a unit constant term.
  TruncatedSeries reciprocal() const {
    if (is_zero(c_[0])) throw validation_error("reciprocal: constant term is zero");
    TruncatedSeries r(trunc_order());
    r.c_[0] = K(1) / c_[0];
    for (int n = 1; n <= trunc_order(); ++n) {
      K acc{0};
      for (int j = 1; j <= n; ++j) acc = acc + c_[static_cast<size_t>(j)] * r.c_[static_cast<size_t>(n - j)];
      r.c_[static_cast<size_t>(n)] = -acc / c_[0];
    }
    return r;
  }

  template <typename V>
  V eval(const V& x) const {
    V acc{};
    for (size_t n = c_.size(); n-- > 0;) acc = acc * x + to_value<V>(c_[n]);
    return acc;
  }

 private:
  template <typename V>
  static V to_value(const K& k) {
    if constexpr (std::is_same_v<V, Cplx>) return to_complex(k);
    else if constexpr (std::is_same_v<V, double>) return to_double(k);
    else return V(k);
  }

  std::vector<K> c_;
};

// Composition F(P(X)) with P(0) = 0.  Certified to order
// min(N_F * ord P, N_P); a P that is zero to its certified order yields the
// constant F(0) certified to N_P.
template <typename K>
TruncatedSeries<K> compose(const TruncatedSeries<K>& f, const TruncatedSeries<K>& p) {
  if (!is_zero(p[0])) throw validation_error("compose: P(0) != 0");
  const int np = p.trunc_order();
  auto vopt = p.order();
  if (!vopt) return TruncatedSeries<K>::constant(f[0], np);
  const int v = *vopt;
  const long long certified_ll = std::min<long long>(
      static_cast<long long>(f.trunc_order()) * v, np);
  const int certified = static_cast<int>(certified_ll);
  TruncatedSeries<K> acc = TruncatedSeries<K>::constant(f[0], certified);
  TruncatedSeries<K> pk = TruncatedSeries<K>::constant(K(1), certified);
  const TruncatedSeries<K> pt = (np > certified) ? p.truncate(certified) : p;
  // Powers p^k vanish beyond k*v > certified.
  for (int k = 1; k <= f.trunc_order() && static_cast<long long>(k) * v <= certified; ++k) {
    pk = pk * pt;
    if (!is_zero(f[k])) acc = acc + pk * f[k];
  }
  return acc;
}

using RatSeries = TruncatedSeries<Rat>;
using CplxSeries = TruncatedSeries<Cplx>;

inline CplxSeries to_complex_series(const RatSeries& s) {
  std::vector<Cplx> c(s.coeffs().size());
  for (size_t i = 0; i < c.size(); ++i) c[i] = to_complex(s.coeffs()[i]);
  return CplxSeries(std::move(c), s.trunc_order());
}

}  // namespace gevrey
