#pragma once

#include <map>
#include <string>

#include "gevrey/series.hpp"

namespace gevrey {

// Laurent expansion at 0: finitely many negative-exponent terms plus a
// truncated regular part.
template <typename K>
class LaurentSeries {
 public:
  LaurentSeries() = default;
  LaurentSeries(std::map<int, K> principal, TruncatedSeries<K> regular)
      : principal_(std::move(principal)), regular_(std::move(regular)) {
    for (auto it = principal_.begin(); it != principal_.end();) {
      if (it->first >= 0) throw validation_error("principal part exponent must be < 0");
      if (is_zero(it->second)) it = principal_.erase(it);
      else ++it;
    }
  }

  static LaurentSeries pure_principal(std::map<int, K> principal) {
    return LaurentSeries(std::move(principal), TruncatedSeries<K>(0));
  }

  const std::map<int, K>& principal() const { return principal_; }
  const TruncatedSeries<K>& regular() const { return regular_; }

  bool principal_zero() const { return principal_.empty(); }
  bool pure_principal_part() const { return regular_.zero_to_trunc(); }

  // Most negative exponent and its coefficient; requires nonzero principal part.
  std::pair<int, K> leading() const {
    if (principal_.empty()) throw validation_error("leading: principal part is zero");
    return *principal_.begin();
  }

  const K& coeff(int n) const {
    static const K kZero{0};
    if (n < 0) {
      auto it = principal_.find(n);
      return it == principal_.end() ? kZero : it->second;
    }
    return regular_[n];
  }

  LaurentSeries operator+(const LaurentSeries& o) const {
    std::map<int, K> p = principal_;
    for (const auto& [e, v] : o.principal_) {
      auto [it, inserted] = p.emplace(e, v);
      if (!inserted) it->second = it->second + v;
    }
    return LaurentSeries(std::move(p), regular_ + o.regular_);
  }
  LaurentSeries operator-(const LaurentSeries& o) const {
    std::map<int, K> p = principal_;
    for (const auto& [e, v] : o.principal_) {
      auto [it, inserted] = p.emplace(e, -v);
      if (!inserted) it->second = it->second - v;
    }
    return LaurentSeries(std::move(p), regular_ - o.regular_);
  }

  bool operator==(const LaurentSeries& o) const {
    return principal_ == o.principal_ && regular_ == o.regular_;
  }

  template <typename V>
  V eval(const V& x) const {
    V acc = regular_.template eval<V>(x);
    for (const auto& [e, v] : principal_) {
      V xe = V(1);
      for (int i = 0; i < -e; ++i) xe = xe * x;
      acc = acc + to_value<V>(v) / xe;
    }
    return acc;
  }

 private:
  template <typename V>
  static V to_value(const K& k) {
    if constexpr (std::is_same_v<V, Cplx>) return to_complex(k);
    else if constexpr (std::is_same_v<V, double>) return to_double(k);
    else return V(k);
  }

  std::map<int, K> principal_;
  TruncatedSeries<K> regular_;
};

// Negative-exponent portion only; zero regular part.
template <typename K>
LaurentSeries<K> principal_part(const LaurentSeries<K>& l) {
  return LaurentSeries<K>(l.principal(), TruncatedSeries<K>(0));
}

// Q(P(z)) for Q a polynomial in 1/X (pure principal part) and P a nonzero
// polynomial with P(0) = 0.  P is exact at every order, so the expansion is
// exact through X^{regular_order}.
template <typename K>
LaurentSeries<K> laurent_compose_q(const LaurentSeries<K>& q, const Poly<K>& p,
                                   int regular_order = 8) {
  if (!q.pure_principal_part())
    throw validation_error("laurent_compose_q: Q must be a polynomial in 1/X");
  if (p.zero()) throw validation_error("laurent_compose_q: P is zero");
  if (!is_zero(p[0])) throw validation_error("laurent_compose_q: P(0) != 0");
  if (q.principal_zero()) return LaurentSeries<K>::pure_principal({});

  const int nu = p.order();
  const K& lead = p[nu];
  const int max_pole = -q.leading().first;  // largest j with X^{-j} present
  // (1+u)^{-1} where P = lead * X^nu * (1+u); needed to order M + nu*j for
  // the X^{-nu*j} term to be exact through X^{regular_order}.
  const int umax = regular_order + nu * max_pole;
  TruncatedSeries<K> one_plus_u(umax);
  one_plus_u.set(0, K(1));
  for (int i = 1; i <= umax; ++i) one_plus_u.set(i, p[nu + i] / lead);
  const TruncatedSeries<K> w = one_plus_u.reciprocal();

  std::map<int, K> principal;
  TruncatedSeries<K> regular(regular_order);
  TruncatedSeries<K> wj = TruncatedSeries<K>::constant(K(1), umax);
  K lead_pow_inv{1};
  for (int j = 1; j <= max_pole; ++j) {
    wj = wj * w;
    lead_pow_inv = lead_pow_inv / lead;
    const K& qj = q.coeff(-j);
    if (is_zero(qj)) continue;
    const K scale = qj * lead_pow_inv;
    // q_{-j} P^{-j} = scale * X^{-nu j} * w^j
    for (int i = 0; i <= umax; ++i) {
      const int e = i - nu * j;
      if (e > regular_order) break;
      K term = scale * wj[i];
      if (is_zero(term)) continue;
      if (e < 0) {
        auto [it, inserted] = principal.emplace(e, term);
        if (!inserted) it->second = it->second + term;
      } else {
        regular.set(e, regular[e] + term);
      }
    }
  }
  for (auto it = principal.begin(); it != principal.end();)
    it = is_zero(it->second) ? principal.erase(it) : std::next(it);
  return LaurentSeries<K>(std::move(principal), std::move(regular));
}

// Exponential phase of the Stokes factor exp(Q_a):
//   Q_a(x) = -(1/x^q) (a_0/q + a_1 x/(q-1) + ... + a_{q-1} x^{q-1}).
template <typename K>
LaurentSeries<K> stokes_phase_qa(const Poly<K>& a, int q) {
  if (q < 1) throw validation_error("stokes_phase_qa: q must be >= 1");
  std::map<int, K> principal;
  for (int m = 0; m < q; ++m) {
    K v = -a[m] / K(q - m);
    if (!is_zero(v)) principal.emplace(m - q, std::move(v));
  }
  return LaurentSeries<K>::pure_principal(std::move(principal));
}

// Oscillatory phase Q_b (zero when r = q):
//   Q_b(x) = -(1/x^{q-r}) (b_0/(q-r) + ... + b_{q-r-1} x^{q-r-1}).
template <typename K>
LaurentSeries<K> stokes_phase_qb(const Poly<K>& b, int q, int r) {
  if (r < 1 || r > q) throw validation_error("stokes_phase_qb: need 1 <= r <= q");
  std::map<int, K> principal;
  for (int m = 0; m < q - r; ++m) {
    K v = -b[m] / K(q - r - m);
    if (!is_zero(v)) principal.emplace(m - (q - r), std::move(v));
  }
  return LaurentSeries<K>::pure_principal(std::move(principal));
}

using RatLaurent = LaurentSeries<Rat>;

}  // namespace gevrey
