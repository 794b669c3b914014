#pragma once

#include <algorithm>
#include <cassert>
#include <initializer_list>
#include <vector>

#include "gevrey/rational.hpp"

namespace gevrey {

// Dense univariate polynomial; exact arithmetic, trailing zeros trimmed.
// degree() of the zero polynomial is -1.
template <typename K>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<K> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<K> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(K v) { return Poly(std::vector<K>{std::move(v)}); }
  static Poly monomial(int n, K v = K(1)) {
    std::vector<K> c(static_cast<size_t>(n) + 1, K(0));
    c.back() = std::move(v);
    return Poly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }

  const K& operator[](int n) const {
    static const K kZero{0};
    return (n >= 0 && n <= degree()) ? c_[static_cast<size_t>(n)] : kZero;
  }
  const std::vector<K>& coeffs() const { return c_; }

  // Least n with c_n != 0; -1 for the zero polynomial.
  int order() const {
    for (size_t n = 0; n < c_.size(); ++n)
      if (!is_zero(c_[n])) return static_cast<int>(n);
    return -1;
  }

  Poly operator+(const Poly& o) const {
    std::vector<K> r(std::max(c_.size(), o.c_.size()), K(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] = r[i] + o.c_[i];
    return Poly(std::move(r));
  }
  Poly operator-(const Poly& o) const {
    std::vector<K> r(std::max(c_.size(), o.c_.size()), K(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] = r[i] - o.c_[i];
    return Poly(std::move(r));
  }
  Poly operator-() const {
    std::vector<K> r(c_);
    for (auto& v : r) v = -v;
    return Poly(std::move(r));
  }
  Poly operator*(const Poly& o) const {
    if (zero() || o.zero()) return Poly();
    std::vector<K> r(c_.size() + o.c_.size() - 1, K(0));
    for (size_t i = 0; i < c_.size(); ++i)
      for (size_t j = 0; j < o.c_.size(); ++j)
        r[i + j] = r[i + j] + c_[i] * o.c_[j];
    return Poly(std::move(r));
  }
  Poly operator*(const K& s) const {
    std::vector<K> r(c_);
    for (auto& v : r) v = v * s;
    return Poly(std::move(r));
  }
  bool operator==(const Poly& o) const { return c_ == o.c_; }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<K> r(c_.size() - 1);
    for (size_t n = 1; n < c_.size(); ++n) r[n - 1] = c_[n] * K(static_cast<int>(n));
    return Poly(std::move(r));
  }

  // Exact division by X^n; requires the low-order coefficients to vanish.
  Poly shift_down(int n) const {
    for (int i = 0; i < n && i <= degree(); ++i)
      assert(is_zero(c_[static_cast<size_t>(i)]));
    if (degree() < n) return Poly();
    return Poly(std::vector<K>(c_.begin() + n, c_.end()));
  }
  Poly shift_up(int n) const {
    if (zero()) return Poly();
    std::vector<K> r(static_cast<size_t>(n), K(0));
    r.insert(r.end(), c_.begin(), c_.end());
    return Poly(std::move(r));
  }

  template <typename V>
  V eval(const V& x) const {
    V acc{};
    for (size_t n = c_.size(); n-- > 0;) acc = acc * x + V(to_value<V>(c_[n]));
    return acc;
  }

 private:
  template <typename V>
  static V to_value(const K& k) {
    if constexpr (std::is_same_v<V, Cplx>) return to_complex(k);
    else if constexpr (std::is_same_v<V, double>) return to_double(k);
    else return V(k);
  }

  void trim() {
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }

  std::vector<K> c_;
};

using RatPoly = Poly<Rat>;
using PolyMat = Mat2<RatPoly>;
using PolyVec = Vec2<RatPoly>;

}  // namespace gevrey
