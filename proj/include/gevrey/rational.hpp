#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gevrey {

// Exact coefficient domain for all algebraic identities.  Numeric
// (complex double) coefficients are confined to the summation side.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;
using Cplx = std::complex<double>;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Cplx to_complex(const Rat& r) { return Cplx(to_double(r), 0.0); }
inline Cplx to_complex(const Cplx& z) { return z; }
inline Cplx to_complex(double x) { return Cplx(x, 0.0); }

template <typename K>
bool is_zero(const K& x) { return x == K(0); }

// Thrown when a structural precondition of an operation is violated
// (domain mismatch, invalid spec, bad composition argument).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a numerical procedure cannot reach its target (quadrature
// non-convergence, evaluation too close to a detected pole, degenerate fit).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

template <typename K>
struct Vec2 {
  K x{}, y{};

  Vec2() = default;
  Vec2(K x_, K y_) : x(std::move(x_)), y(std::move(y_)) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(const K& s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

// Row-major 2x2 matrix over any ring with +,-,*.
template <typename K>
struct Mat2 {
  K a{}, b{}, c{}, d{};  // (a b; c d)

  Mat2() = default;
  Mat2(K a_, K b_, K c_, K d_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

  static Mat2 identity() { return {K(1), K(0), K(0), K(1)}; }
  static Mat2 zero() { return {K(0), K(0), K(0), K(0)}; }

  // The rotation generator (0,-1;1,0).
  static Mat2 rotation_j() { return {K(0), K(-1), K(1), K(0)}; }

  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator*(const K& s) const { return {a * s, b * s, c * s, d * s}; }
  Vec2<K> operator*(const Vec2<K>& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }

  K trace() const { return a + d; }
  K det() const { return a * d - b * c; }
};

}  // namespace gevrey
