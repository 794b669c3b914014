#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "gevrey/odeforms.hpp"
#include "gevrey/poly.hpp"

namespace gevrey {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDirEps = 1e-12;

// circle arithmetic on [0, 2pi)
inline double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}
inline double oplus(double a, double b) { return wrap_angle(a + b); }
inline double ominus(double a, double b) { return wrap_angle(a - b); }

struct Direction {
  double theta = 0.0;
  Direction() = default;
  explicit Direction(double t) : theta(wrap_angle(t)) {}
  bool same_as(const Direction& o, double eps = kDirEps) const {
    double d = ominus(theta, o.theta);
    return d < eps || kTwoPi - d < eps;
  }
};

// d(theta, zeta) = min(theta - zeta, zeta - theta) mod 2pi, in [0, pi]
inline double direction_distance(const Direction& a, const Direction& b) {
  return std::min(ominus(a.theta, b.theta), ominus(b.theta, a.theta));
}

// Open arc traversed counterclockwise from lo over the given length.
struct Arc {
  double lo = 0.0;
  double length = 0.0;

  double hi() const { return oplus(lo, length); }
  bool contains(double phi) const {
    double d = ominus(phi, lo);
    return d > kDirEps && d < length - kDirEps;
  }
  double midpoint() const { return oplus(lo, length / 2); }
};

// V(theta, k) = (theta - pi/2k, theta + pi/2k)
inline Arc bisector_arc(const Direction& theta, double k) {
  return Arc{ominus(theta.theta, std::numbers::pi / (2 * k)), std::numbers::pi / k};
}

// U(theta, zeta): the open arc with endpoints theta, zeta of length d(theta,zeta)
inline Arc between_arc(const Direction& theta, const Direction& zeta) {
  double d = direction_distance(theta, zeta);
  if (!(d < std::numbers::pi - kDirEps))
    throw validation_error("between_arc: d(theta, zeta) >= pi");
  if (std::abs(ominus(zeta.theta, theta.theta) - d) < 1e-9)
    return Arc{theta.theta, d};  // zeta lies after theta
  return Arc{zeta.theta, d};
}

// U(theta, zeta, k) = union of V(phi, k) over phi in U(theta, zeta)
inline Arc summation_arc(const Direction& theta, const Direction& zeta, double k) {
  Arc u = between_arc(theta, zeta);
  return Arc{ominus(u.lo, std::numbers::pi / (2 * k)), u.length + std::numbers::pi / k};
}

// finite set of directions, sorted, distinct modulo 2pi
struct SingularSet {
  std::vector<Direction> dirs;

  static SingularSet of(std::vector<double> angles) {
    SingularSet s;
    for (double a : angles) s.insert(Direction(a));
    return s;
  }
  void insert(const Direction& d) {
    for (const auto& e : dirs)
      if (e.same_as(d)) return;
    dirs.push_back(d);
    std::sort(dirs.begin(), dirs.end(),
              [](const Direction& a, const Direction& b) { return a.theta < b.theta; });
  }
  bool contains(const Direction& d) const {
    for (const auto& e : dirs)
      if (e.same_as(d)) return true;
    return false;
  }
  size_t size() const { return dirs.size(); }
};

// First element of S + {theta +- pi/2}, distinct from theta, in the positive
// (resp. negative) sense after theta.
inline Direction theta_plus(const Direction& theta, const SingularSet& s) {
  Direction best(oplus(theta.theta, std::numbers::pi / 2));
  double bestd = ominus(best.theta, theta.theta);
  for (const auto& c : s.dirs) {
    if (c.same_as(theta)) continue;
    double d = ominus(c.theta, theta.theta);
    if (d < bestd) {
      best = c;
      bestd = d;
    }
  }
  return best;
}
inline Direction theta_minus(const Direction& theta, const SingularSet& s) {
  Direction best(ominus(theta.theta, std::numbers::pi / 2));
  double bestd = ominus(theta.theta, best.theta);
  for (const auto& c : s.dirs) {
    if (c.same_as(theta)) continue;
    double d = ominus(theta.theta, c.theta);
    if (d < bestd) {
      best = c;
      bestd = d;
    }
  }
  return best;
}

struct DirectionCalculus {
  double d = 0.0;                 // d(theta, zeta)
  Arc v;                          // V(theta, k)
  std::optional<Arc> u;           // U(theta, zeta, k), defined when d < pi
  Direction plus;                 // theta^+(S)
  Direction minus;                // theta^-(S)
};

inline DirectionCalculus direction_calculus(const Direction& theta, const Direction& zeta,
                                            double k, const SingularSet& s) {
  DirectionCalculus out;
  out.d = direction_distance(theta, zeta);
  out.v = bisector_arc(theta, k);
  if (out.d < std::numbers::pi - kDirEps) out.u = summation_arc(theta, zeta, k);
  out.plus = theta_plus(theta, s);
  out.minus = theta_minus(theta, s);
  return out;
}

// Possible singular directions of H for an interlaced final form with r > 0:
// the q-th roots of unity.
inline SingularSet singular_directions(const InterlacedSpec& spec) {
  ValidationReport rep = validate_system(spec);
  if (!rep.valid())
    throw validation_error("singular_directions: invalid spec: " + rep.failures());
  SingularSet s;
  for (int p = 0; p < spec.q; ++p) s.insert(Direction(kTwoPi * p / spec.q));
  return s;
}

// (S + 2 pi mu) / nu over mu = 0..nu-1
inline SingularSet composed_singulars(const SingularSet& s, int nu) {
  if (nu < 1) throw validation_error("composed_singulars: nu >= 1 required");
  SingularSet out;
  for (int mu = 0; mu < nu; ++mu)
    for (const auto& d : s.dirs) out.insert(Direction((d.theta + kTwoPi * mu) / nu));
  return out;
}

// Order nu of a q-short positive polynomial: ord P >= 1, lowest nonzero
// coefficient positive, deg P < (q+1) ord P.  nullopt when P fails the test.
template <typename K>
std::optional<int> qshort_positive_order(const Poly<K>& p, int q) {
  int nu = p.order();
  if (nu < 1) return std::nullopt;
  if (!(p[nu] > 0)) return std::nullopt;
  if (!(p.degree() < (q + 1) * nu)) return std::nullopt;
  return nu;
}

// Composition levels k(i,j) = nu_j * q, the sorted distinct level tuple, and
// the composed singular support S'.
struct CompositionLevels {
  std::vector<int> level_per_j;  // nu_j * q
  std::vector<int> levels;       // k_1 < ... < k_mu
  SingularSet sprime;
  int k_max() const { return levels.empty() ? 0 : levels.back(); }
};

inline CompositionLevels multisum_levels(int q, const std::vector<RatPoly>& ps) {
  if (q < 1) throw validation_error("multisum_levels: q >= 1 required");
  CompositionLevels out;
  SingularSet base;
  for (int p = 0; p < q; ++p) base.insert(Direction(kTwoPi * p / q));
  for (const auto& p : ps) {
    auto nu = qshort_positive_order(p, q);
    if (!nu) throw validation_error("multisum_levels: P_j is not q-short positive");
    out.level_per_j.push_back(*nu * q);
    for (const auto& d : composed_singulars(base, *nu).dirs) out.sprime.insert(d);
  }
  out.levels = out.level_per_j;
  std::sort(out.levels.begin(), out.levels.end());
  out.levels.erase(std::unique(out.levels.begin(), out.levels.end()), out.levels.end());
  return out;
}

}  // namespace gevrey
