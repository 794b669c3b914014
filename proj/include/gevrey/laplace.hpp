#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "gevrey/pade.hpp"
#include "gevrey/series.hpp"

namespace gevrey {

// Borel/Laplace convention: B_k(sum a_n X^n)(t) = sum a_n t^n / Gamma(1+n/k),
// inverted by f(x) = integral over the ray of B(t) e^{-(t/x)^k} d((t/x)^k).
// The pair reproduces the moments n! x^n at k = 1.

struct QuadratureParams {
  double rel_tol = 1e-10;        // quadrature termination target
  int max_levels = 12;           // exp_sinh refinement depth
  double sector_margin = 0.05;   // require cos(k(theta - arg x)) > margin
  double pole_ray_tol = 0.05;    // reject rays passing this close to a pole
  double residue_floor = 1e-9;   // poles with smaller relative residue are spurious
  int pade_degree = -1;          // -1: use all certified coefficients
  bool continuation_error = true;  // also integrate the lower diagonal

  static QuadratureParams from_env() {
    QuadratureParams p;
    const char* prof = std::getenv("GEVREY_QUAD_PROFILE");
    if (!prof) return p;
    std::string s(prof);
    if (s == "fast") {
      p.rel_tol = 1e-7;
      p.max_levels = 9;
      p.continuation_error = false;
    } else if (s == "precise") {
      p.rel_tol = 1e-12;
      p.max_levels = 15;
    }
    return p;
  }
};

// Coefficientwise division by Gamma(1 + n/k); constants pass through.
template <typename K>
CplxSeries borel_transform(const TruncatedSeries<K>& f, int k) {
  if (k < 1) throw validation_error("borel_transform: k >= 1 required");
  CplxSeries b(f.trunc_order());
  for (int n = 0; n <= f.trunc_order(); ++n) {
    double g = std::tgamma(1.0 + static_cast<double>(n) / k);
    b.set(n, to_complex(f[n]) / g);
  }
  return b;
}

struct EvalResult {
  Cplx value;
  double error_estimate = 0.0;
};

// Evaluate the analytic continuation of a Borel transform off its disk of
// convergence by diagonal Pade approximation, with pole-proximity guard.
inline EvalResult continue_evaluate(const CplxSeries& b, const Cplx& t,
                                    const QuadratureParams& params = {}) {
  if (b.trunc_order() < 10)
    throw validation_error("continue_evaluate: need >= 10 certified coefficients");
  PadeApproximant pade = PadeApproximant::build(b, params.pade_degree);
  double pd = pade.pole_distance(t, params.residue_floor);
  if (pd < params.pole_ray_tol * (1.0 + std::abs(t)))
    throw numeric_error("continue_evaluate: t within tolerance of a detected pole");
  return {pade.eval(t), pade.eval_error(t)};
}

struct LaplaceValue {
  Cplx value;
  double error_estimate = 0.0;
};

namespace detail {

inline Cplx laplace_one(const PadeApproximant& pade, int k, double theta, const Cplx& x,
                        const QuadratureParams& params, double* quad_err) {
  const double psi = k * (theta - std::arg(x));
  const double c = std::cos(psi);
  if (!(c > params.sector_margin))
    throw numeric_error("laplace_sum: x outside the summation sector, cos(k(theta-arg x)) = " +
                        std::to_string(c));
  const double ax = std::abs(x);
  const Cplx eip(std::cos(psi), std::sin(psi));
  const Cplx eit(std::cos(theta), std::sin(theta));
  auto integrand = [&](double u) -> Cplx {
    if (u * c > 700.0) return Cplx(0.0, 0.0);  // kernel underflow
    const Cplx t = ax * std::pow(u, 1.0 / k) * eit;
    return pade.eval(t) * std::exp(-u * eip) * eip;
  };
  boost::math::quadrature::exp_sinh<double> integrator(params.max_levels);
  double err = 0.0, l1 = 0.0;
  Cplx v = integrator.integrate(integrand, params.rel_tol, &err, &l1);
  if (quad_err) *quad_err = err * l1;  // boost reports relative error
  return v;
}

}  // namespace detail

// Lateral Laplace sum of level k along the ray theta, evaluated at the points
// xs.  The Borel transform is continued by Pade; the quadrature runs in the
// rotated variable u = (t/x)^k so the kernel is exactly e^{-u e^{i psi}}.
inline std::vector<LaplaceValue> laplace_sum(const CplxSeries& b, int k, double theta,
                                             const std::vector<Cplx>& xs,
                                             const QuadratureParams& params = {}) {
  if (k < 1) throw validation_error("laplace_sum: k >= 1 required");
  if (b.trunc_order() < 10)
    throw validation_error("laplace_sum: need >= 10 certified Borel coefficients");
  PadeApproximant pade = PadeApproximant::build(b, params.pade_degree);
  theta = std::fmod(theta, 2 * std::numbers::pi);

  double ray_dist = pade.ray_pole_distance(theta, params.residue_floor);
  if (ray_dist < params.pole_ray_tol)
    throw numeric_error("laplace_sum: Borel pole within " + std::to_string(ray_dist) +
                        " of the integration ray");

  std::vector<LaplaceValue> out;
  out.reserve(xs.size());
  for (const Cplx& x : xs) {
    double qerr = 0.0;
    Cplx v = detail::laplace_one(pade, k, theta, x, params, &qerr);
    double cerr = 0.0;
    if (params.continuation_error) {
      // integrate the lower-diagonal continuation as an error surrogate
      const double psi = k * (theta - std::arg(x));
      const double c = std::cos(psi);
      const Cplx eip(std::cos(psi), std::sin(psi));
      const Cplx eit(std::cos(theta), std::sin(theta));
      const double ax = std::abs(x);
      auto integrand = [&](double u) -> Cplx {
        if (u * c > 700.0) return Cplx(0.0, 0.0);
        const Cplx t = ax * std::pow(u, 1.0 / k) * eit;
        return pade.eval_lower(t) * std::exp(-u * eip) * eip;
      };
      boost::math::quadrature::exp_sinh<double> integrator(params.max_levels);
      double err2 = 0.0, l12 = 0.0;
      Cplx v2 = integrator.integrate(integrand, params.rel_tol, &err2, &l12);
      cerr = std::abs(v - v2);
    }
    out.push_back({v, qerr + cerr});
  }
  return out;
}

}  // namespace gevrey
