#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "gevrey/directions.hpp"
#include "gevrey/laplace.hpp"

namespace gevrey {

// Offset for lateral sums past a (possibly) singular direction:
// min(pi/(8k), half the distance to the nearest other singular direction).
inline double lateral_offset(const SingularSet& s, const Direction& theta, int k) {
  double delta = std::numbers::pi / (8.0 * k);
  for (const auto& d : s.dirs) {
    if (d.same_as(theta)) continue;
    delta = std::min(delta, direction_distance(d, theta) / 2.0);
  }
  return delta;
}

struct SeriesStokesSample {
  std::vector<Cplx> xs;
  std::vector<Cplx> values;
  std::vector<double> errors;
};

// Lateral sums of a scalar level-k series just above/below theta, subtracted.
template <typename K>
SeriesStokesSample stokes_difference_series(const TruncatedSeries<K>& f, int k,
                                            const SingularSet& s, const Direction& theta,
                                            const std::vector<Cplx>& xs,
                                            const QuadratureParams& params = {}) {
  const double delta = lateral_offset(s, theta, k);
  CplxSeries b = borel_transform(f, k);
  std::vector<LaplaceValue> up = laplace_sum(b, k, theta.theta + delta, xs, params);
  std::vector<LaplaceValue> down = laplace_sum(b, k, theta.theta - delta, xs, params);
  SeriesStokesSample out;
  out.xs = xs;
  for (size_t i = 0; i < xs.size(); ++i) {
    out.values.push_back(up[i].value - down[i].value);
    out.errors.push_back(up[i].error_estimate + down[i].error_estimate);
  }
  return out;
}

// Sampled Stokes difference of both solution components along a ray.
struct StokesSample {
  Direction theta;
  double phi = 0.0;                            // ray angle, strictly inside V(theta, q)
  std::vector<double> moduli;                  // positive, decreasing
  std::vector<std::array<Cplx, 2>> values;     // (Delta H_1, Delta H_2)(x e^{i phi})
  std::vector<std::array<double, 2>> errors;
  int q = 1;
};

inline StokesSample stokes_difference(const InterlacedSpec& spec, const FormalSolution& sol,
                                      const Direction& theta, double phi,
                                      const std::vector<double>& moduli,
                                      const QuadratureParams& params = {}) {
  SingularSet s = singular_directions(spec);
  if (!s.contains(theta))
    throw validation_error("stokes_difference: theta is not a singular direction");
  if (!bisector_arc(theta, spec.q).contains(phi))
    throw validation_error("stokes_difference: ray phi not strictly inside V(theta, q)");
  for (size_t i = 0; i + 1 < moduli.size(); ++i)
    if (!(moduli[i] > moduli[i + 1]) || !(moduli[i + 1] > 0))
      throw validation_error("stokes_difference: moduli must be positive decreasing");

  std::vector<Cplx> xs;
  for (double m : moduli) xs.emplace_back(m * std::cos(phi), m * std::sin(phi));

  StokesSample out;
  out.theta = theta;
  out.phi = phi;
  out.moduli = moduli;
  out.q = spec.q;
  SeriesStokesSample c1 = stokes_difference_series(sol.h[0], spec.q, s, theta, xs, params);
  SeriesStokesSample c2 = stokes_difference_series(sol.h[1], spec.q, s, theta, xs, params);
  for (size_t i = 0; i < xs.size(); ++i) {
    out.values.push_back({c1.values[i], c2.values[i]});
    out.errors.push_back({c1.errors[i], c2.errors[i]});
  }
  return out;
}

// Fitted leading-order parameters of the closed-form Stokes model
//   Delta H = exp(Q_a(x)) x^{a_q} C0 diag(mu_1 e_1, mu_2 e_2) (1,1)^T,
//   e_1 = exp(i Q_b(x)) x^{i b_{q-r}},  C0 = (1,1;-i,i).
struct StokesModel {
  double exp_rate = 0.0;        // fitted a_0
  double power_exponent = 0.0;  // fitted a_q
  double osc_freq = 0.0;        // fitted b_{q-r}
  std::vector<double> a_fitted; // a_0..a_q
  std::vector<double> b_fitted; // b_0..b_{q-r}
  Cplx mu1, mu2;                // fitted multiplicative constants
  double residual_norm = 0.0;   // rms of the linear fit residual
  std::vector<double> a_spec;   // spec-predicted values for the report
  std::vector<double> b_spec;
};

namespace detail {

// continuous branch of log along a decreasing-modulus sample sequence
inline std::vector<Cplx> unwrapped_log(const std::vector<Cplx>& vals) {
  std::vector<Cplx> out;
  double prev = 0.0;
  for (size_t i = 0; i < vals.size(); ++i) {
    double mag = std::abs(vals[i]);
    double arg = std::arg(vals[i]);
    if (i > 0) {
      while (arg - prev > std::numbers::pi) arg -= 2 * std::numbers::pi;
      while (prev - arg > std::numbers::pi) arg += 2 * std::numbers::pi;
    }
    out.emplace_back(std::log(mag), arg);
    prev = arg;
  }
  return out;
}

}  // namespace detail

// Least-squares fit of log Delta against the model phases; both mixed
// components are diagonalized through C0^{-1} first, then fitted jointly
// with shared real parameters a_m, b_m.  The log branch is continued from
// sample to sample, so consecutive moduli must keep the model phase step
// below pi (the rho^{-q} term dominates; densify for q >= 2).  A large
// residual_norm signals aliased phases.
inline StokesModel fit_stokes_model(const StokesSample& sample, const InterlacedSpec& spec,
                                    double degenerate_floor = 1e-280) {
  const size_t n = sample.values.size();
  if (n < 8) throw validation_error("fit_stokes_model: need >= 8 samples");
  if (sample.moduli.front() / sample.moduli.back() < 2.0)
    throw validation_error("fit_stokes_model: samples must span at least a factor 2 in |x|");
  const int q = spec.q, r = spec.r;

  // u = C0^{-1} Delta  with  C0 = (1,1;-i,i)
  std::vector<Cplx> u1(n), u2(n), xs(n);
  const Cplx im(0.0, 1.0);
  double umax = 0.0;
  for (size_t j = 0; j < n; ++j) {
    const Cplx d1 = sample.values[j][0], d2 = sample.values[j][1];
    u1[j] = (d1 + im * d2) / 2.0;
    u2[j] = (d1 - im * d2) / 2.0;
    xs[j] = Cplx(sample.moduli[j] * std::cos(sample.phi),
                 sample.moduli[j] * std::sin(sample.phi));
    umax = std::max({umax, std::abs(u1[j]), std::abs(u2[j])});
  }
  if (umax < degenerate_floor) throw numeric_error("fit_stokes_model: degenerate fit");

  std::vector<Cplx> l1 = detail::unwrapped_log(u1);
  std::vector<Cplx> l2 = detail::unwrapped_log(u2);

  // unknowns: a_0..a_q, b_0..b_{q-r}, Re K1, Im K1, Re K2, Im K2
  const int na = q + 1, nb = q - r + 1;
  const int cols = na + nb + 4;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(4 * n), cols);
  Eigen::VectorXd y(static_cast<long>(4 * n));
  for (size_t j = 0; j < n; ++j) {
    const Cplx x = xs[j];
    const Cplx logx = std::log(x);
    std::vector<Cplx> ra(static_cast<size_t>(na)), rb(static_cast<size_t>(nb));
    for (int m = 0; m < q; ++m) ra[static_cast<size_t>(m)] = -std::pow(x, m - q) / double(q - m);
    ra[static_cast<size_t>(q)] = logx;
    for (int m = 0; m < q - r; ++m)
      rb[static_cast<size_t>(m)] = im * (-std::pow(x, m - (q - r)) / double(q - r - m));
    rb[static_cast<size_t>(q - r)] = im * logx;

    for (int comp = 0; comp < 2; ++comp) {  // u1 row pair, u2 row pair
      const Cplx lhs = (comp == 0) ? l1[j] : l2[j];
      const double osc_sign = (comp == 0) ? 1.0 : -1.0;
      long row = static_cast<long>(4 * j + 2 * static_cast<size_t>(comp));
      for (int m = 0; m < na; ++m) {
        A(row, m) = ra[static_cast<size_t>(m)].real();
        A(row + 1, m) = ra[static_cast<size_t>(m)].imag();
      }
      for (int m = 0; m < nb; ++m) {
        A(row, na + m) = osc_sign * rb[static_cast<size_t>(m)].real();
        A(row + 1, na + m) = osc_sign * rb[static_cast<size_t>(m)].imag();
      }
      int koff = na + nb + 2 * comp;
      A(row, koff) = 1.0;      // Re K
      A(row + 1, koff + 1) = 1.0;  // Im K
      y(row) = lhs.real();
      y(row + 1) = lhs.imag();
    }
  }

  Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y);
  StokesModel out;
  for (int m = 0; m < na; ++m) out.a_fitted.push_back(beta(m));
  for (int m = 0; m < nb; ++m) out.b_fitted.push_back(beta(na + m));
  out.exp_rate = out.a_fitted[0];
  out.power_exponent = out.a_fitted.back();
  out.osc_freq = out.b_fitted.back();
  out.mu1 = std::exp(Cplx(beta(na + nb), beta(na + nb + 1)));
  out.mu2 = std::exp(Cplx(beta(na + nb + 2), beta(na + nb + 3)));
  out.residual_norm = std::sqrt((A * beta - y).squaredNorm() / static_cast<double>(4 * n));
  for (int m = 0; m <= q; ++m) out.a_spec.push_back(to_double(spec.a[m]));
  for (int m = 0; m <= q - r; ++m) out.b_spec.push_back(to_double(spec.b[m]));
  return out;
}

// Exact samples of the closed-form model; used to validate the fit and as
// the reference shape for reports.
inline StokesSample synthesize_stokes_sample(int q, int r, const std::vector<double>& a,
                                             const std::vector<double>& b, const Cplx& mu1,
                                             const Cplx& mu2, double phi,
                                             const std::vector<double>& moduli) {
  StokesSample out;
  out.theta = Direction(0);
  out.phi = phi;
  out.moduli = moduli;
  out.q = q;
  const Cplx im(0.0, 1.0);
  for (double m : moduli) {
    const Cplx x(m * std::cos(phi), m * std::sin(phi));
    const Cplx logx = std::log(x);
    Cplx qa(0.0, 0.0);
    for (int j = 0; j < q; ++j) qa += -std::pow(x, j - q) * a[static_cast<size_t>(j)] / double(q - j);
    Cplx qb(0.0, 0.0);
    for (int j = 0; j < q - r; ++j) qb += -std::pow(x, j - (q - r)) * b[static_cast<size_t>(j)] / double(q - r - j);
    const Cplx e1 = std::exp(im * qb + im * b[static_cast<size_t>(q - r)] * logx);
    const Cplx e2 = 1.0 / e1;
    const Cplx front = std::exp(qa + a[static_cast<size_t>(q)] * logx);
    const Cplx w1 = mu1 * e1, w2 = mu2 * e2;
    out.values.push_back({front * (w1 + w2), front * (-im * w1 + im * w2)});
    out.errors.push_back({0.0, 0.0});
  }
  return out;
}

// Gevrey-type asymptotic bound check:
//   |f(z) - sum_{n<m} a_n z^n| <= c^m Gamma(m/k) |z|^m  for one fitted c.
struct AsymptoticReport {
  bool pass = true;
  int failure_order = -1;
  double c_min = 0.0;                // minimal feasible c over all checked m
  std::vector<double> per_order_c;
  int orders_checked = 0;
};

template <typename K>
AsymptoticReport asymptotic_check(const std::vector<Cplx>& zs, const std::vector<Cplx>& fs,
                                  const TruncatedSeries<K>& f, int k,
                                  double growth_factor = 3.0, int max_order = -1) {
  if (zs.size() < 8 || zs.size() != fs.size())
    throw validation_error("asymptotic_check: need >= 8 sample points");
  if (f.trunc_order() < 10)
    throw validation_error("asymptotic_check: series must be certified to order >= 10");

  // sort by |z| descending
  std::vector<size_t> idx(zs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return std::abs(zs[a]) > std::abs(zs[b]); });

  const int mmax = (max_order > 0) ? std::min(max_order, f.trunc_order())
                                   : f.trunc_order();
  AsymptoticReport rep;
  for (int m = 1; m <= mmax; ++m) {
    double c_first = 0.0, c_last = 0.0, c_all = 0.0;
    for (size_t pos = 0; pos < idx.size(); ++pos) {
      const Cplx z = zs[idx[pos]];
      Cplx part(0.0, 0.0);
      for (int n = m - 1; n >= 0; --n) part = part * z + to_complex(f[n]);
      double rem = std::abs(fs[idx[pos]] - part);
      double denom = std::tgamma(static_cast<double>(m) / k) * std::pow(std::abs(z), m);
      if (!(denom > 0) || !std::isfinite(denom)) break;
      double cj = std::pow(rem / denom, 1.0 / m);
      if (pos == 0) c_first = cj;
      c_last = cj;
      c_all = std::max(c_all, cj);
    }
    rep.per_order_c.push_back(c_all);
    rep.c_min = std::max(rep.c_min, c_all);
    rep.orders_checked = m;
    // the required c must not keep growing as |z| shrinks
    if (c_last > growth_factor * std::max(c_first, 1e-300) && c_last > 1e-12) {
      rep.pass = false;
      rep.failure_order = m;
      break;
    }
  }
  return rep;
}

}  // namespace gevrey
