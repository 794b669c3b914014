#pragma once

#include <vector>

#include "gevrey/odeforms.hpp"

namespace gevrey {

// Polynomial gauge data for the reduction of a final form to interlaced
// final form:  A T - T D - x^{q+1} T' = x^{q+1} E  with
// D(x) = a(x) I + x^r N(x) and every N_j of shape (a_j,-b_j;b_j,a_j).
struct GaugeResult {
  PolyMat T;                      // T(0) = I, degree <= q
  std::vector<Mat2<Rat>> nmats;   // N_0 .. N_{q-r}
  PolyMat E;                      // exact remainder, degree <= q
  RatPoly a;                      // copied from the source spec
  int q = 1;
  int r = 1;

  RatPoly n_diag() const {  // sum a_j x^j
    std::vector<Rat> c;
    for (const auto& n : nmats) c.push_back(n.a);
    return RatPoly(c);
  }
  RatPoly n_rot() const {  // sum b_j x^j
    std::vector<Rat> c;
    for (const auto& n : nmats) c.push_back(n.c);
    return RatPoly(c);
  }
  PolyMat D() const {
    RatPoly nd = n_diag().shift_up(r), nr = n_rot().shift_up(r);
    return {a + nd, -nr, nr, a + nd};
  }
};

namespace detail {

inline PolyMat shift_mat(const PolyMat& m, int n) {
  return {m.a.shift_up(n), m.b.shift_up(n), m.c.shift_up(n), m.d.shift_up(n)};
}
inline PolyMat shift_mat_down(const PolyMat& m, int n) {
  return {m.a.shift_down(n), m.b.shift_down(n), m.c.shift_down(n), m.d.shift_down(n)};
}
inline PolyMat derivative_mat(const PolyMat& m) {
  return {m.a.derivative(), m.b.derivative(), m.c.derivative(), m.d.derivative()};
}
inline Mat2<Rat> mat_coeff(const PolyMat& m, int n) {
  return {m.a[n], m.b[n], m.c[n], m.d[n]};
}
inline bool mat_zero(const PolyMat& m) {
  return m.a.zero() && m.b.zero() && m.c.zero() && m.d.zero();
}
inline PolyMat const_mat(const Mat2<Rat>& m) {
  return {RatPoly::constant(m.a), RatPoly::constant(m.b),
          RatPoly::constant(m.c), RatPoly::constant(m.d)};
}

}  // namespace detail

// T_1..T_{q-r} and N_0..N_{q-r} by the order-by-order recursion; with the
// already-determined matrix M = (alpha,beta;gamma,delta) at step k,
//   T_k = (1/4b) (-gamma-beta, alpha-delta; alpha-delta, gamma+beta)
// and N_k = M + (J_0 T_k - T_k N_0).  T_k = 0 for k > q-r; E is the exact
// remainder of the gauge identity.
inline GaugeResult compute_gauge(const FinalFormSpec& ff) {
  ValidationReport rep = validate_system(ff);
  if (!rep.valid()) throw validation_error("compute_gauge: invalid spec: " + rep.failures());
  if (ff.r < 1 || ff.r > ff.q)
    throw validation_error("compute_gauge: gauge reduction requires 1 <= r <= q");

  const int q = ff.q, r = ff.r;
  const int kmax = q - r;
  std::vector<Mat2<Rat>> J(static_cast<size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) J[static_cast<size_t>(k)] = detail::mat_coeff(ff.jmat, k);

  const Rat frak_b = J[0].c;  // J(0) = (a,-b;b,a), b != 0 by validation
  std::vector<Mat2<Rat>> T(static_cast<size_t>(kmax) + 1, Mat2<Rat>::zero());
  std::vector<Mat2<Rat>> N(static_cast<size_t>(kmax) + 1, Mat2<Rat>::zero());
  T[0] = Mat2<Rat>::identity();
  N[0] = J[0];

  for (int k = 1; k <= kmax; ++k) {
    Mat2<Rat> m = J[static_cast<size_t>(k)];
    for (int j = 1; j <= k - 1; ++j) {
      m = m + J[static_cast<size_t>(j)] * T[static_cast<size_t>(k - j)] -
          T[static_cast<size_t>(k - j)] * N[static_cast<size_t>(j)];
    }
    const Rat alpha = m.a, beta = m.b, gamma = m.c, delta = m.d;
    const Rat inv4b = Rat(1) / (Rat(4) * frak_b);
    Mat2<Rat> tk{(-gamma - beta) * inv4b, (alpha - delta) * inv4b,
                 (alpha - delta) * inv4b, (gamma + beta) * inv4b};
    Mat2<Rat> nk = m + J[0] * tk - tk * N[0];
    T[static_cast<size_t>(k)] = tk;
    N[static_cast<size_t>(k)] = nk;
  }

  GaugeResult out;
  out.a = ff.a;
  out.q = q;
  out.r = r;
  out.nmats = N;
  PolyMat tpoly = detail::const_mat(T[0]);
  for (int k = 1; k <= kmax; ++k)
    tpoly = tpoly + detail::shift_mat(detail::const_mat(T[static_cast<size_t>(k)]), k);
  out.T = tpoly;

  // E := (A T - T D - x^{q+1} T') / x^{q+1}, an exact division
  PolyMat A = ff.linear_part();
  PolyMat lhs = A * out.T - out.T * out.D() - detail::shift_mat(detail::derivative_mat(out.T), q + 1);
  out.E = detail::shift_mat_down(lhs, q + 1);

  // construction guarantees the identity and the N_j shapes; re-assert
  PolyMat check = A * out.T - out.T * out.D() - detail::shift_mat(detail::derivative_mat(out.T), q + 1) -
                  detail::shift_mat(out.E, q + 1);
  if (!detail::mat_zero(check))
    throw numeric_error("compute_gauge: gauge identity failed (internal inconsistency)");
  for (const auto& n : out.nmats)
    if (!(n.a == n.d && n.b == -n.c))
      throw numeric_error("compute_gauge: N_j shape failed (internal inconsistency)");
  if (is_zero(out.nmats[0].c))
    throw numeric_error("compute_gauge: b_0 = 0 (internal inconsistency)");
  return out;
}

// Pull the final-form system back through y = T(x) z:
//   x^{q+1} z' = D z + x^{q+1} (T^{-1} E z + T^{-1} g(x, T z)).
// The returned interlaced spec has a_new = a + x^r sum a_j x^j,
// b_new = sum b_j x^j, c_new = 0, and the bracket as its nonlinearity
// truncated at total degree n_order (g's own truncation permitting).
inline InterlacedSpec pullback_system(const FinalFormSpec& ff, const GaugeResult& gr,
                                      int n_order) {
  const int q = ff.q, r = ff.r;
  InterlacedSpec out;
  out.q = q;
  out.r = r;
  out.a = ff.a + gr.n_diag().shift_up(r);
  out.b = gr.n_rot();
  out.c = PolyVec{};

  const bool t_is_identity = gr.T == PolyMat{RatPoly{Rat(1)}, RatPoly(), RatPoly(), RatPoly{Rat(1)}};
  if (t_is_identity && detail::mat_zero(gr.E)) {
    out.g = ff.g;  // system unchanged
    return out;
  }

  // Total degree d certifies pulled-back solutions through order d + q + 1;
  // d = n_order - q - 1 is exactly enough for solutions to order n_order.
  const int gdeg = g_trunc_degree(ff.g);
  const int d = std::min(std::max(n_order - q - 1, 1),
                         (gdeg == kExactDegree) ? kExactDegree : gdeg);

  // T^{-1} as a truncated series matrix (T(0) = I, so det T is a unit)
  auto series_of = [&](const RatPoly& p) { return RatSeries::from_poly(p, d); };
  RatSeries det = series_of(gr.T.a) * series_of(gr.T.d) - series_of(gr.T.b) * series_of(gr.T.c);
  RatSeries det_inv = det.reciprocal();
  std::array<std::array<RatSeries, 2>, 2> tinv{
      {{series_of(gr.T.d) * det_inv, -(series_of(gr.T.b) * det_inv)},
       {-(series_of(gr.T.c) * det_inv), series_of(gr.T.a) * det_inv}}};

  auto ms_of_series = [&](const RatSeries& s) {
    RatMultiSeries m(g_vars(), d);
    for (int n = 0; n <= std::min(d, s.trunc_order()); ++n)
      if (!is_zero(s[n])) m.add_term({n, 0, 0}, s[n]);
    return m;
  };
  auto y_var = [&](int i) { return RatMultiSeries::variable(g_vars(), static_cast<size_t>(i), d); };

  // T^{-1} E z, linear in z with truncated series coefficients
  std::array<RatMultiSeries, 2> lin{RatMultiSeries(g_vars(), d), RatMultiSeries(g_vars(), d)};
  const std::array<std::array<const RatPoly*, 2>, 2> e{
      {{&gr.E.a, &gr.E.b}, {&gr.E.c, &gr.E.d}}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      RatSeries coef = tinv[static_cast<size_t>(i)][0] * series_of(*e[0][static_cast<size_t>(j)]) +
                       tinv[static_cast<size_t>(i)][1] * series_of(*e[1][static_cast<size_t>(j)]);
      lin[static_cast<size_t>(i)] = lin[static_cast<size_t>(i)] + ms_of_series(coef) * y_var(1 + j);
    }
  }

  // T^{-1} g(x, T z)
  std::array<RatMultiSeries, 2> gcomp{RatMultiSeries(g_vars(), d), RatMultiSeries(g_vars(), d)};
  if (!g_is_zero(ff.g)) {
    RatMultiSeries img_y1 = ms_of_series(series_of(gr.T.a)) * y_var(1) +
                            ms_of_series(series_of(gr.T.b)) * y_var(2);
    RatMultiSeries img_y2 = ms_of_series(series_of(gr.T.c)) * y_var(1) +
                            ms_of_series(series_of(gr.T.d)) * y_var(2);
    std::vector<RatMultiSeries> images{RatMultiSeries::variable(g_vars(), 0, d), img_y1, img_y2};
    std::array<RatMultiSeries, 2> gsub{substitute_all(ff.g[0], images, d),
                                       substitute_all(ff.g[1], images, d)};
    for (int i = 0; i < 2; ++i)
      gcomp[static_cast<size_t>(i)] =
          ms_of_series(tinv[static_cast<size_t>(i)][0]) * gsub[0] +
          ms_of_series(tinv[static_cast<size_t>(i)][1]) * gsub[1];
  }

  out.g = {lin[0] + gcomp[0], lin[1] + gcomp[1]};
  ValidationReport rep = validate_system(out);
  if (!rep.valid())
    throw numeric_error("pullback_system: result not interlaced: " + rep.failures());
  return out;
}

// H_ff = T * H_pullback, coefficientwise to the common certified order.
inline std::array<RatSeries, 2> apply_gauge(const GaugeResult& gr,
                                            const std::array<RatSeries, 2>& h) {
  const int n = std::min(h[0].trunc_order(), h[1].trunc_order());
  auto series_of = [&](const RatPoly& p) { return RatSeries::from_poly(p, n); };
  return {series_of(gr.T.a) * h[0] + series_of(gr.T.b) * h[1],
          series_of(gr.T.c) * h[0] + series_of(gr.T.d) * h[1]};
}

}  // namespace gevrey
