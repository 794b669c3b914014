#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gevrey/multiseries.hpp"
#include "gevrey/poly.hpp"
#include "gevrey/series.hpp"

namespace gevrey {

// Nonlinearity g(x, y1, y2): one MultiSeries per component, variables
// (X, Y1, Y2).  An empty component is the zero function.
using GPair = std::array<RatMultiSeries, 2>;

inline std::vector<std::string> g_vars() { return {"X", "Y1", "Y2"}; }
inline GPair zero_g() { return {RatMultiSeries(g_vars()), RatMultiSeries(g_vars())}; }

inline bool g_is_zero(const GPair& g) { return g[0].empty() && g[1].empty(); }

// Smallest total-degree bound certified for both components; kExactDegree for
// polynomial data.
inline int g_trunc_degree(const GPair& g) {
  return std::min(g[0].trunc_degree(), g[1].trunc_degree());
}

// x^{q+1} y' = (a(x) I + x^r b(x) J) y + x^{q+1} g(x,y) + c(x),
// with J = (0,-1;1,0), a0 > 0, b0 != 0, c(0) = 0.
struct InterlacedSpec {
  int q = 1;
  int r = 1;
  RatPoly a;
  RatPoly b;
  PolyVec c;
  GPair g = zero_g();

  PolyMat linear_part() const {
    RatPoly xr_b = b.shift_up(r);
    return {a, -xr_b, xr_b, a};
  }
};

// x^{q+1} y' = (a(x) I + x^r J(x)) y + x^{q+1} g(x,y),
// deg a <= r-1, deg J <= q-r (J = 0 when r > q).
struct FinalFormSpec {
  int q = 1;
  int r = 1;
  RatPoly a;
  PolyMat jmat;
  GPair g = zero_g();

  PolyMat linear_part() const {
    return {a + jmat.a.shift_up(r), jmat.b.shift_up(r),
            jmat.c.shift_up(r), a + jmat.d.shift_up(r)};
  }
};

using SystemSpec = std::variant<InterlacedSpec, FinalFormSpec>;

inline int spec_q(const SystemSpec& s) {
  return std::visit([](const auto& v) { return v.q; }, s);
}
inline PolyMat spec_linear_part(const SystemSpec& s) {
  return std::visit([](const auto& v) { return v.linear_part(); }, s);
}
inline const GPair& spec_g(const SystemSpec& s) {
  return std::visit([](const auto& v) -> const GPair& { return v.g; }, s);
}
inline PolyVec spec_c(const SystemSpec& s) {
  if (const auto* is = std::get_if<InterlacedSpec>(&s)) return is->c;
  return PolyVec{};
}

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::optional<int> trace_order;       // l in trace A(x) = alpha x^l + ...
  std::optional<Rat> trace_leading;     // alpha
  std::vector<std::string> notes;

  bool valid() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::string failures() const {
    std::string s;
    for (const auto& c : checks)
      if (!c.pass) s += (s.empty() ? "" : "; ") + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
    return s;
  }
};

namespace detail {

inline void check(ValidationReport& rep, const std::string& name, bool pass,
                  std::string detail = "") {
  rep.checks.push_back({name, pass, std::move(detail)});
}

inline bool g_shape_ok(const GPair& g) {
  for (const auto& comp : g)
    if (!comp.empty() && comp.vars() != g_vars()) return false;
  return true;
}

}  // namespace detail

inline ValidationReport validate_system(const InterlacedSpec& s) {
  ValidationReport rep;
  detail::check(rep, "q >= 1", s.q >= 1);
  detail::check(rep, "1 <= r <= q", s.r >= 1 && s.r <= s.q);
  detail::check(rep, "deg a <= q", s.a.degree() <= s.q);
  detail::check(rep, "a0 > 0", s.a[0] > 0);
  detail::check(rep, "deg b <= q-r", s.b.degree() <= s.q - s.r);
  detail::check(rep, "b0 != 0", !is_zero(s.b[0]));
  detail::check(rep, "deg c <= q", s.c.x.degree() <= s.q && s.c.y.degree() <= s.q);
  detail::check(rep, "c(0) = 0", is_zero(s.c.x[0]) && is_zero(s.c.y[0]));
  detail::check(rep, "g variables are (X,Y1,Y2)", detail::g_shape_ok(s.g));
  rep.trace_order = 0;
  rep.trace_leading = s.a[0] * 2;
  rep.notes.push_back("divergence of H is not decided here; see gevrey_estimate");
  return rep;
}

inline ValidationReport validate_system(const FinalFormSpec& s) {
  ValidationReport rep;
  detail::check(rep, "q >= 1", s.q >= 1);
  detail::check(rep, "1 <= r <= q+1", s.r >= 1 && s.r <= s.q + 1,
                s.r < 1 ? "r = 0 systems are not handled" : "");
  detail::check(rep, "deg a <= r-1", s.a.degree() <= s.r - 1);
  if (s.r <= s.q) {
    int dj = std::max(std::max(s.jmat.a.degree(), s.jmat.b.degree()),
                      std::max(s.jmat.c.degree(), s.jmat.d.degree()));
    detail::check(rep, "deg J <= q-r", dj <= s.q - s.r);
  } else {
    detail::check(rep, "J = 0 when r > q",
                  s.jmat.a.zero() && s.jmat.b.zero() && s.jmat.c.zero() && s.jmat.d.zero());
  }
  detail::check(rep, "A(0) has a nonzero eigenvalue", !is_zero(s.a[0]));

  // J(0) spectrum: distinct and non-real iff tr^2 - 4 det < 0
  Rat j_tr = s.jmat.a[0] + s.jmat.d[0];
  Rat j_det = s.jmat.a[0] * s.jmat.d[0] - s.jmat.b[0] * s.jmat.c[0];
  Rat disc = j_tr * j_tr - Rat(4) * j_det;
  if (s.r <= s.q) {
    detail::check(rep, "J(0) has two distinct eigenvalues", !is_zero(disc));
    detail::check(rep, "J(0) has non-real eigenvalues", disc < 0);
  }

  // trace A(x) = alpha x^l + O(x^{l+1}) with l < q, alpha > 0
  RatPoly tr = s.a * Rat(2) + (s.jmat.a + s.jmat.d).shift_up(s.r);
  int l = tr.order();
  detail::check(rep, "trace A(x) != 0", l >= 0);
  if (l >= 0) {
    rep.trace_order = l;
    rep.trace_leading = tr[l];
    detail::check(rep, "trace order l < q", l < s.q, "l = " + std::to_string(l));
    detail::check(rep, "trace leading coefficient alpha > 0", tr[l] > 0);
  }

  // (a,-b;b,a) shape of J(0) with b != 0; vacuous when J is absent
  if (s.r <= s.q)
    detail::check(rep, "J(0) rotation-dilation shape",
                  s.jmat.a[0] == s.jmat.d[0] && s.jmat.b[0] == -s.jmat.c[0] &&
                      !is_zero(s.jmat.c[0]));
  detail::check(rep, "g variables are (X,Y1,Y2)", detail::g_shape_ok(s.g));
  rep.notes.push_back("divergence of H is not decided here; see gevrey_estimate");
  return rep;
}

inline ValidationReport validate_system(const SystemSpec& s) {
  return std::visit([](const auto& v) { return validate_system(v); }, s);
}

struct FormalSolution {
  std::array<RatSeries, 2> h{RatSeries(0), RatSeries(0)};
  SystemSpec source;
  int q_level = 1;
  int certified_order = 0;
};

namespace detail {

// Lazily extended coefficient table for H1^b * H2^c, used to read off
// single coefficients of g(X, H(X)) while H itself is still being built.
class SolutionPowers {
 public:
  SolutionPowers(const std::vector<Rat>* h1, const std::vector<Rat>* h2)
      : h1_(h1), h2_(h2) {}

  // coefficient of X^m in H1^b H2^c; requires h coefficients through m
  const Rat& product_coeff(int b, int c, int m) {
    std::vector<Rat>& pr = prod_[{b, c}];
    if (static_cast<int>(pr.size()) <= m) {
      const std::vector<Rat>& p1 = power(pow1_, *h1_, b, m);
      const std::vector<Rat>& p2 = power(pow2_, *h2_, c, m);
      while (static_cast<int>(pr.size()) <= m) {
        int n = static_cast<int>(pr.size());
        Rat acc(0);
        for (int u = 0; u <= n; ++u) {
          if (is_zero(p1[static_cast<size_t>(u)])) continue;
          acc += p1[static_cast<size_t>(u)] * p2[static_cast<size_t>(n - u)];
        }
        pr.push_back(std::move(acc));
      }
    }
    return pr[static_cast<size_t>(m)];
  }

 private:
  const std::vector<Rat>& power(std::vector<std::vector<Rat>>& tab,
                                const std::vector<Rat>& h, int k, int m) {
    if (tab.empty()) tab.push_back({Rat(1)});
    while (static_cast<int>(tab.size()) <= k) tab.push_back({});
    for (int j = 0; j <= k; ++j) {
      auto& pj = tab[static_cast<size_t>(j)];
      if (j == 0) {
        pj.resize(static_cast<size_t>(m) + 1, Rat(0));
        pj[0] = Rat(1);
        continue;
      }
      const auto& prev = tab[static_cast<size_t>(j - 1)];
      while (static_cast<int>(pj.size()) <= m) {
        int n = static_cast<int>(pj.size());
        Rat acc(0);
        for (int u = 0; u <= n && u < static_cast<int>(h.size()); ++u)
          if (!is_zero(h[static_cast<size_t>(u)]))
            acc += h[static_cast<size_t>(u)] * prev[static_cast<size_t>(n - u)];
        pj.push_back(std::move(acc));
      }
    }
    return tab[static_cast<size_t>(k)];
  }

  const std::vector<Rat>* h1_;
  const std::vector<Rat>* h2_;
  std::vector<std::vector<Rat>> pow1_, pow2_;
  std::map<std::pair<int, int>, std::vector<Rat>> prod_;
};

}  // namespace detail

// Unique H with H(0) = 0 solving the system coefficientwise through X^N.
// The certified order is lowered when g is only known to a finite total
// degree D: coefficients beyond D + q + 1 would need unknown terms of g.
inline FormalSolution formal_solution(const SystemSpec& spec, int n_order) {
  if (n_order < 1) throw validation_error("formal_solution: N >= 1 required");
  ValidationReport rep = validate_system(spec);
  if (!rep.valid())
    throw validation_error("formal_solution: invalid spec: " + rep.failures());

  const int q = spec_q(spec);
  const PolyMat A = spec_linear_part(spec);
  const PolyVec c = spec_c(spec);
  const GPair& g = spec_g(spec);
  const int gdeg = g_trunc_degree(g);
  const int certified = g_is_zero(g) || gdeg == kExactDegree
                            ? n_order
                            : std::min(n_order, gdeg + q + 1);
  const int N = certified;

  const Rat a0 = A.a[0];
  if (is_zero(a0) || !is_zero(A.b[0]) || !is_zero(A.c[0]) || !(A.a[0] == A.d[0]))
    throw validation_error("formal_solution: recursion blocked, A(0) is not a nonzero multiple of I");

  std::vector<Rat> h1(static_cast<size_t>(N) + 1, Rat(0));
  std::vector<Rat> h2(static_cast<size_t>(N) + 1, Rat(0));
  detail::SolutionPowers powers(&h1, &h2);

  const int degA = std::max(std::max(A.a.degree(), A.b.degree()),
                            std::max(A.c.degree(), A.d.degree()));
  for (int n = 1; n <= N; ++n) {
    // (n-q) h_{n-q} [n > q]  =  sum_m A_m h_{n-m} + c_n + [x^{q+1} g(x,H)]_n
    Vec2<Rat> rhs(Rat(0), Rat(0));
    if (n > q) {
      rhs.x += Rat(n - q) * h1[static_cast<size_t>(n - q)];
      rhs.y += Rat(n - q) * h2[static_cast<size_t>(n - q)];
    }
    for (int m = 1; m <= std::min(degA, n - 1); ++m) {
      Mat2<Rat> Am(A.a[m], A.b[m], A.c[m], A.d[m]);
      Vec2<Rat> hm(h1[static_cast<size_t>(n - m)], h2[static_cast<size_t>(n - m)]);
      Vec2<Rat> t = Am * hm;
      rhs.x -= t.x;
      rhs.y -= t.y;
    }
    rhs.x -= c.x[n];
    rhs.y -= c.y[n];
    if (n >= q + 1 && !g_is_zero(g)) {
      const int m = n - q - 1;  // depends on h_1..h_m only, all known
      for (int comp = 0; comp < 2; ++comp) {
        Rat acc(0);
        for (const auto& [e, v] : g[static_cast<size_t>(comp)].terms()) {
          if (e[0] > m) continue;
          acc += v * powers.product_coeff(e[1], e[2], m - e[0]);
        }
        (comp == 0 ? rhs.x : rhs.y) -= acc;
      }
    }
    h1[static_cast<size_t>(n)] = rhs.x / a0;
    h2[static_cast<size_t>(n)] = rhs.y / a0;
  }

  FormalSolution sol;
  sol.h = {RatSeries(std::move(h1), N), RatSeries(std::move(h2), N)};
  sol.source = spec;
  sol.q_level = q;
  sol.certified_order = certified;
  return sol;
}

inline FormalSolution formal_solution(const InterlacedSpec& s, int n) {
  return formal_solution(SystemSpec(s), n);
}
inline FormalSolution formal_solution(const FinalFormSpec& s, int n) {
  return formal_solution(SystemSpec(s), n);
}

// X^{q+1} H' - Theta(X, H) exactly modulo X^{N+1}.
inline std::array<RatSeries, 2> ode_residual(const SystemSpec& spec,
                                             const FormalSolution& sol, int n_order) {
  if (!is_zero(sol.h[0][0]) || !is_zero(sol.h[1][0]))
    throw validation_error("ode_residual: H(0) != 0");
  const int q = spec_q(spec);
  const PolyMat A = spec_linear_part(spec);
  const PolyVec c = spec_c(spec);
  const GPair& g = spec_g(spec);

  const int N = std::min(n_order, sol.h[0].trunc_order());
  std::array<RatSeries, 2> res{RatSeries(N), RatSeries(N)};
  const RatSeries& h1 = sol.h[0];
  const RatSeries& h2 = sol.h[1];

  std::array<RatSeries, 2> lhs{
      h1.derivative().shift_up(q + 1).truncate(N),
      h2.derivative().shift_up(q + 1).truncate(N)};

  auto poly_times = [&](const RatPoly& p, const RatSeries& s) {
    return RatSeries::from_poly(p, N) * s.truncate(std::min(N, s.trunc_order()));
  };
  std::array<RatSeries, 2> lin{poly_times(A.a, h1) + poly_times(A.b, h2),
                               poly_times(A.c, h1) + poly_times(A.d, h2)};

  for (int comp = 0; comp < 2; ++comp) {
    RatSeries r = lhs[static_cast<size_t>(comp)] - lin[static_cast<size_t>(comp)] -
                  RatSeries::from_poly(comp == 0 ? c.x : c.y, N);
    if (!g[static_cast<size_t>(comp)].empty() && N >= q + 1) {
      RatSeries gc = mv_substitute(g[static_cast<size_t>(comp)],
                                   {{"Y1", h1.truncate(std::min(N - q - 1, h1.trunc_order()))},
                                    {"Y2", h2.truncate(std::min(N - q - 1, h2.trunc_order()))}},
                                   N - q - 1);
      r = r - gc.shift_up(q + 1).truncate(std::min(N, gc.trunc_order() + q + 1));
    }
    res[static_cast<size_t>(comp)] = std::move(r);
  }
  return res;
}

struct GevreyReport {
  double s_estimate = 0.0;
  double constant_estimate = 0.0;  // c in |h_n| ~ C c^n (n!)^s
  bool divergent_flag = false;
  int coefficients_used = 0;
  int certified_order = 0;
};

// Least-squares fit of log ||h_n|| against s*lgamma(n+1) + n*log(c) + const.
// Divergence is decided heuristically (s > 0.5), "numerically divergent to
// order N"; it is not decidable from finitely many coefficients.
inline GevreyReport gevrey_estimate(const FormalSolution& sol) {
  GevreyReport rep;
  rep.certified_order = sol.certified_order;
  std::vector<double> ns, ys;
  for (int n = 1; n <= sol.certified_order; ++n) {
    double x = to_double(sol.h[0][n]);
    double y = to_double(sol.h[1][n]);
    double norm = std::hypot(x, y);
    if (norm <= 0.0) continue;
    ns.push_back(static_cast<double>(n));
    ys.push_back(std::log(norm));
  }
  rep.coefficients_used = static_cast<int>(ns.size());
  if (ns.empty()) return rep;  // zero series: s = 0, convergent
  if (ns.size() < 8)
    throw validation_error("gevrey_estimate: too few coefficients (need >= 8 nonzero)");

  // normal equations for y ~ s*lgamma(n+1) + n*log(c) + k
  double m[3][3] = {};
  double v[3] = {};
  for (size_t i = 0; i < ns.size(); ++i) {
    double reg[3] = {std::lgamma(ns[i] + 1.0), ns[i], 1.0};
    for (int a = 0; a < 3; ++a) {
      v[a] += reg[a] * ys[i];
      for (int b = 0; b < 3; ++b) m[a][b] += reg[a] * reg[b];
    }
  }
  auto det3 = [](const double mm[3][3]) {
    return mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
           mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
           mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
  };
  double d = det3(m);
  if (std::abs(d) < 1e-12) throw numeric_error("gevrey_estimate: degenerate fit");
  double sol3[3];
  for (int a = 0; a < 3; ++a) {
    double mc[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mc[i][j] = (j == a) ? v[i] : m[i][j];
    sol3[a] = det3(mc) / d;
  }
  rep.s_estimate = sol3[0];
  rep.constant_estimate = std::exp(sol3[1]);
  rep.divergent_flag = rep.s_estimate > 0.5;
  return rep;
}

inline Int binomial(int n, int k) {
  Int r(1);
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// R_1-shift: data of the system solved by H/X - p.
struct ShiftResult {
  Vec2<Rat> p;
  InterlacedSpec new_spec;
  FormalSolution new_solution_prefix;  // (H/X - p), relabeled over new_spec
};

inline ShiftResult rk_shift(const InterlacedSpec& spec, int n_order) {
  ValidationReport rep = validate_system(spec);
  if (!rep.valid()) throw validation_error("rk_shift: invalid spec: " + rep.failures());
  FormalSolution sol = formal_solution(spec, std::max(n_order, 1));

  ShiftResult out;
  out.p = {sol.h[0][1], sol.h[1][1]};

  // d(x) = c(x)/x + x^q g(0,0) + (A(x) - x^q I) p
  Vec2<Rat> g00(spec.g[0].coeff({0, 0, 0}), spec.g[1].coeff({0, 0, 0}));
  RatPoly a_shift = spec.a - RatPoly::monomial(spec.q);  // a(x) - x^q
  RatPoly xr_b = spec.b.shift_up(spec.r);
  Vec2<Rat> jp(-out.p.y, out.p.x);  // J p
  PolyVec d{spec.c.x.shift_down(1) + RatPoly::monomial(spec.q, g00.x) +
                a_shift * out.p.x + xr_b * jp.x,
            spec.c.y.shift_down(1) + RatPoly::monomial(spec.q, g00.y) +
                a_shift * out.p.y + xr_b * jp.y};
  if (!is_zero(d.x[0]) || !is_zero(d.y[0]))
    throw numeric_error("rk_shift: d(0) != 0 (internal inconsistency)");
  if (d.x.degree() > spec.q || d.y.degree() > spec.q)
    throw numeric_error("rk_shift: deg d > q (internal inconsistency)");

  // g_new(x,y) = (T_{(0,p)} G)(x,y),  G(x,y) = (g(x, x y) - g(0,0)) / x
  GPair gnew = zero_g();
  const int gdeg = g_trunc_degree(spec.g);
  const int new_deg = (gdeg == kExactDegree) ? kExactDegree : gdeg - 1;
  for (int comp = 0; comp < 2; ++comp) {
    RatMultiSeries acc(g_vars(), new_deg);
    for (const auto& [e, v] : spec.g[static_cast<size_t>(comp)].terms()) {
      const int deg = e[0] + e[1] + e[2];
      if (deg == 0) continue;  // the g(0,0) term is subtracted
      // y -> x y then divide by x: X-exponent becomes deg - 1
      // then y -> y + p: binomial expansion in both Y variables
      for (int b1 = 0; b1 <= e[1]; ++b1)
        for (int b2 = 0; b2 <= e[2]; ++b2) {
          Rat coeff = v;
          for (int i = 0; i < e[1] - b1; ++i) coeff *= out.p.x;
          for (int i = 0; i < e[2] - b2; ++i) coeff *= out.p.y;
          coeff *= Rat(binomial(e[1], b1)) * Rat(binomial(e[2], b2));
          acc.add_term({deg - 1, b1, b2}, std::move(coeff));
        }
    }
    gnew[static_cast<size_t>(comp)] = std::move(acc);
  }

  out.new_spec = InterlacedSpec{spec.q, spec.r, a_shift, spec.b, d, gnew};

  // (H/X - p) relabeled as a solution of new_spec
  FormalSolution shifted;
  shifted.h = {sol.h[0].shift_down(1) - RatSeries::constant(out.p.x, sol.certified_order - 1),
               sol.h[1].shift_down(1) - RatSeries::constant(out.p.y, sol.certified_order - 1)};
  shifted.source = out.new_spec;
  shifted.q_level = spec.q;
  shifted.certified_order = sol.certified_order - 1;
  out.new_solution_prefix = std::move(shifted);
  return out;
}

}  // namespace gevrey
