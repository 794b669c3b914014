#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gevrey/laurent.hpp"
#include "gevrey/multiseries.hpp"
#include "gevrey/stokes.hpp"

namespace gevrey {

struct QShortCheck {
  bool ok = false;
  std::optional<int> nu;
  std::string reason;
};

// deg P < (q+1) ord P with P > 0 near 0+ (decided exactly by the lowest
// nonzero coefficient).
inline QShortCheck is_qshort_positive(const RatPoly& p, int q) {
  if (p.zero()) throw validation_error("is_qshort_positive: P = 0");
  QShortCheck out;
  int nu = p.order();
  if (nu < 1) {
    out.reason = "ord P = 0";
    return out;
  }
  out.nu = nu;
  if (!(p[nu] > 0)) {
    out.reason = "leading (order) coefficient not positive";
    return out;
  }
  if (!(p.degree() < (q + 1) * nu)) {
    out.reason = "deg P = " + std::to_string(p.degree()) + " not < (q+1) ord P = " +
                 std::to_string((q + 1) * nu);
    return out;
  }
  out.ok = true;
  return out;
}

struct QShortPoly {
  RatPoly coeffs;
  int nu = 1;
  int q = 1;

  static QShortPoly make(const RatPoly& p, int q) {
    QShortCheck c = is_qshort_positive(p, q);
    if (!c.ok) throw validation_error("not q-short positive: " + c.reason);
    return {p, *c.nu, q};
  }
};

// Componentwise H o P with certified order bookkeeping.
inline std::array<RatSeries, 2> compose_solution(const FormalSolution& sol,
                                                 const QShortPoly& p, int n_order) {
  if (p.q != sol.q_level)
    throw validation_error("compose_solution: P was validated for a different q");
  const int target = std::min<long long>(n_order, static_cast<long long>(sol.certified_order) * p.nu);
  RatSeries ps = RatSeries::from_poly(p.coeffs, static_cast<int>(target));
  return {compose(sol.h[0], ps), compose(sol.h[1], ps)};
}

// Variable naming for the composed tuple: Z<i><j>, i = component 1..2,
// j = polynomial index 1..n (n <= 9).
inline std::string z_var_name(int i, int j) {
  return "Z" + std::to_string(i) + std::to_string(j);
}
inline std::optional<std::pair<int, int>> parse_z_var(const std::string& name) {
  if (name.size() != 3 || name[0] != 'Z') return std::nullopt;
  int i = name[1] - '0', j = name[2] - '0';
  if (i < 1 || i > 2 || j < 1) return std::nullopt;
  return std::make_pair(i, j);
}

// Sign of the divergent real part of a pure principal part along the ray
// phi: the most negative exponent with a non-degenerate cos decides.
// 0 means the real part stays bounded along this ray (inadmissible).
inline int principal_divergence_sign(const RatLaurent& l, double phi, double cos_eps = 1e-9) {
  for (const auto& [e, c] : l.principal()) {
    double co = std::cos(e * phi);
    if (std::abs(co) <= cos_eps) continue;
    double v = to_double(c) * co;
    if (v > 0) return 1;
    if (v < 0) return -1;
  }
  return 0;
}

struct SeparationReport {
  std::map<std::pair<int, int>, RatLaurent> pairwise;  // principal part of Qa o P_j1 - Qa o P_j2
  std::vector<int> omega;                              // analyzed indices (1-based)
  double phi = 0.0;
  bool admissible = false;            // every pairwise real part diverges along phi
  std::optional<int> j0;              // unique dominant index when admissible
  std::vector<int> dominance_order;   // dominant first
  bool subclaim_violation = false;    // a pairwise principal part vanished
  std::optional<double> suggested_phi;
};

// Exact pairwise principal parts of Q_a o P_j1 - Q_a o P_j2 over the index
// set Omega, and the dominant index along the ray phi.  When phi is not
// admissible, candidate rays are sampled from search_arc (64 equispaced
// points) and the first admissible one is suggested.
inline SeparationReport exponential_separation(const RatPoly& a, int q,
                                               const std::vector<QShortPoly>& ps,
                                               std::vector<int> omega, double phi,
                                               std::optional<Arc> search_arc = std::nullopt) {
  if (omega.empty()) throw validation_error("exponential_separation: Omega is empty");
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = i + 1; j < ps.size(); ++j)
      if (ps[i].coeffs == ps[j].coeffs)
        throw validation_error("exponential_separation: P_j must be pairwise distinct");

  SeparationReport rep;
  rep.omega = omega;
  rep.phi = phi;

  const RatLaurent qa = stokes_phase_qa(a, q);
  std::map<int, RatLaurent> composed;
  for (int j : omega)
    composed.emplace(j, laurent_compose_q(qa, ps.at(static_cast<size_t>(j - 1)).coeffs, 2));

  for (size_t u = 0; u < omega.size(); ++u)
    for (size_t v = u + 1; v < omega.size(); ++v) {
      int j1 = omega[u], j2 = omega[v];
      RatLaurent d = principal_part(composed.at(j1) - composed.at(j2));
      if (d.principal_zero()) rep.subclaim_violation = true;
      rep.pairwise.emplace(std::make_pair(j1, j2), std::move(d));
    }

  auto rank_at = [&](double ray, std::vector<int>* order) -> bool {
    // beats: Re(Qa o P_j1 - Qa o P_j2) -> +inf along the ray means j1 wins
    std::map<int, int> wins;
    for (const auto& [key, d] : rep.pairwise) {
      int s = principal_divergence_sign(d, ray);
      if (s == 0) return false;
      wins[s > 0 ? key.first : key.second]++;
    }
    for (int j : omega) wins.emplace(j, 0);
    std::vector<int> sorted(omega.begin(), omega.end());
    std::sort(sorted.begin(), sorted.end(),
              [&](int x, int y) { return wins.at(x) > wins.at(y); });
    // the dominant index must beat every other one
    if (wins.at(sorted.front()) != static_cast<int>(omega.size()) - 1) return false;
    if (order) *order = std::move(sorted);
    return true;
  };

  if (omega.size() == 1) {
    rep.admissible = true;
    rep.j0 = omega[0];
    rep.dominance_order = omega;
    return rep;
  }

  if (rank_at(phi, &rep.dominance_order)) {
    rep.admissible = true;
    rep.j0 = rep.dominance_order.front();
    return rep;
  }

  // sample candidate rays for an admissible direction
  Arc arc = search_arc.value_or(bisector_arc(Direction(0), q));
  for (int i = 1; i < 64; ++i) {
    double cand = wrap_angle(arc.lo + arc.length * i / 64.0);
    if (!arc.contains(cand)) continue;
    if (rank_at(cand, nullptr)) {
      rep.suggested_phi = cand;
      break;
    }
  }
  return rep;
}

struct WitnessReport {
  std::optional<int> first_nonzero_order;            // of F o {H_i o P_j}
  int certified_order = 0;
  bool zero_to_certified = false;
  std::optional<int> derivative_order;               // minimal d
  std::optional<std::pair<int, int>> witness_index;  // (i0, j0)
  bool exhausted = false;
  std::vector<std::pair<int, int>> lambda_f;         // variables F depends on
};

// Falsification search for F o {H_i o P_j} = 0: report the first nonzero
// order, or iterate d-th partial derivatives over Lambda_F until one composes
// to a nonzero series.  All zero outcomes are "zero to certified order N";
// truncation can falsify a relation, never prove transcendence.
inline WitnessReport witness_search(const RatMultiSeries& f, const InterlacedSpec& spec,
                                    const std::vector<QShortPoly>& ps, int n_order) {
  ValidationReport vrep = validate_system(spec);
  if (!vrep.valid()) throw validation_error("witness_search: invalid spec: " + vrep.failures());
  if (f.vars().empty() || f.vars()[0] != "X")
    throw validation_error("witness_search: first variable of F must be X");

  WitnessReport rep;
  FormalSolution sol = formal_solution(spec, n_order);

  std::map<std::string, RatSeries> subs;
  std::vector<std::array<RatSeries, 2>> composed;
  for (size_t j = 0; j < ps.size(); ++j)
    composed.push_back(compose_solution(sol, ps[j], n_order));
  for (size_t v = 1; v < f.vars().size(); ++v) {
    auto ij = parse_z_var(f.vars()[v]);
    if (!ij) throw validation_error("witness_search: variable " + f.vars()[v] +
                                    " is not of the form Z<i><j>");
    if (ij->second > static_cast<int>(ps.size()))
      throw validation_error("witness_search: variable " + f.vars()[v] +
                             " refers to a missing polynomial");
    const RatSeries& s = composed[static_cast<size_t>(ij->second - 1)][static_cast<size_t>(ij->first - 1)];
    subs.emplace(f.vars()[v], s.trunc_order() > n_order ? s.truncate(n_order) : s);
    if (f.depends_on(v)) rep.lambda_f.push_back(*ij);
  }

  RatSeries s0 = mv_substitute(f, subs, n_order);
  rep.certified_order = s0.trunc_order();
  if (auto ord = s0.order()) {
    rep.first_nonzero_order = ord;
    return rep;
  }
  rep.zero_to_certified = true;

  // minimal d with a nonzero composed d-th partial derivative
  int dmax = 0;
  for (size_t v = 1; v < f.vars().size(); ++v) dmax = std::max(dmax, f.var_degree(v));
  std::map<size_t, RatMultiSeries> current;
  for (size_t v = 1; v < f.vars().size(); ++v)
    if (f.depends_on(v)) current.emplace(v, f);
  for (int d = 1; d <= dmax; ++d) {
    for (auto& [v, g] : current) {
      g = g.derivative(v);
      if (g.empty()) continue;
      RatSeries sd = mv_substitute(g, subs, n_order);
      if (auto ord = sd.order()) {
        rep.derivative_order = d;
        rep.witness_index = parse_z_var(f.vars()[v]);
        return rep;
      }
    }
  }
  rep.exhausted = true;
  return rep;
}

struct CompositionCheckReport {
  std::vector<Cplx> xs;
  std::vector<Cplx> lhs, rhs;
  std::vector<double> rel_err;
  double max_rel_err = 0.0;
  std::vector<int> omega;            // j with nu_j theta singular
  std::optional<int> dominant_j;     // from exponential_separation along the ray
  bool dominance_consistent = true;  // per-j contributions ordered as predicted
};

// Numerical check of the composed-Stokes identity: the difference of SF
// applied to upper/lower lateral sums against the sum of D~_ij times the
// Stokes differences of H_i o P_j, with D~_ij the leading Taylor polynomial
// of dF/dZ_ij o {H_i o P_j}.
inline CompositionCheckReport stokes_composition_check(const RatMultiSeries& f,
                                                       const InterlacedSpec& spec,
                                                       const std::vector<QShortPoly>& ps,
                                                       const Direction& theta,
                                                       const std::vector<Cplx>& xs,
                                                       const QuadratureParams& params = {},
                                                       int dtilde_terms = 4,
                                                       int series_order = 40) {
  ValidationReport vrep = validate_system(spec);
  if (!vrep.valid())
    throw validation_error("stokes_composition_check: invalid spec: " + vrep.failures());
  const int q = spec.q;
  SingularSet s = singular_directions(spec);
  FormalSolution sol = formal_solution(spec, series_order);

  CompositionCheckReport rep;
  rep.xs = xs;

  // lateral sums of H_i at direction nu_j theta, evaluated at P_j(x)
  struct PairData {
    int i, j;
    size_t var;
    std::vector<Cplx> up, down;
    RatSeries dtilde_series{0};
    std::vector<Cplx> comp_values;  // P_j(x)
  };
  std::vector<PairData> pairs;
  std::map<std::string, RatSeries> subs;
  std::vector<std::array<RatSeries, 2>> composed;
  for (size_t j = 0; j < ps.size(); ++j)
    composed.push_back(compose_solution(sol, ps[j], series_order));
  for (size_t v = 1; v < f.vars().size(); ++v) {
    auto ij = parse_z_var(f.vars()[v]);
    if (!ij) throw validation_error("stokes_composition_check: bad variable " + f.vars()[v]);
    const RatSeries& cs = composed.at(static_cast<size_t>(ij->second - 1))[static_cast<size_t>(ij->first - 1)];
    subs.emplace(f.vars()[v], cs);
  }

  for (size_t j = 0; j < ps.size(); ++j) {
    const int nu = ps[j].nu;
    Direction dir(wrap_angle(nu * theta.theta));
    if (s.contains(dir)) rep.omega.push_back(static_cast<int>(j) + 1);
    const double delta = lateral_offset(s, dir, q);
    for (int i = 0; i < 2; ++i) {
      size_t var = SIZE_MAX;
      for (size_t v = 1; v < f.vars().size(); ++v)
        if (f.vars()[v] == z_var_name(i + 1, static_cast<int>(j) + 1)) var = v;
      if (var == SIZE_MAX) continue;  // F does not involve this component
      PairData pd;
      pd.i = i + 1;
      pd.j = static_cast<int>(j) + 1;
      pd.var = var;
      for (const Cplx& x : xs) pd.comp_values.push_back(ps[j].coeffs.eval(x));
      CplxSeries b = borel_transform(sol.h[static_cast<size_t>(i)], q);
      pd.up = [&] {
        std::vector<Cplx> out;
        for (const LaplaceValue& lv :
             laplace_sum(b, q, dir.theta + delta, pd.comp_values, params))
          out.push_back(lv.value);
        return out;
      }();
      pd.down = [&] {
        std::vector<Cplx> out;
        for (const LaplaceValue& lv :
             laplace_sum(b, q, dir.theta - delta, pd.comp_values, params))
          out.push_back(lv.value);
        return out;
      }();
      // leading Taylor polynomial of dF/dZ_ij o {H o P}
      RatMultiSeries df = f.derivative(var);
      RatSeries full = mv_substitute(df, subs, series_order);
      RatSeries lead(full.trunc_order());
      int kept = 0;
      for (int n = 0; n <= full.trunc_order() && kept < dtilde_terms; ++n)
        if (!is_zero(full[n])) {
          lead.set(n, full[n]);
          ++kept;
        }
      pd.dtilde_series = lead;
      pairs.push_back(std::move(pd));
    }
  }

  // LHS and RHS per sample
  for (size_t m = 0; m < xs.size(); ++m) {
    std::map<std::string, Cplx> upper, lower;
    for (const PairData& pd : pairs) {
      upper[f.vars()[pd.var]] = pd.up[m];
      lower[f.vars()[pd.var]] = pd.down[m];
    }
    auto eval_f = [&](const std::map<std::string, Cplx>& vals) {
      std::vector<Cplx> point(f.vars().size(), Cplx(0.0, 0.0));
      point[0] = xs[m];
      for (size_t v = 1; v < f.vars().size(); ++v) {
        auto it = vals.find(f.vars()[v]);
        if (it != vals.end()) point[v] = it->second;
      }
      return f.eval(point);
    };
    Cplx lhs = eval_f(upper) - eval_f(lower);
    Cplx rhs(0.0, 0.0);
    for (const PairData& pd : pairs)
      rhs += pd.dtilde_series.eval(xs[m]) * (pd.up[m] - pd.down[m]);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    double denom = std::abs(lhs);
    double err = (denom > 0) ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
    rep.rel_err.push_back(err);
    rep.max_rel_err = std::max(rep.max_rel_err, err);
  }

  // dominance consistency: the separation-predicted dominant index should
  // carry the largest per-j contribution at the smallest sample
  if (!rep.omega.empty() && !xs.empty()) {
    SeparationReport sep = exponential_separation(spec.a, q, ps, rep.omega,
                                                  std::arg(xs.back()));
    rep.dominant_j = sep.j0;
    if (sep.admissible && rep.omega.size() > 1) {
      std::map<int, double> contrib;
      for (const PairData& pd : pairs)
        contrib[pd.j] = std::max(contrib[pd.j], std::abs(pd.up.back() - pd.down.back()));
      for (const auto& [j, c] : contrib)
        if (sep.j0 && j != *sep.j0 && contrib.count(*sep.j0) &&
            c > contrib.at(*sep.j0) * 1.0001)
          rep.dominance_consistent = false;
    }
  }
  return rep;
}

}  // namespace gevrey
