#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "gevrey/series.hpp"

namespace gevrey {

// Diagonal Pade approximant of a truncated series, with pole/residue
// diagnostics.  The denominator is the minimum-norm least-squares solution of
// the Hankel system, so rank-deficient cases (exactly rational inputs) reduce
// gracefully instead of failing.
class PadeApproximant {
 public:
  static PadeApproximant build(const CplxSeries& b, int degree = -1) {
    const int n = b.trunc_order();
    int m = (degree > 0) ? degree : n / 2;
    m = std::min(m, n / 2);
    if (m < 1) throw validation_error("pade: need at least 2 certified coefficients");
    PadeApproximant out;
    out.m_ = m;
    solve(b, m, out.p_, out.q_);
    if (m >= 2) solve(b, m - 1, out.p_lo_, out.q_lo_);
    else { out.p_lo_ = out.p_; out.q_lo_ = out.q_; }
    out.find_poles(b);
    return out;
  }

  // Equal-degree rational evaluation; switches to the reversed form in 1/t
  // for |t| > 1 so large arguments stay finite.
  Cplx eval(const Cplx& t) const { return ratio(p_, q_, t); }
  Cplx eval_lower(const Cplx& t) const { return ratio(p_lo_, q_lo_, t); }

  // heuristic continuation error: disagreement of consecutive diagonals
  double eval_error(const Cplx& t) const { return std::abs(eval(t) - eval_lower(t)); }

  const std::vector<Cplx>& poles() const { return poles_; }
  const std::vector<double>& residue_moduli() const { return residue_moduli_; }
  int degree() const { return m_; }

  // distance from t to the nearest pole with residue modulus above the floor
  double pole_distance(const Cplx& t, double residue_floor = 0.0) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < poles_.size(); ++i) {
      if (residue_moduli_[i] <= residue_floor) continue;
      best = std::min(best, std::abs(t - poles_[i]));
    }
    return best;
  }

  // distance from the ray {r e^{i theta} : r > 0} to the nearest significant pole
  double ray_pole_distance(double theta, double residue_floor = 0.0) const {
    double best = std::numeric_limits<double>::infinity();
    const Cplx dir(std::cos(theta), std::sin(theta));
    for (size_t i = 0; i < poles_.size(); ++i) {
      if (residue_moduli_[i] <= residue_floor) continue;
      const Cplx& z = poles_[i];
      double proj = z.real() * dir.real() + z.imag() * dir.imag();
      double d = (proj <= 0) ? std::abs(z) : std::abs(z - proj * dir);
      best = std::min(best, d);
    }
    return best;
  }

 private:
  static Cplx horner(const std::vector<Cplx>& c, const Cplx& t) {
    Cplx acc(0.0, 0.0);
    for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  }
  static Cplx horner_reversed(const std::vector<Cplx>& c, const Cplx& s) {
    Cplx acc(0.0, 0.0);
    for (const Cplx& ci : c) acc = acc * s + ci;
    return acc;
  }
  static Cplx ratio(const std::vector<Cplx>& p, const std::vector<Cplx>& q, const Cplx& t) {
    if (std::abs(t) <= 1.0) return horner(p, t) / horner(q, t);
    const Cplx s = 1.0 / t;  // common power t^m cancels, p and q have equal length
    return horner_reversed(p, s) / horner_reversed(q, s);
  }

  static void solve(const CplxSeries& b, int m, std::vector<Cplx>& p, std::vector<Cplx>& q) {
    Eigen::MatrixXcd H(m, m);
    Eigen::VectorXcd rhs(m);
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= m; ++j) H(i - 1, j - 1) = b[m + i - j];
      rhs(i - 1) = -b[m + i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    Eigen::VectorXcd qs = svd.solve(rhs);
    q.assign(static_cast<size_t>(m) + 1, Cplx(0.0, 0.0));
    q[0] = Cplx(1.0, 0.0);
    for (int j = 1; j <= m; ++j) q[static_cast<size_t>(j)] = qs(j - 1);
    p.assign(static_cast<size_t>(m) + 1, Cplx(0.0, 0.0));
    for (int i = 0; i <= m; ++i) {
      Cplx acc(0.0, 0.0);
      for (int j = 0; j <= std::min(i, m); ++j) acc += q[static_cast<size_t>(j)] * b[i - j];
      p[static_cast<size_t>(i)] = acc;
    }
  }

  void find_poles(const CplxSeries& b) {
    // trim negligible leading denominator coefficients before the companion solve
    double qmax = 0.0;
    for (const Cplx& c : q_) qmax = std::max(qmax, std::abs(c));
    int deg = static_cast<int>(q_.size()) - 1;
    while (deg > 0 && std::abs(q_[static_cast<size_t>(deg)]) < 1e-13 * qmax) --deg;
    if (deg < 1) return;
    Eigen::MatrixXcd comp2 = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 0; i < deg - 1; ++i) comp2(i + 1, i) = 1.0;
    for (int i = 0; i < deg; ++i) comp2(i, deg - 1) = -q_[static_cast<size_t>(i)] / q_[static_cast<size_t>(deg)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp2, false);
    double scale = 0.0;
    for (int n = 0; n <= b.trunc_order(); ++n) scale = std::max(scale, std::abs(b[n]));
    for (int i = 0; i < deg; ++i) {
      Cplx z = es.eigenvalues()(i);
      Cplx dq(0.0, 0.0);
      for (size_t j = 1; j < q_.size(); ++j)
        dq += static_cast<double>(j) * q_[j] * std::pow(z, static_cast<double>(j - 1));
      double resid = (std::abs(dq) > 0) ? std::abs(horner(p_, z) / dq) : 0.0;
      poles_.push_back(z);
      residue_moduli_.push_back(scale > 0 ? resid / scale : resid);
    }
  }

  int m_ = 0;
  std::vector<Cplx> p_, q_, p_lo_, q_lo_;
  std::vector<Cplx> poles_;
  std::vector<double> residue_moduli_;  // relative to the coefficient scale
};

}  // namespace gevrey
