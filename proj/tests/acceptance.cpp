// Acceptance suite: runs every criterion at its stated tolerance and prints
// one line per criterion.  Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "gevrey/gauge.hpp"
#include "gevrey/pipeline.hpp"
#include "gevrey/satcheck.hpp"
#include "gevrey/stokes.hpp"
#include "testutil.hpp"

using namespace gevrey;
using std::numbers::pi;

namespace {

struct Harness {
  int failures = 0;
  void criterion(int id, const std::string& name, const std::function<void()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
      body();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty()) {
      std::printf("PASS  criterion %2d: %s (%.2fs)\n", id, name.c_str(), secs);
    } else {
      std::printf("FAIL  criterion %2d: %s (%.2fs)\n      %s\n", id, name.c_str(), secs,
                  failure.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

CplxSeries euler_series(int n) {
  CplxSeries f(n);
  double fact = 1.0;
  for (int i = 0; i <= n; ++i) {
    f.set(i, Cplx(fact, 0.0));
    if (i < n) fact *= (i + 1);
  }
  return f;
}

}  // namespace

int main() {
  Harness h;
  const InterlacedSpec ex1 = testutil::make_ex1();
  const FinalFormSpec ex2 = testutil::make_ex2();
  const QuadratureParams params;

  h.criterion(1, "formal-solution oracle on EX1, exact residual at N=40", [&] {
    FormalSolution sol = formal_solution(ex1, 40);
    const Rat expect[4][2] = {{Rat(-1), Rat(0)}, {Rat(-1), Rat(1)}, {Rat(-1), Rat(3)}, {Rat(0), Rat(10)}};
    for (int n = 1; n <= 4; ++n) {
      require(sol.h[0][n] == expect[n - 1][0] && sol.h[1][n] == expect[n - 1][1],
              "EX1 coefficient h_" + std::to_string(n) + " mismatch");
    }
    auto res = ode_residual(SystemSpec(ex1), sol, 40);
    require(res[0].zero_to_trunc() && res[1].zero_to_trunc(),
            "residual has a nonzero coefficient at order <= 40");
  });

  h.criterion(2, "gauge identity + pullback correspondence on EX2 and 50 random final forms", [&] {
    std::mt19937 rng(1002u);
    std::vector<FinalFormSpec> specs{ex2};
    while (specs.size() < 51) specs.push_back(testutil::rand_finalform(rng, 4));
    for (const FinalFormSpec& s : specs) {
      GaugeResult gr = compute_gauge(s);
      PolyMat lhs = s.linear_part() * gr.T - gr.T * gr.D() -
                    detail::shift_mat(detail::derivative_mat(gr.T), s.q + 1) -
                    detail::shift_mat(gr.E, s.q + 1);
      require(detail::mat_zero(lhs), "gauge identity not exact (q=" + std::to_string(s.q) + ")");
      for (const auto& n : gr.nmats)
        require(n.a == n.d && n.b == -n.c, "N_j is not rotation-dilation shaped");
      require(!is_zero(gr.nmats[0].c), "b_0 vanished");
      InterlacedSpec pb = pullback_system(s, gr, 20);
      FormalSolution h_ff = formal_solution(s, 20);
      FormalSolution h_pb = formal_solution(pb, 20);
      auto mapped = apply_gauge(gr, h_pb.h);
      require(h_ff.h[0].agrees_with(mapped[0], 20) && h_ff.h[1].agrees_with(mapped[1], 20),
              "H_ff != T * H_pullback to order 20");
    }
    GaugeResult gex2 = compute_gauge(ex2);
    require(gex2.T.b == RatPoly({Rat(0), Rat(1, 4)}), "EX2 T_1 mismatch");
    require(gex2.nmats[1] == Mat2<Rat>(Rat(1, 2), Rat(0), Rat(0), Rat(1, 2)), "EX2 N_1 mismatch");
  });

  h.criterion(3, "shift coherence on EX1 and 20 random interlaced specs", [&] {
    std::mt19937 rng(1003u);
    ShiftResult sh = rk_shift(ex1, 20);
    require(sh.p.x == Rat(-1) && sh.p.y == Rat(0), "EX1 p mismatch");
    require(sh.new_spec.c.x == RatPoly({Rat(0), Rat(1)}) &&
                sh.new_spec.c.y == RatPoly({Rat(0), Rat(-1)}),
            "EX1 d(x) != (X, -X)");
    require(sh.new_spec.a == RatPoly({Rat(1), Rat(-1)}), "EX1 a_new != 1 - X");
    std::vector<InterlacedSpec> specs{ex1};
    while (specs.size() < 21) specs.push_back(testutil::rand_interlaced(rng, 3));
    for (const InterlacedSpec& s : specs) {
      ShiftResult r = rk_shift(s, 21);
      require(is_zero(r.new_spec.c.x[0]) && is_zero(r.new_spec.c.y[0]), "d(0) != 0");
      require(r.new_spec.c.x.degree() <= s.q && r.new_spec.c.y.degree() <= s.q, "deg d > q");
      FormalSolution resolved = formal_solution(r.new_spec, 20);
      require(resolved.h[0].agrees_with(r.new_solution_prefix.h[0], 20) &&
                  resolved.h[1].agrees_with(r.new_solution_prefix.h[1], 20),
              "formal_solution(new_spec) != H/X - p to order 20");
    }
  });

  h.criterion(4, "Laplace oracle vs closed-form integral, relative 1e-8", [&] {
    CplxSeries b(40);
    for (int n = 0; n <= 40; ++n) b.set(n, Cplx((n % 2 == 0) ? 1.0 : -1.0, 0.0));
    for (double x : {0.05, 0.1, 0.2}) {
      std::vector<LaplaceValue> got = laplace_sum(b, 1, 0.0, {Cplx(x, 0.0)}, params);
      boost::math::quadrature::exp_sinh<double> integrator;
      double oracle =
          integrator.integrate([&](double t) { return std::exp(-t / x) / (1.0 + t) / x; }, 1e-14);
      double rel = std::abs(got[0].value - oracle) / oracle;
      require(rel < 1e-8, "x=" + str(x) + ": relative error " + str(rel));
    }
  });

  h.criterion(5, "Stokes residue oracle: Delta_0 = 2 pi i e^{-1/x}/x within 3%", [&] {
    CplxSeries f = euler_series(40);
    SingularSet s = SingularSet::of({0.0});
    std::vector<Cplx> xs;
    for (int i = 0; i < 8; ++i) xs.emplace_back(0.2 * std::pow(0.05 / 0.2, i / 7.0), 0.0);
    SeriesStokesSample d = stokes_difference_series(f, 1, s, Direction(0), xs, params);
    for (size_t i = 0; i < xs.size(); ++i) {
      double x = xs[i].real();
      Cplx expect = Cplx(0.0, 2 * pi) * std::exp(-1.0 / x) / x;
      double rel = std::abs(d.values[i] - expect) / std::abs(expect);
      require(rel < 0.03, "x=" + str(x) + ": relative error " + str(rel));
    }
  });

  h.criterion(6, "Stokes model recovery: EX1 within 5%/10%, synthetic to 1e-6", [&] {
    FormalSolution sol = formal_solution(ex1, 40);
    std::vector<double> moduli;
    for (int i = 0; i < 12; ++i) moduli.push_back(0.2 * std::pow(0.05 / 0.2, i / 11.0));
    StokesSample sample = stokes_difference(ex1, sol, Direction(0), 0.3, moduli, params);
    StokesModel fit = fit_stokes_model(sample, ex1);
    require(std::abs(fit.exp_rate - 1.0) < 0.05,
            "exp_rate " + str(fit.exp_rate) + " not within 5% of a0 = 1");
    require(std::abs(fit.osc_freq - 1.0) < 0.10,
            "osc_freq " + str(fit.osc_freq) + " not within 10% of b0 = 1");

    std::vector<double> a{1.0, 0.3, -0.2};
    std::vector<double> bq{1.5, 0.7};
    std::vector<double> smoduli;
    for (int i = 0; i < 180; ++i) smoduli.push_back(0.2 * std::pow(0.04 / 0.2, i / 179.0));
    StokesSample synth = synthesize_stokes_sample(2, 1, a, bq, Cplx(0.4, 0.8), Cplx(-1.1, 0.2),
                                                  0.25, smoduli);
    InterlacedSpec spec2;
    spec2.q = 2;
    spec2.r = 1;
    spec2.a = RatPoly({Rat(1), Rat(3, 10), Rat(-1, 5)});
    spec2.b = RatPoly({Rat(3, 2), Rat(7, 10)});
    spec2.c = PolyVec{RatPoly({Rat(0), Rat(1)}), RatPoly()};
    StokesModel sfit = fit_stokes_model(synth, spec2);
    for (size_t i = 0; i < a.size(); ++i)
      require(std::abs(sfit.a_fitted[i] - a[i]) < 1e-6,
              "synthetic a_" + std::to_string(i) + " error " + str(std::abs(sfit.a_fitted[i] - a[i])));
    for (size_t i = 0; i < bq.size(); ++i)
      require(std::abs(sfit.b_fitted[i] - bq[i]) < 1e-6,
              "synthetic b_" + std::to_string(i) + " error " + str(std::abs(sfit.b_fitted[i] - bq[i])));
    require(std::abs(sfit.mu1 - Cplx(0.4, 0.8)) < 1e-6 && std::abs(sfit.mu2 - Cplx(-1.1, 0.2)) < 1e-6,
            "synthetic mu recovery error");
  });

  h.criterion(7, "Subclaim suite: 100 random q-short pairs, exact nonzero principal parts", [&] {
    std::mt19937 rng(1007u);
    std::uniform_int_distribution<int> qd(1, 4), nud(1, 3), num(1, 9), den(1, 9), any(-9, 9);
    auto rand_qshort = [&](int q) {
      int nu, cap;
      do {
        nu = nud(rng);
        cap = std::min(8, (q + 1) * nu - 1);
      } while (cap < nu);
      std::uniform_int_distribution<int> degd(nu, cap);
      int d = degd(rng);
      std::vector<Rat> c(static_cast<size_t>(d) + 1, Rat(0));
      c[static_cast<size_t>(nu)] = Rat(num(rng), den(rng));
      for (int i = nu + 1; i <= d; ++i) c[static_cast<size_t>(i)] = Rat(any(rng), den(rng));
      return RatPoly(c);
    };
    int done = 0;
    while (done < 100) {
      int q = qd(rng);
      RatPoly p1 = rand_qshort(q), p2 = rand_qshort(q);
      if (p1 == p2) continue;
      std::vector<Rat> ac(static_cast<size_t>(q) + 1);
      ac[0] = Rat(num(rng), den(rng));
      for (int m = 1; m <= q; ++m) ac[static_cast<size_t>(m)] = Rat(any(rng), den(rng));
      RatLaurent qa = stokes_phase_qa(RatPoly(ac), q);
      RatLaurent diff = principal_part(laurent_compose_q(qa, p1, 1) - laurent_compose_q(qa, p2, 1));
      require(!diff.principal_zero(),
              "zero principal part at pair " + std::to_string(done) + " (q=" + std::to_string(q) + ")");
      ++done;
    }
  });

  h.criterion(8, "direction/level calculus reproduces the displayed formulas", [&] {
    const double eps = 1e-12;
    for (int q : {1, 2, 3}) {
      InterlacedSpec s = ex1;
      s.q = q;
      s.r = 1;
      std::vector<Rat> cc(static_cast<size_t>(q) + 1, Rat(0));
      cc[1] = Rat(1);
      s.c = PolyVec{RatPoly(cc), RatPoly()};
      s.b = RatPoly{Rat(1)};
      SingularSet ss = singular_directions(s);
      require(static_cast<int>(ss.size()) == q, "wrong |S| for q=" + std::to_string(q));
      for (int p = 0; p < q; ++p)
        require(std::abs(ss.dirs[static_cast<size_t>(p)].theta - kTwoPi * p / q) < eps,
                "S entry mismatch");
      for (int nu : {1, 2, 3}) {
        SingularSet comp = composed_singulars(ss, nu);
        require(static_cast<int>(comp.size()) == q * nu, "|S'| != q nu");
        for (int p = 0; p < q * nu; ++p)
          require(std::abs(comp.dirs[static_cast<size_t>(p)].theta - kTwoPi * p / (q * nu)) < eps,
                  "S' entry mismatch");
        std::vector<RatPoly> polys;
        std::vector<Rat> pc(static_cast<size_t>(nu) + 1, Rat(0));
        pc[static_cast<size_t>(nu)] = Rat(1);
        polys.push_back(RatPoly(pc));
        CompositionLevels lv = multisum_levels(q, polys);
        require(lv.levels == std::vector<int>{nu * q}, "level k != nu q");
      }
    }
    Arc v = bisector_arc(Direction(0), 1);
    require(std::abs(v.lo - 3 * pi / 2) < eps && std::abs(v.length - pi) < eps,
            "V(0,1) mismatch");
    SingularSet s0 = SingularSet::of({0.0});
    require(std::abs(theta_plus(Direction(0), s0).theta - pi / 2) < eps, "theta+ mismatch");
    require(std::abs(theta_minus(Direction(0), s0).theta - 3 * pi / 2) < eps, "theta- mismatch");
    require(std::abs(direction_distance(Direction(0), Direction(3 * pi / 2)) - pi / 2) < eps,
            "d(0, 3pi/2) mismatch");
  });

  h.criterion(9, "quasi-analyticity surrogate: two lateral offsets agree on EX1", [&] {
    FormalSolution sol = formal_solution(ex1, 40);
    std::vector<Cplx> xs;
    for (double m : {0.15, 0.1, 0.07}) xs.push_back(m * std::exp(Cplx(0.0, 0.1)));
    for (int comp = 0; comp < 2; ++comp) {
      CplxSeries b = borel_transform(sol.h[static_cast<size_t>(comp)], 1);
      // two distinct rays inside the non-singular arc above direction 0
      std::vector<LaplaceValue> s1 = laplace_sum(b, 1, pi / 8, xs, params);
      std::vector<LaplaceValue> s2 = laplace_sum(b, 1, pi / 16, xs, params);
      for (size_t i = 0; i < xs.size(); ++i) {
        double tol = s1[i].error_estimate + s2[i].error_estimate + 1e-13;
        double diff = std::abs(s1[i].value - s2[i].value);
        require(diff <= tol, "component " + std::to_string(comp + 1) + ", |x|=" +
                                 str(std::abs(xs[i])) + ": |diff| " + str(diff) +
                                 " exceeds combined error " + str(tol));
      }
    }
  });

  h.criterion(10, "composed Stokes identity: F = Z11 exact, F = Z11 + Z21 within 5%", [&] {
    std::vector<QShortPoly> ps{QShortPoly::make(RatPoly({Rat(0), Rat(1)}), 1)};
    std::vector<Cplx> xs;
    for (int i = 0; i < 6; ++i)
      xs.push_back(0.18 * std::pow(0.06 / 0.18, i / 5.0) * std::exp(Cplx(0.0, 0.3)));

    RatMultiSeries fid({"X", "Z11"});
    fid.add_term({0, 1}, Rat(1));
    CompositionCheckReport rid =
        stokes_composition_check(fid, ex1, ps, Direction(0), xs, params);
    require(rid.max_rel_err < 1e-12, "identity case relative error " + str(rid.max_rel_err));

    RatMultiSeries fsum({"X", "Z11", "Z21"});
    fsum.add_term({0, 1, 0}, Rat(1));
    fsum.add_term({0, 0, 1}, Rat(1));
    CompositionCheckReport rsum =
        stokes_composition_check(fsum, ex1, ps, Direction(0), xs, params);
    require(rsum.max_rel_err < 0.05, "linear case relative error " + str(rsum.max_rel_err));
  });

  std::printf("%d of 10 criteria passed\n", 10 - h.failures);
  return h.failures;
}
