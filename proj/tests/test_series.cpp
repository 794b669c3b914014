#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gevrey/laurent.hpp"
#include "gevrey/multiseries.hpp"
#include "gevrey/poly.hpp"
#include "gevrey/series.hpp"

using namespace gevrey;

namespace {

std::mt19937 rng(20240811u);

Rat rand_rat() {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  return Rat(num(rng), den(rng));
}

RatSeries rand_series(int order, bool zero_constant = false) {
  RatSeries s(order);
  for (int n = zero_constant ? 1 : 0; n <= order; ++n) s.set(n, rand_rat());
  return s;
}

RatPoly rand_qshort_poly(int q, int& nu_out) {
  std::uniform_int_distribution<int> nud(1, 3);
  int nu = nud(rng);
  int maxdeg = (q + 1) * nu - 1;
  std::vector<Rat> c(static_cast<size_t>(maxdeg) + 1, Rat(0));
  std::uniform_int_distribution<int> num(1, 9), den(1, 9), extra(-9, 9);
  c[static_cast<size_t>(nu)] = Rat(num(rng), den(rng));  // positive leading coefficient
  for (int d = nu + 1; d <= maxdeg; ++d) c[static_cast<size_t>(d)] = Rat(extra(rng), den(rng));
  nu_out = nu;
  return RatPoly(c);
}

}  // namespace

TEST_CASE("series arithmetic") {
  RatSeries one_plus_x({Rat(1), Rat(1)}, 3);
  RatSeries x({Rat(0), Rat(1)}, 3);

  SECTION("add") {
    RatSeries s = one_plus_x + x;
    CHECK(s[0] == 1);
    CHECK(s[1] == 2);
    CHECK(s[2] == 0);
  }
  SECTION("mul to truncation") {
    RatSeries a({Rat(1), Rat(1)}, 2), b({Rat(1), Rat(-1)}, 2);
    RatSeries p = a * b;
    CHECK(p[0] == 1);
    CHECK(p[1] == 0);
    CHECK(p[2] == -1);
    CHECK(p.trunc_order() == 2);
  }
  SECTION("sub identity") {
    RatSeries a = rand_series(6);
    CHECK((a - a).zero_to_trunc());
  }
  SECTION("trunc order is min of operands") {
    RatSeries a = rand_series(6), b = rand_series(4);
    CHECK((a + b).trunc_order() == 4);
    CHECK((a * b).trunc_order() == 4);
  }
}

TEST_CASE("series composition") {
  SECTION("F=X+X^2, P=2X") {
    RatSeries f({Rat(0), Rat(1), Rat(1)}, 2);
    RatSeries p({Rat(0), Rat(2)}, 2);
    RatSeries c = compose(f, p);
    CHECK(c[1] == 2);
    CHECK(c[2] == 4);
  }
  SECTION("identity") {
    RatSeries f = rand_series(8);
    RatSeries c = compose(f, RatSeries::identity(8));
    CHECK(c.agrees_with(f));
  }
  SECTION("F=X+X^2+2X^3, P=X^2") {
    RatSeries f({Rat(0), Rat(1), Rat(1), Rat(2)}, 3);
    RatSeries p = RatSeries::from_poly(RatPoly::monomial(2), 6);
    RatSeries c = compose(f, p);
    REQUIRE(c.trunc_order() == 6);  // min(3*2, 6)
    CHECK(c[2] == 1);
    CHECK(c[4] == 1);
    CHECK(c[6] == 2);
    CHECK(c[3] == 0);
    CHECK(c[5] == 0);
  }
  SECTION("rejects P(0) != 0") {
    RatSeries f = rand_series(4);
    RatSeries p = RatSeries::constant(Rat(1), 4);
    CHECK_THROWS_AS(compose(f, p), validation_error);
  }
  SECTION("certified order min(NF*ordP, NP)") {
    RatSeries f = rand_series(3);
    RatSeries p(10);
    p.set(2, Rat(1));
    p.set(3, Rat(5));
    CHECK(compose(f, p).trunc_order() == 6);
  }
  SECTION("associativity to common order") {
    for (int trial = 0; trial < 25; ++trial) {
      RatSeries f = rand_series(8);
      RatSeries p = rand_series(8, true);
      RatSeries q = rand_series(8, true);
      if (!p.order() || !q.order()) continue;
      RatSeries lhs = compose(compose(f, p), q);
      RatSeries rhs = compose(f, compose(p, q));
      int common = std::min(lhs.trunc_order(), rhs.trunc_order());
      CHECK(lhs.agrees_with(rhs, common));
    }
  }
}

TEST_CASE("series order") {
  RatSeries a({Rat(0), Rat(0), Rat(1), Rat(1)}, 3);
  CHECK(a.order() == 2);
  RatSeries b({Rat(3), Rat(1)}, 1);
  CHECK(b.order() == 0);
  RatSeries z(5);
  CHECK(!z.order().has_value());
  CHECK(z.zero_to_trunc());
}

TEST_CASE("ring laws to truncation") {
  for (int trial = 0; trial < 30; ++trial) {
    RatSeries a = rand_series(7), b = rand_series(7), c = rand_series(7);
    CHECK(((a + b) + c).agrees_with(a + (b + c)));
    CHECK((a * b).agrees_with(b * a));
    CHECK((a * (b + c)).agrees_with(a * b + a * c));
    CHECK(((a * b) * c).agrees_with(a * (b * c)));
  }
}

TEST_CASE("laurent composition with pure principal Q") {
  SECTION("Q=-1/X, P=2X") {
    RatLaurent q = RatLaurent::pure_principal({{-1, Rat(-1)}});
    RatLaurent l = laurent_compose_q(q, RatPoly({Rat(0), Rat(2)}), 4);
    CHECK(l.coeff(-1) == Rat(-1, 2));
    CHECK(l.regular().zero_to_trunc());
  }
  SECTION("Q=-1/X, P=X identity") {
    RatLaurent q = RatLaurent::pure_principal({{-1, Rat(-1)}});
    RatLaurent l = laurent_compose_q(q, RatPoly({Rat(0), Rat(1)}), 4);
    CHECK(l.coeff(-1) == -1);
    CHECK(l.regular().zero_to_trunc());
    CHECK(l.principal().size() == 1);
  }
  SECTION("Q=-1/(2X^2), P=X+X^2") {
    RatLaurent q = RatLaurent::pure_principal({{-2, Rat(-1, 2)}});
    RatPoly p({Rat(0), Rat(1), Rat(1)});
    RatLaurent l = laurent_compose_q(q, p, 6);
    CHECK(l.coeff(-2) == Rat(-1, 2));
    CHECK(l.coeff(-1) == Rat(1));
    CHECK(l.coeff(0) == Rat(-3, 2));
    CHECK(l.coeff(1) == Rat(2));
    // reconstruction: (Q o P) * P^2 == -1/2 through the certified order
    RatPoly p2 = p * p;
    RatSeries reg_part = l.regular();
    RatSeries prod = reg_part * RatSeries::from_poly(p2, reg_part.trunc_order());
    // principal contributions: coeff(-2) X^{-2} P^2 and coeff(-1) X^{-1} P^2
    RatSeries from_m2 = RatSeries::from_poly(p2, 8).shift_down(2) * l.coeff(-2);
    RatSeries from_m1 = RatSeries::from_poly(p2, 7).shift_down(1) * l.coeff(-1);
    RatSeries total = prod + from_m2 + from_m1;
    CHECK(total[0] == Rat(-1, 2));
    for (int n = 1; n <= total.trunc_order(); ++n) CHECK(total[n] == 0);
  }
  SECTION("rejects P == 0 and P(0) != 0") {
    RatLaurent q = RatLaurent::pure_principal({{-1, Rat(-1)}});
    CHECK_THROWS_AS(laurent_compose_q(q, RatPoly(), 4), validation_error);
    CHECK_THROWS_AS(laurent_compose_q(q, RatPoly({Rat(1), Rat(1)}), 4), validation_error);
  }
  SECTION("leading term -a0/c_nu^q z^{-nu q} for Q_a over random q-short P") {
    for (int trial = 0; trial < 40; ++trial) {
      std::uniform_int_distribution<int> qd(1, 4);
      int q = qd(rng);
      std::vector<Rat> ac(static_cast<size_t>(q) + 1);
      std::uniform_int_distribution<int> num(1, 9), den(1, 9), any(-9, 9);
      ac[0] = Rat(num(rng), den(rng));
      for (int m = 1; m <= q; ++m) ac[static_cast<size_t>(m)] = Rat(any(rng), den(rng));
      RatPoly a(ac);
      RatLaurent qa = stokes_phase_qa(a, q);
      int nu = 0;
      RatPoly p = rand_qshort_poly(q, nu);
      RatLaurent l = laurent_compose_q(qa, p, 2);
      auto [e, c] = l.leading();
      CHECK(e == -nu * q);
      Rat cq(1);
      for (int i = 0; i < q; ++i) cq *= p[nu];
      // leading coefficient carries the 1/q from the x^{-q} a_0/q term of Q_a
      CHECK(c == -a[0] / (Rat(q) * cq));
    }
  }
}

TEST_CASE("principal part") {
  RatLaurent l({{-1, Rat(-1)}}, RatSeries({Rat(1), Rat(1)}, 1));
  RatLaurent pp = principal_part(l);
  CHECK(pp.coeff(-1) == -1);
  CHECK(pp.regular().zero_to_trunc());

  RatLaurent reg_only({}, RatSeries({Rat(0), Rat(1), Rat(1)}, 2));
  CHECK(principal_part(reg_only).principal_zero());

  // Q_a(q=1, a0=1) composed with X and 2X, difference
  RatLaurent qa = stokes_phase_qa(RatPoly({Rat(1)}), 1);
  RatLaurent d = laurent_compose_q(qa, RatPoly({Rat(0), Rat(1)}), 4) -
                 laurent_compose_q(qa, RatPoly({Rat(0), Rat(2)}), 4);
  RatLaurent dp = principal_part(d);
  CHECK(dp.coeff(-1) == Rat(-1, 2));
  CHECK(dp.principal().size() == 1);
}

TEST_CASE("binomial decomposition") {
  SECTION("F=Y1^2") {
    RatMultiSeries f({"X", "Y1"});
    f.add_term({0, 2}, Rat(1));
    auto dec = binom_decompose(f);
    REQUIRE(dec.factors.size() == 1);
    // B1 = Y1 + Z1
    CHECK(dec.factors[0].coeff({0, 1, 0}) == 1);
    CHECK(dec.factors[0].coeff({0, 0, 1}) == 1);
    CHECK(dec.factors[0].terms().size() == 2);
  }
  SECTION("F=X has zero factors") {
    RatMultiSeries f({"X", "Y1", "Y2"});
    f.add_term({1, 0, 0}, Rat(1));
    auto dec = binom_decompose(f);
    REQUIRE(dec.factors.size() == 2);
    CHECK(dec.factors[0].empty());
    CHECK(dec.factors[1].empty());
  }
  SECTION("F=Y1*Y2 diagonal identity") {
    RatMultiSeries f({"X", "Y1", "Y2"});
    f.add_term({0, 1, 1}, Rat(1));
    auto dec = binom_decompose(f);
    REQUIRE(dec.factors.size() == 2);
    // vars: X Y1 Y2 Z1 Z2; fold Z_i onto Y_i
    std::map<size_t, size_t> fold{{3, 1}, {4, 2}};
    RatMultiSeries b1_diag = identify_vars(dec.factors[0], fold);
    RatMultiSeries b2_diag = identify_vars(dec.factors[1], fold);
    CHECK(b1_diag.coeff({0, 0, 1, 0, 0}) == 1);  // B1(X,Y,Y) = Y2
    CHECK(b1_diag.terms().size() == 1);
    CHECK(b2_diag.coeff({0, 1, 0, 0, 0}) == 1);  // B2(X,Y,Y) = Y1
    CHECK(b2_diag.terms().size() == 1);
  }
  SECTION("reconstruction and diagonal property, random F") {
    std::uniform_int_distribution<int> nvars(1, 4), deg(0, 2), nterms(1, 8), cnum(-5, 5);
    for (int trial = 0; trial < 25; ++trial) {
      int n = nvars(rng);
      std::vector<std::string> yvars{"X"};
      for (int i = 1; i <= n; ++i) yvars.push_back("Y" + std::to_string(i));
      RatMultiSeries f(yvars, 6);
      for (int t = 0, tn = nterms(rng); t < tn; ++t) {
        std::vector<int> e(yvars.size());
        for (auto& x : e) x = deg(rng);
        f.add_term(std::move(e), Rat(cnum(rng)));
      }
      auto dec = binom_decompose(f);
      const auto& vars = dec.vars;  // X, Y.., Z..
      // embed F(X,Y) and F(X,Z) into the extended variable list
      RatMultiSeries fy(vars, 6), fz(vars, 6);
      for (const auto& [e, v] : f.terms()) {
        std::vector<int> ey(vars.size(), 0), ez(vars.size(), 0);
        ey[0] = ez[0] = e[0];
        for (int i = 0; i < n; ++i) {
          ey[1 + static_cast<size_t>(i)] = e[1 + static_cast<size_t>(i)];
          ez[1 + static_cast<size_t>(n + i)] = e[1 + static_cast<size_t>(i)];
        }
        fy.add_term(std::move(ey), v);
        fz.add_term(std::move(ez), v);
      }
      RatMultiSeries sum(vars, 6);
      for (int i = 0; i < n; ++i) {
        RatMultiSeries yi = RatMultiSeries::variable(vars, 1 + static_cast<size_t>(i), 6);
        RatMultiSeries zi = RatMultiSeries::variable(vars, 1 + static_cast<size_t>(n + i), 6);
        RatMultiSeries bi = dec.factors[static_cast<size_t>(i)];
        bi.set_trunc_degree(6);  // exact product below degree bound
        sum = sum + bi * (yi - zi);
      }
      CHECK(sum == fy - fz);
      // diagonal: B_i(X,Y,Y) == dF/dY_i embedded
      for (int i = 0; i < n; ++i) {
        std::map<size_t, size_t> fold;
        for (int j = 0; j < n; ++j)
          fold[1 + static_cast<size_t>(n + j)] = 1 + static_cast<size_t>(j);
        RatMultiSeries diag = identify_vars(dec.factors[static_cast<size_t>(i)], fold);
        RatMultiSeries df = fy.derivative(1 + static_cast<size_t>(i));
        CHECK(diag == df);
      }
    }
  }
}

TEST_CASE("multivariate substitution") {
  SECTION("identity on single variable") {
    RatMultiSeries f({"X", "Z11"});
    f.add_term({0, 1}, Rat(1));
    RatSeries s = rand_series(6, true);
    RatSeries r = mv_substitute(f, {{"Z11", s}});
    CHECK(r.agrees_with(s));
    CHECK(r.trunc_order() == 6);
  }
  SECTION("EX1 component product") {
    RatMultiSeries f({"X", "Z11", "Z21"});
    f.add_term({0, 1, 1}, Rat(1));
    RatSeries h1({Rat(0), Rat(-1), Rat(-1), Rat(-1), Rat(0)}, 4);
    RatSeries h2({Rat(0), Rat(0), Rat(1), Rat(3), Rat(10)}, 4);
    RatSeries r = mv_substitute(f, {{"Z11", h1}, {"Z21", h2}});
    REQUIRE(r.trunc_order() == 4);
    CHECK(r[3] == -1);
    CHECK(r[4] == -4);
    CHECK(r[0] == 0);
    CHECK(r[1] == 0);
    CHECK(r[2] == 0);
    // independent oracle: plain series product
    CHECK(r.agrees_with(h1 * h2));
  }
  SECTION("identical monomials cancel at construction") {
    RatMultiSeries f({"X", "Z11"});
    f.add_term({0, 2}, Rat(1));
    f.add_term({0, 2}, Rat(-1));
    CHECK(f.empty());
    RatSeries r = mv_substitute(f, {{"Z11", rand_series(5, true)}});
    CHECK(r.zero_to_trunc());
  }
  SECTION("rejects nonzero constant term") {
    RatMultiSeries f({"X", "Z11"});
    f.add_term({0, 1}, Rat(1));
    RatSeries s = rand_series(4);
    s.set(0, Rat(1));
    CHECK_THROWS_AS(mv_substitute(f, {{"Z11", s}}), validation_error);
  }
  SECTION("certified order is min over used substitutions") {
    RatMultiSeries f({"X", "Z11", "Z21"}, 10);
    f.add_term({1, 1, 0}, Rat(1));  // depends only on Z11
    RatSeries s1 = rand_series(7, true), s2 = rand_series(3, true);
    RatSeries r = mv_substitute(f, {{"Z11", s1}, {"Z21", s2}});
    CHECK(r.trunc_order() == 7);
  }
  SECTION("random F against a term-by-term oracle") {
    std::uniform_int_distribution<int> deg(0, 2), nterms(1, 6), cnum(-5, 5);
    for (int trial = 0; trial < 20; ++trial) {
      RatMultiSeries f({"X", "Z11", "Z21"}, 8);
      for (int t = 0, tn = nterms(rng); t < tn; ++t)
        f.add_term({deg(rng), deg(rng), deg(rng)}, Rat(cnum(rng)));
      RatSeries s1 = rand_series(8, true), s2 = rand_series(8, true);
      RatSeries got = mv_substitute(f, {{"Z11", s1}, {"Z21", s2}});
      // oracle: expand each term with fresh multiplications
      RatSeries expect(got.trunc_order());
      for (const auto& [e, v] : f.terms()) {
        RatSeries term = RatSeries::constant(v, got.trunc_order());
        for (int k = 0; k < e[1]; ++k) term = term * s1.truncate(got.trunc_order());
        for (int k = 0; k < e[2]; ++k) term = term * s2.truncate(got.trunc_order());
        for (int k = 0; k < e[0]; ++k)
          term = term * RatSeries::identity(got.trunc_order());
        expect = expect + term;
      }
      CHECK(got.agrees_with(expect));
    }
  }
}
