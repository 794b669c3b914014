#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gevrey/gauge.hpp"
#include "testutil.hpp"

using namespace gevrey;

namespace {

std::mt19937 rng(515151u);

PolyMat gauge_identity_residual(const FinalFormSpec& ff, const GaugeResult& gr) {
  PolyMat A = ff.linear_part();
  return A * gr.T - gr.T * gr.D() -
         detail::shift_mat(detail::derivative_mat(gr.T), ff.q + 1) -
         detail::shift_mat(gr.E, ff.q + 1);
}

}  // namespace

TEST_CASE("gauge on EX2") {
  FinalFormSpec ex2 = testutil::make_ex2();
  GaugeResult gr = compute_gauge(ex2);

  // T = I + X * (1/4)(0,1;1,0), T_2 = 0
  CHECK(gr.T.a == RatPoly{Rat(1)});
  CHECK(gr.T.d == RatPoly{Rat(1)});
  CHECK(gr.T.b == RatPoly({Rat(0), Rat(1, 4)}));
  CHECK(gr.T.c == RatPoly({Rat(0), Rat(1, 4)}));
  CHECK(gr.T.b.degree() <= 1);

  // N_0 = J(0), N_1 = I/2
  REQUIRE(gr.nmats.size() == 2);
  CHECK(gr.nmats[0] == Mat2<Rat>::rotation_j());
  CHECK(gr.nmats[1] == Mat2<Rat>(Rat(1, 2), Rat(0), Rat(0), Rat(1, 2)));

  CHECK(detail::mat_zero(gauge_identity_residual(ex2, gr)));

  SECTION("pullback has a = 1 + X^2/2, b = 1") {
    InterlacedSpec pb = pullback_system(ex2, gr, 20);
    CHECK(pb.a == RatPoly({Rat(1), Rat(0), Rat(1, 2)}));
    CHECK(pb.b == RatPoly{Rat(1)});
    CHECK(pb.c.x.zero());
    CHECK(pb.c.y.zero());
    CHECK(validate_system(pb).valid());
  }
}

TEST_CASE("gauge boundary cases") {
  SECTION("constant J gives T = I, N = J0, E = 0") {
    for (int r = 1; r <= 3; ++r) {
      FinalFormSpec s;
      s.q = 3;
      s.r = r;
      std::vector<Rat> ac(static_cast<size_t>(r), Rat(0));
      ac[0] = Rat(2);
      s.a = RatPoly(ac);
      s.jmat = PolyMat{RatPoly{Rat(1)}, RatPoly{Rat(-3)}, RatPoly{Rat(3)}, RatPoly{Rat(1)}};
      GaugeResult gr = compute_gauge(s);
      CHECK(gr.T.a == RatPoly{Rat(1)});
      CHECK(gr.T.b.zero());
      CHECK(gr.T.c.zero());
      CHECK(gr.nmats[0] == Mat2<Rat>(Rat(1), Rat(-3), Rat(3), Rat(1)));
      CHECK(detail::mat_zero(gr.E));
      CHECK(detail::mat_zero(gauge_identity_residual(s, gr)));
    }
  }
  SECTION("r = q means no induction steps") {
    FinalFormSpec s;
    s.q = 2;
    s.r = 2;
    s.a = RatPoly({Rat(1), Rat(1)});
    s.jmat = PolyMat{RatPoly{Rat(0)}, RatPoly{Rat(-1)}, RatPoly{Rat(1)}, RatPoly{Rat(0)}};
    GaugeResult gr = compute_gauge(s);
    CHECK(gr.nmats.size() == 1);
    CHECK(gr.T.a == RatPoly{Rat(1)});
    CHECK(gr.T.b.zero());
    CHECK(gr.nmats[0] == Mat2<Rat>::rotation_j());
  }
  SECTION("gauge is idempotent on interlaced systems") {
    for (int t = 0; t < 15; ++t) {
      std::uniform_int_distribution<int> qd(1, 4);
      int q = qd(rng);
      std::uniform_int_distribution<int> rd(1, q);
      int r = rd(rng);
      std::vector<Rat> ac(static_cast<size_t>(r), Rat(0));
      ac[0] = testutil::rand_rat_positive(rng);
      for (int i = 1; i < r; ++i) ac[static_cast<size_t>(i)] = testutil::rand_rat(rng);
      std::vector<Rat> bc(static_cast<size_t>(q - r) + 1, Rat(0));
      bc[0] = testutil::rand_rat_nonzero(rng);
      for (int i = 1; i <= q - r; ++i) bc[static_cast<size_t>(i)] = testutil::rand_rat(rng);
      RatPoly b(bc);
      FinalFormSpec s{q, r, RatPoly(ac), PolyMat{RatPoly(), -b, b, RatPoly()}, zero_g()};
      GaugeResult gr = compute_gauge(s);
      CHECK(gr.T.a == RatPoly{Rat(1)});
      CHECK(gr.T.d == RatPoly{Rat(1)});
      CHECK(gr.T.b.zero());
      CHECK(gr.T.c.zero());
    }
  }
  SECTION("rejects r = q+1") {
    FinalFormSpec s;
    s.q = 1;
    s.r = 2;
    s.a = RatPoly({Rat(1), Rat(1)});
    CHECK_THROWS_AS(compute_gauge(s), validation_error);
  }
}

TEST_CASE("gauge identity and pullback correspondence on random final forms") {
  int done = 0;
  while (done < 25) {
    FinalFormSpec s = testutil::rand_finalform(rng, 4);
    GaugeResult gr = compute_gauge(s);

    // exact polynomial identity, no tolerance
    CHECK(detail::mat_zero(gauge_identity_residual(s, gr)));

    // rotation-dilation shape for every N_j, leading rotation nonzero
    for (const auto& n : gr.nmats) {
      CHECK(n.a == n.d);
      CHECK(n.b == -n.c);
    }
    CHECK(!is_zero(gr.nmats[0].c));

    // degree bounds
    CHECK(gr.E.a.degree() <= s.q);
    CHECK(gr.E.b.degree() <= s.q);
    CHECK(gr.T.a.degree() <= s.q);

    // solution correspondence H_ff = T * H_pullback, exact to order 20
    InterlacedSpec pb = pullback_system(s, gr, 20);
    FormalSolution h_ff = formal_solution(s, 20);
    FormalSolution h_pb = formal_solution(pb, 20);
    auto mapped = apply_gauge(gr, h_pb.h);
    CHECK(h_ff.h[0].agrees_with(mapped[0], 20));
    CHECK(h_ff.h[1].agrees_with(mapped[1], 20));
    ++done;
  }
}

TEST_CASE("pullback leaves already-interlaced linear parts unchanged") {
  FinalFormSpec s;
  s.q = 2;
  s.r = 1;
  s.a = RatPoly{Rat(3)};
  s.jmat = PolyMat{RatPoly{Rat(2)}, RatPoly{Rat(-5)}, RatPoly{Rat(5)}, RatPoly{Rat(2)}};
  GaugeResult gr = compute_gauge(s);
  InterlacedSpec pb = pullback_system(s, gr, 10);
  // same system written in interlaced coordinates:
  // a + x^r * diag part, b = rotation part
  CHECK(pb.a == s.a + RatPoly::monomial(1, Rat(2)));
  CHECK(pb.b == RatPoly{Rat(5)});
  CHECK(g_is_zero(pb.g));
  // linear parts agree as matrices
  PolyMat lp_ff = s.linear_part();
  PolyMat lp_pb = pb.linear_part();
  CHECK(lp_ff.a == lp_pb.a);
  CHECK(lp_ff.b == lp_pb.b);
  CHECK(lp_ff.c == lp_pb.c);
  CHECK(lp_ff.d == lp_pb.d);
}
