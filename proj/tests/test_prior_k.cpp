#include <cmath>
#include <vector>

#include "doctest.h"
#include "mfm/errors.hpp"
#include "mfm/math_util.hpp"
#include "mfm/prior_k.hpp"
#include "mfm/rng.hpp"

using namespace mfm;

TEST_CASE("dirichlet schedule") {
  DirichletSchedule s = static_schedule(2.5);
  CHECK(s.gamma_at(1) == 2.5);
  CHECK(s.gamma_at(10) == 2.5);
  DirichletSchedule d = dynamic_schedule(2.5);
  CHECK(d.gamma_at(1) == 2.5);
  CHECK(d.gamma_at(10) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(static_schedule(0.0), std::domain_error);
  CHECK_THROWS_AS(dynamic_schedule(-1.0), std::domain_error);
  CHECK_THROWS_AS(d.gamma_at(0), std::domain_error);
  CHECK(to_string(MfmKind::static_mfm) == "static");
  CHECK(parse_mfm_kind("dynamic") == MfmKind::dynamic_mfm);
  CHECK_THROWS_AS(parse_mfm_kind("both"), ParseError);
}

TEST_CASE("pmf values") {
  PriorOnK u = PriorOnK::uniform_on(1, 30);
  CHECK(u.pmf(1) == doctest::Approx(1.0 / 30).epsilon(1e-14));
  CHECK(u.pmf(30) == doctest::Approx(1.0 / 30).epsilon(1e-14));
  CHECK(u.pmf(31) == 0.0);
  CHECK_THROWS_AS(u.pmf(0), std::domain_error);

  PriorOnK tp = PriorOnK::trunc_poisson(3.0);
  double tp1 = 3.0 * std::exp(-3.0) / (1.0 - std::exp(-3.0));
  CHECK(tp.pmf(1) == doctest::Approx(tp1).epsilon(1e-12));
  CHECK(tp.pmf(1) == doctest::Approx(0.15718708947376786).epsilon(1e-12));

  PriorOnK g = PriorOnK::shifted_geometric(0.1);
  CHECK(g.pmf(1) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g.pmf(2) == doctest::Approx(0.09).epsilon(1e-14));

  PriorOnK b = PriorOnK::shifted_bnb(1.0, 4.0, 3.0);
  CHECK(b.pmf(1) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("factories validate") {
  CHECK_THROWS_AS(PriorOnK::uniform_on(0, 5), std::domain_error);
  CHECK_THROWS_AS(PriorOnK::uniform_on(5, 4), std::domain_error);
  CHECK_THROWS_AS(PriorOnK::trunc_poisson(0.0), std::domain_error);
  CHECK_THROWS_AS(PriorOnK::shifted_geometric(0.0), std::domain_error);
  CHECK_THROWS_AS(PriorOnK::shifted_geometric(1.5), std::domain_error);
  CHECK_THROWS_AS(PriorOnK::shifted_bnb(1.0, 0.0, 3.0), std::domain_error);
}

TEST_CASE("pmf normalises over the truncated support") {
  for (const PriorOnK& q :
       {PriorOnK::uniform_on(1, 30), PriorOnK::trunc_poisson(3.0),
        PriorOnK::shifted_geometric(0.1), PriorOnK::shifted_bnb(1.0, 4.0, 3.0)}) {
    int kmax = q.tail_truncation(1e-12);
    KahanSum total;
    for (int k = 1; k <= kmax; ++k) total.add(q.pmf(k));
    CHECK(total.value() == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("moments against closed forms and a direct oracle") {
  auto [um, uv] = PriorOnK::uniform_on(1, 30).moments();
  CHECK(um == doctest::Approx(15.5).epsilon(1e-14));
  CHECK(uv == doctest::Approx(74.9166666666667).epsilon(1e-12));

  // zero-truncated Poisson oracle: normalise a long Poisson table directly
  double lam = 3.0;
  long double norm = 0.0L, m1 = 0.0L, m2 = 0.0L, pk = lam * std::exp(-lam);
  for (int k = 1; k <= 200; ++k) {
    norm += pk;
    m1 += k * pk;
    m2 += static_cast<long double>(k) * k * pk;
    pk *= lam / (k + 1);
  }
  double oracle_mean = static_cast<double>(m1 / norm);
  double oracle_var = static_cast<double>(m2 / norm - (m1 / norm) * (m1 / norm));
  auto [tm, tv] = PriorOnK::trunc_poisson(3.0).moments();
  CHECK(tm == doctest::Approx(oracle_mean).epsilon(1e-12));
  CHECK(tv == doctest::Approx(oracle_var).epsilon(1e-10));
  CHECK(tm == doctest::Approx(3.1572).epsilon(1e-4));
  CHECK(tv == doctest::Approx(2.6609).epsilon(1e-4));

  auto [gm, gv] = PriorOnK::shifted_geometric(0.1).moments();
  CHECK(gm == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(gv == doctest::Approx(90.0).epsilon(1e-9));

  // K-1 ~ BNB(alpha,a,b): mean 1 + alpha b/(a-1) = 2 and variance
  // alpha b (alpha+a-1)(a+b-1) / ((a-2)(a-1)^2) = 4 at (1, 4, 3).
  auto [bm, bv] = PriorOnK::shifted_bnb(1.0, 4.0, 3.0).moments();
  CHECK(bm == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(bv == doctest::Approx(4.0).epsilon(1e-7));

  auto [dm, dv] = PriorOnK::shifted_geometric(1.0).moments();
  CHECK(dm == 1.0);
  CHECK(dv == 0.0);
}

TEST_CASE("moments by Monte Carlo inverse-cdf sampling") {
  for (const PriorOnK& q :
       {PriorOnK::uniform_on(1, 30), PriorOnK::trunc_poisson(3.0),
        PriorOnK::shifted_geometric(0.1), PriorOnK::shifted_bnb(1.0, 4.0, 3.0)}) {
    int kmax = q.tail_truncation(1e-9);
    std::vector<double> cum(kmax);
    double run = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      run += q.pmf(k);
      cum[k - 1] = run;
    }
    Rng rng(fnv1a64(q.str()));
    const int m = 1000000;
    KahanSum s1, s2, s3, s4;
    for (int i = 0; i < m; ++i) {
      double k = 1.0 + rng.categorical_from_cumulative(cum);
      s1.add(k);
      s2.add(k * k);
      s3.add(k * k * k);
      s4.add(k * k * k * k);
    }
    double mean = s1.value() / m;
    double var = s2.value() / m - mean * mean;
    auto [em, ev] = q.moments();
    // standard errors estimated from the sample itself
    double se_mean = std::sqrt(var / m);
    double m4 = s4.value() / m - 4 * mean * s3.value() / m + 6 * mean * mean * s2.value() / m -
                3 * mean * mean * mean * mean;
    double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / m);
    INFO("prior ", q.str());
    CHECK(std::fabs(mean - em) <= 3.5 * se_mean + 1e-9);
    CHECK(std::fabs(var - ev) <= 3.5 * se_var + 1e-6);
  }
}

TEST_CASE("tail_truncation") {
  PriorOnK u = PriorOnK::uniform_on(1, 30);
  CHECK(u.tail_truncation(1e-12) == 30);
  CHECK(u.tail_truncation(0.5) == 16);
  // tail must drop strictly below eps: P(K > 1) = 0.9 is not enough
  CHECK(PriorOnK::shifted_geometric(0.1).tail_truncation(0.9) == 2);
  CHECK(PriorOnK::trunc_poisson(3.0).tail_truncation(1e-12) == 22);

  // property check with an independent long-double accumulation
  for (const PriorOnK& q :
       {PriorOnK::trunc_poisson(3.0), PriorOnK::shifted_geometric(0.1),
        PriorOnK::shifted_bnb(1.0, 4.0, 3.0)}) {
    double eps = 1e-12;
    int kstar = q.tail_truncation(eps);
    long double cum = 0.0L;
    for (int k = 1; k < kstar; ++k) cum += q.pmf(k);
    CHECK(1.0L - cum >= eps);  // one term earlier the tail is still too fat
    cum += q.pmf(kstar);
    CHECK(static_cast<double>(1.0L - cum) < eps * 1.01);
  }
  CHECK_THROWS_AS(u.tail_truncation(0.0), std::domain_error);
  CHECK_THROWS_AS(u.tail_truncation(1.0), std::domain_error);
}

TEST_CASE("parse and string round trips") {
  CHECK(PriorOnK::parse("uniform(1,30)").str() == "uniform(1,30)");
  CHECK(PriorOnK::parse(" TRPOIS( 3 ) ").str() == "trpois(3)");
  CHECK(PriorOnK::parse("geom(0.1)").str() == "geom(0.1)");
  CHECK(PriorOnK::parse("bnb(1, 4, 3)").str() == "bnb(1,4,3)");
  CHECK(PriorOnK::parse("unif(2,8)").str() == "uniform(2,8)");

  CHECK(PriorOnK::uniform_on(1, 30).id_token() == "unif1-30");
  CHECK(PriorOnK::trunc_poisson(3.0).id_token() == "trpois3");
  CHECK(PriorOnK::shifted_geometric(0.1).id_token() == "geom0.1");
  CHECK(PriorOnK::shifted_bnb(1, 4, 3).id_token() == "bnb1-4-3");

  CHECK_THROWS_AS(PriorOnK::parse("zipf(2)"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("trpois"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("trpois(abc)"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("uniform(1)"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("uniform(1.5,2)"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("geom(0)"), ParseError);
  CHECK_THROWS_AS(PriorOnK::parse("bnb(1,4)"), ParseError);
}
