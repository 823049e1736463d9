#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mfm/setting.hpp"
#include "mfm/summaries.hpp"

using namespace mfm;

TEST_CASE("summarize_kplus tabulates the K+ draws") {
  ChainTrace trace;
  trace.k_plus = {3, 3, 3, 2};
  trace.K = {4, 3, 5, 2};
  KPlusPosteriorSummary s = summarize_kplus(trace);
  REQUIRE(s.histogram.size() == 3);
  CHECK(s.histogram[0] == 0.0);
  CHECK(s.histogram[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.histogram[2] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s.mode == 3);
  CHECK(s.draws == 4);
  // -(0.25 ln 0.25 + 0.75 ln 0.75)
  CHECK(s.entropy == doctest::Approx(0.5623351446188083).epsilon(1e-12));

  ChainTrace tie;
  tie.k_plus = {2, 4, 4, 2};
  tie.K = {2, 4, 4, 2};
  CHECK(summarize_kplus(tie).mode == 2);  // smallest maximiser wins ties

  CHECK_THROWS_AS(summarize_kplus(ChainTrace{}), std::invalid_argument);
}

TEST_CASE("histogram_json round-trips through a JSON parser") {
  std::vector<double> h{0.0, 0.25, 0.75};
  std::string js = histogram_json(h);
  CHECK(js == "{\"1\":0,\"2\":0.25,\"3\":0.75}");
  auto parsed = nlohmann::json::parse(js);
  CHECK(parsed.at("2").get<double>() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(parsed.at("3").get<double>() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(histogram_json(std::vector<double>{}) == "{}");

  // long fractions survive the %.12g formatting to a part in 1e12
  std::vector<double> frac{1.0 / 3, 2.0 / 3};
  auto back = nlohmann::json::parse(histogram_json(frac));
  CHECK(back.at("1").get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-11));
}

namespace {

MfmSetting make_setting(PriorOnK prior, DirichletSchedule sched, double B0, double C0) {
  MfmSetting s;
  s.prior_k = std::move(prior);
  s.schedule = sched;
  s.B0 = B0;
  s.C0 = C0;
  return s;
}

}  // namespace

TEST_CASE("marginal_table averages posterior modes over a full factorial") {
  // 2 kinds x 1 value x 2 priors x 1 B0 x 2 C0 = 8 cells.
  std::vector<std::pair<MfmSetting, int>> modes;
  int next = 0;
  std::vector<int> cell_mode{3, 5, 2, 4, 6, 8, 1, 7};
  for (auto kind : {static_schedule(1.0), dynamic_schedule(1.0)})
    for (auto& prior : {PriorOnK::uniform_on(1, 30), PriorOnK::trunc_poisson(3.0)})
      for (double C0 : {0.5, 12.5})
        modes.emplace_back(make_setting(prior, kind, 20.0, C0), cell_mode[next++]);

  MarginalTable t = marginal_table(modes);
  REQUIRE(t.by_kind.size() == 2);
  CHECK(t.by_kind[0].label == "static");
  CHECK(t.by_kind[1].label == "dynamic");
  CHECK(t.by_kind[0].count == 4);
  CHECK(t.by_kind[0].average == doctest::Approx((3 + 5 + 2 + 4) / 4.0).epsilon(1e-15));
  CHECK(t.by_kind[1].average == doctest::Approx((6 + 8 + 1 + 7) / 4.0).epsilon(1e-15));

  REQUIRE(t.by_prior.size() == 2);
  CHECK(t.by_prior[0].label == "uniform(1,30)");
  CHECK(t.by_prior[1].label == "trpois(3)");
  CHECK(t.by_prior[0].average == doctest::Approx((3 + 5 + 6 + 8) / 4.0).epsilon(1e-15));

  REQUIRE(t.by_gamma_alpha.size() == 1);
  CHECK(t.by_gamma_alpha[0].count == 8);

  REQUIRE(t.by_B0.size() == 1);
  CHECK(t.by_B0[0].label == "20");

  REQUIRE(t.by_C0.size() == 2);
  CHECK(t.by_C0[0].label == "0.5");
  CHECK(t.by_C0[0].average == doctest::Approx((3 + 2 + 6 + 1) / 4.0).epsilon(1e-15));

  SUBCASE("duplicate cell rejected") {
    modes.push_back(modes.front());
    CHECK_THROWS_AS(marginal_table(modes), std::invalid_argument);
  }
  SUBCASE("missing cell rejected") {
    modes.pop_back();
    CHECK_THROWS_AS(marginal_table(modes), std::invalid_argument);
  }
  SUBCASE("empty input rejected") {
    CHECK_THROWS_AS(marginal_table({}), std::invalid_argument);
  }
}

TEST_CASE("component-mean prior density is the expected normal curve") {
  const int points = 4001;
  std::vector<double> grid(points);
  double lo = 21.7255 - 60.0, hi = 21.7255 + 60.0;
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * i / (points - 1);

  auto curve = prior_mean_density_curve(21.7255, 20.0, grid);
  REQUIRE(curve.size() == grid.size());
  // peak at b0 with the N(b0, B0) normalising constant
  double peak = 1.0 / std::sqrt(2.0 * M_PI * 20.0);
  auto mid = curve[points / 2];
  CHECK(mid.first == doctest::Approx(21.7255).epsilon(1e-12));
  CHECK(mid.second == doctest::Approx(peak).epsilon(1e-12));
  // trapezoid mass ~ 1
  double mass = 0.0;
  for (int i = 1; i < points; ++i)
    mass += 0.5 * (curve[i].second + curve[i - 1].second) * (curve[i].first - curve[i - 1].first);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  // With B0 = R^2 = 630.36 the prior is near-flat across the data range.
  std::vector<double> data_range;
  for (double x = 9.0; x <= 35.0; x += 0.5) data_range.push_back(x);
  auto flat = prior_mean_density_curve(21.7255, 630.361449, data_range);
  double fmin = flat.front().second, fmax = fmin;
  for (auto& [x, d] : flat) {
    fmin = std::min(fmin, d);
    fmax = std::max(fmax, d);
  }
  CHECK(fmax / fmin < 1.4);

  CHECK_THROWS_AS(prior_mean_density_curve(0.0, 0.0, grid), std::domain_error);
  CHECK_THROWS_AS(prior_mean_density_curve(0.0, -1.0, grid), std::domain_error);
}

TEST_CASE("4-sigma prior density matches the transformed gamma law") {
  // T = 4/sqrt(G) with G ~ Gamma(c0, rate C0), decreasing in G, so
  // P(T > t) = P(G < 16/t^2): mass q must sit above t_q = 4/sqrt(Q_G(q)).
  double c0 = 2.0, C0 = 5.0;
  boost::math::gamma_distribution<> gd(c0, 1.0 / C0);  // boost uses scale

  const int points = 20001;
  std::vector<double> grid(points);
  double lo = 1e-4, hi = 400.0;  // log-spaced: the density has a heavy right tail
  for (int i = 0; i < points; ++i)
    grid[i] = lo * std::pow(hi / lo, double(i) / (points - 1));
  auto curve = prior_4sigma_density_curve(c0, C0, grid);
  REQUIRE(curve.size() == grid.size());
  for (auto& [t, d] : curve) CHECK(d >= 0.0);

  auto mass_above = [&](double t0) {
    double mass = 0.0;
    for (int i = 1; i < points; ++i) {
      double a = curve[i - 1].first, b = curve[i].first;
      if (b <= t0) continue;
      double fa = curve[i - 1].second, fb = curve[i].second;
      if (a < t0) {  // clip the segment containing the cut point
        fa += (fb - fa) * (t0 - a) / (b - a);
        a = t0;
      }
      mass += 0.5 * (fa + fb) * (b - a);
    }
    return mass;
  };
  for (double q : {0.9, 0.5, 0.1}) {
    double tq = 4.0 / std::sqrt(boost::math::quantile(gd, q));
    CHECK(std::fabs(mass_above(tq) - q) < 2e-4);
  }
  // total mass ~ 1 (grid spans essentially the whole support)
  CHECK(std::fabs(mass_above(0.0) - 1.0) < 2e-4);

  // nonpositive widths carry no density
  std::vector<double> with_zero{-1.0, 0.0, 1.0};
  auto z = prior_4sigma_density_curve(c0, C0, with_zero);
  CHECK(z[0].second == 0.0);
  CHECK(z[1].second == 0.0);
  CHECK(z[2].second > 0.0);

  CHECK_THROWS_AS(prior_4sigma_density_curve(0.0, 5.0, grid), std::domain_error);
  CHECK_THROWS_AS(prior_4sigma_density_curve(2.0, 0.0, grid), std::domain_error);
}
