#include <doctest.h>

#include <cmath>

#include <semfield/error.hpp>
#include <semfield/stat_tests.hpp>

#include "oracles.hpp"

using namespace semfield;

namespace {

std::vector<GroupSample> textbook_groups() {
  return {{"a", {4, 5, 6}}, {"b", {6, 7, 8}}, {"c", {9, 10, 11}}};
}

/// Textbook ANOVA formulas via the grand mean, independent of the library.
struct Textbook {
  double ssb = 0.0;
  double ssw = 0.0;
  double f = 0.0;
};

Textbook textbook(const std::vector<GroupSample>& groups) {
  double grand = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups)
    for (double x : g.values) {
      grand += x;
      ++n;
    }
  grand /= static_cast<double>(n);
  Textbook t;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double x : g.values) m += x;
    m /= static_cast<double>(g.values.size());
    t.ssb += static_cast<double>(g.values.size()) * (m - grand) * (m - grand);
    for (double x : g.values) t.ssw += (x - m) * (x - m);
  }
  const double k = static_cast<double>(groups.size());
  t.f = (t.ssb / (k - 1)) / (t.ssw / (static_cast<double>(n) - k));
  return t;
}

}  // namespace

TEST_SUITE("stat_tests") {
  TEST_CASE("hand-computed three-group ANOVA") {
    const auto groups = textbook_groups();
    const auto r = one_way_anova(groups);
    CHECK(r.ss_between == 38.0);
    CHECK(r.ss_within == 6.0);
    CHECK(r.df_between == 2);
    CHECK(r.df_within == 6);
    const auto t = textbook(groups);
    CHECK(r.f_stat == doctest::Approx(t.f).epsilon(1e-12));
    CHECK(r.f_stat == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.0025356874530428337).epsilon(1e-9));
    CHECK(1.0 - oracle::f_cdf(19.0, 2, 6) == doctest::Approx(r.p_value).epsilon(1e-7));
    CHECK(r.group_means.at("c") == 10.0);
    REQUIRE(r.levene_f.has_value());
    CHECK(*r.levene_f == doctest::Approx(0.0));  // every group has the same spread
    CHECK_FALSE(r.warning);
  }

  TEST_CASE("identical groups give F = 0 and p = 1") {
    const std::vector<GroupSample> g{{"a", {1, 2, 3}}, {"b", {1, 2, 3}}};
    const auto r = one_way_anova(g);
    CHECK(r.f_stat == 0.0);
    CHECK(r.p_value == 1.0);
    const std::vector<GroupSample> flat{{"a", {2, 2}}, {"b", {2, 2}}};
    CHECK(one_way_anova(flat).f_stat == 0.0);
    CHECK(one_way_anova(flat).p_value == 1.0);
  }

  TEST_CASE("constant groups with different means take the warning path") {
    const std::vector<GroupSample> g{{"a", {0, 0}}, {"b", {10, 10}}};
    const auto r = one_way_anova(g);
    CHECK(std::isinf(r.f_stat));
    CHECK(r.p_value == 0.0);
    CHECK(r.warning.has_value());
    const auto t = tukey_hsd(g, 0.05);
    CHECK(t.warning.has_value());
    CHECK(t.pairs[0].p_adj == 0.0);
  }

  TEST_CASE("ANOVA input errors") {
    const std::vector<GroupSample> one{{"a", {1, 2}}};
    CHECK_THROWS_AS(one_way_anova(one), Error);
    const std::vector<GroupSample> small{{"a", {1, 2}}, {"b", {1}}};
    CHECK_THROWS_AS(one_way_anova(small), Error);
    const std::vector<GroupSample> nan{{"a", {1, std::nan("")}}, {"b", {1, 2}}};
    CHECK_THROWS_AS(one_way_anova(nan), Error);
  }

  TEST_CASE("ANOVA invariances and sum of squares") {
    oracle::Uniform u{42};
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<GroupSample> g(4);
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i].label = "g" + std::to_string(i);
        const auto n = 2 + static_cast<std::size_t>(u() * 6);
        for (std::size_t j = 0; j < n; ++j) g[i].values.push_back(10.0 * u() + static_cast<double>(i));
      }
      const auto r = one_way_anova(g);
      CHECK(r.ss_total == doctest::Approx(r.ss_between + r.ss_within).epsilon(1e-9));
      auto shifted = g;
      auto scaled = g;
      for (auto& s : shifted)
        for (auto& x : s.values) x += 1234.5;
      for (auto& s : scaled)
        for (auto& x : s.values) x *= -3.25;
      CHECK(one_way_anova(shifted).f_stat == doctest::Approx(r.f_stat).epsilon(1e-8));
      CHECK(one_way_anova(scaled).f_stat == doctest::Approx(r.f_stat).epsilon(1e-10));
      CHECK(textbook(g).f == doctest::Approx(r.f_stat).epsilon(1e-10));
    }
  }

  TEST_CASE("Levene diagnostic") {
    const std::vector<GroupSample> g{{"a", {1, 2, 3, 4}}, {"b", {0, 10, 20, 30}}};
    const auto r = one_way_anova(g);
    REQUIRE(r.levene_f.has_value());
    // |x - mean|: a -> 1.5 .5 .5 1.5, b -> 15 5 5 15; means 1 and 10.
    const double ssb = 4 * (1.0 - 5.5) * (1.0 - 5.5) * 2;
    const double ssw = 4 * 0.25 + 4 * 25.0;
    CHECK(*r.levene_f == doctest::Approx((ssb / 1) / (ssw / 6)));
  }

  TEST_CASE("F distribution limits and published quantiles") {
    CHECK(f_cdf(0.0, 2, 12) == 0.0);
    CHECK(f_cdf(1e9, 2, 12) >= 1.0 - 1e-9);
    CHECK(f_cdf(1e9, 7, 3) >= 1.0 - 1e-9);
    CHECK(f_sf(0.0, 3, 4) == 1.0);
    CHECK(f_quantile(0.95, 2, 12) == doctest::Approx(3.885293834652391).epsilon(1e-9));
    CHECK(f_quantile(0.95, 3, 20) == doctest::Approx(3.09839121214078).epsilon(1e-9));
    CHECK(f_quantile(0.99, 4, 30) == doctest::Approx(4.017876836587524).epsilon(1e-9));
    CHECK(f_cdf(2.5, 3, 7) == doctest::Approx(0.8564905437210608).epsilon(1e-12));
    CHECK_THROWS_AS(f_cdf(1.0, 0, 3), Error);
    CHECK_THROWS_AS(f_quantile(1.0, 2, 3), Error);
  }

  TEST_CASE("F cdf agrees with the quadrature oracle") {
    for (double d1 : {2.0, 3.0, 5.0})
      for (double d2 : {4.0, 12.0, 30.0})
        for (double x : {0.3, 1.0, 2.5, 6.0}) CHECK(f_cdf(x, d1, d2) == doctest::Approx(oracle::f_cdf(x, d1, d2)).epsilon(1e-9));
    const double x = oracle::invert([](double t) { return oracle::f_cdf(t, 2, 12); }, 0.95, 0.0, 20.0);
    CHECK(std::fabs(x - 3.885) < 0.005);
    CHECK(f_quantile(0.95, 2, 12) == doctest::Approx(x).epsilon(1e-8));
  }

  TEST_CASE("F cdf is monotone and bounded") {
    for (double d1 : {1.0, 2.0, 6.0}) {
      double prev = 0.0;
      for (double x = 0.0; x <= 20.0; x += 0.05) {
        const double c = f_cdf(x, d1, 9);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        CHECK(c + f_sf(x, d1, 9) == doctest::Approx(1.0));
        prev = c;
      }
    }
  }

  TEST_CASE("studentized range published values") {
    CHECK(studentized_range_cdf(0.0, 3, 12) == 0.0);
    CHECK(std::fabs(studentized_range_cdf(3.77, 3, 12) - 0.95) < 0.002);
    CHECK(studentized_range_cdf(3.77, 3, 12) == doctest::Approx(0.9498176382394464).epsilon(1e-9));
    CHECK(studentized_range_quantile(0.95, 3, 12) == doctest::Approx(3.772928965726967).epsilon(1e-8));
    CHECK(studentized_range_quantile(0.99, 3, 12) == doctest::Approx(5.045934725165963).epsilon(1e-8));
    CHECK(studentized_range_quantile(0.95, 2, 10) == doctest::Approx(3.151064183329372).epsilon(1e-8));
    CHECK(studentized_range_quantile(0.95, 5, 30) == doctest::Approx(4.102079019506422).epsilon(1e-8));
    CHECK(studentized_range_cdf(2.0, 4, 5) == doctest::Approx(0.4575162727826662).epsilon(1e-9));
    CHECK(studentized_range_cdf(1.0, 2, 1) == doctest::Approx(0.3918265520306073).epsilon(1e-9));
    CHECK(studentized_range_cdf(6.0, 50, 10) == doctest::Approx(0.8196091817254876).epsilon(1e-9));
    CHECK(studentized_range_cdf(2.0, 2, 200'000) == doctest::Approx(0.8427007929497148).epsilon(1e-9));
    CHECK_THROWS_AS(studentized_range_cdf(1.0, 1, 5), Error);
    CHECK_THROWS_AS(studentized_range_cdf(1.0, 3, 0.5), Error);
  }

  TEST_CASE("studentized range agrees with the chi-square quadrature oracle") {
    for (auto [q, k, df] : {std::tuple{3.77, 3, 12.0}, {2.0, 4, 5.0}, {4.5, 6, 20.0}}) {
      CHECK(std::fabs(studentized_range_cdf(q, k, df) - oracle::studentized_range_cdf(q, k, df)) < 1e-8);
    }
    // The oracle inverse at 0.95 lies within 1e-4 of the library quantile.
    const double x = studentized_range_quantile(0.95, 3, 12);
    CHECK(oracle::studentized_range_cdf(x - 1e-4, 3, 12) < 0.95);
    CHECK(oracle::studentized_range_cdf(x + 1e-4, 3, 12) > 0.95);
    CHECK(std::fabs(x - 3.77) < 0.02);
  }

  TEST_CASE("studentized range is monotone and bounded") {
    for (int k : {2, 3, 8}) {
      for (double df : {3.0, 12.0, 120.0}) {
        double prev = 0.0;
        for (double q = 0.0; q <= 12.0; q += 0.25) {
          const double c = studentized_range_cdf(q, k, df);
          CHECK(c >= prev - 1e-15);
          CHECK(c <= 1.0);
          prev = c;
        }
      }
    }
  }

  TEST_CASE("Tukey HSD on the textbook groups") {
    const auto groups = textbook_groups();
    const auto r = tukey_hsd(groups, 0.05);
    REQUIRE(r.pairs.size() == 3);
    CHECK(r.ms_within == 1.0);
    CHECK(r.pairs[0].a == "a");
    CHECK(r.pairs[0].b == "b");
    CHECK(r.pairs[0].mean_diff == -2.0);
    CHECK(r.pairs[0].p_adj == doctest::Approx(0.10886702003092286).epsilon(1e-7));
    CHECK(r.pairs[1].p_adj == doctest::Approx(0.002101240581572572).epsilon(1e-7));
    CHECK(r.pairs[2].p_adj == doctest::Approx(0.024229053412424206).epsilon(1e-7));
    CHECK(r.pairs[1].q_stat == doctest::Approx(5.0 * std::sqrt(3.0)));
    CHECK_FALSE(r.pairs[0].significant);
    CHECK(r.pairs[1].significant);
    CHECK(r.pairs[2].significant);
  }

  TEST_CASE("Tukey basics") {
    const std::vector<GroupSample> same{{"a", {1, 2, 3}}, {"b", {1, 2, 3}}};
    const auto r = tukey_hsd(same, 0.05);
    CHECK(r.pairs[0].mean_diff == 0.0);
    CHECK(r.pairs[0].p_adj == doctest::Approx(1.0));
    const std::vector<GroupSample> four{{"a", {1, 2}}, {"b", {2, 3}}, {"c", {3, 5}}, {"d", {0, 1, 2}}};
    CHECK(tukey_hsd(four, 0.05).pairs.size() == 6);
    CHECK_THROWS_AS(tukey_hsd(four, 1.0), Error);
  }

  TEST_CASE("significance at 0.01 implies significance at 0.05") {
    oracle::Uniform u{7};
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<GroupSample> g(4);
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i].label = "g" + std::to_string(i);
        for (int j = 0; j < 5; ++j) g[i].values.push_back(u() + 0.6 * static_cast<double>(i) * u());
      }
      const auto strict = tukey_hsd(g, 0.01);
      const auto loose = tukey_hsd(g, 0.05);
      for (std::size_t p = 0; p < strict.pairs.size(); ++p)
        if (strict.pairs[p].significant) CHECK(loose.pairs[p].significant);
    }
  }
}
