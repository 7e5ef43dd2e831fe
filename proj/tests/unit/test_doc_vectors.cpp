#include <doctest.h>

#include <cmath>
#include <random>

#include <semfield/doc_vectors.hpp>
#include <semfield/error.hpp>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace semfield;

namespace {

ConceptVector vec(std::vector<double> values, std::string label = "v") {
  ConceptVector v;
  v.stratum_label = std::move(label);
  for (std::size_t i = 0; i < values.size(); ++i) v.dims.push_back("d" + std::to_string(i));
  v.values = std::move(values);
  return v;
}

std::vector<ConceptVector> random_vectors(std::size_t n, std::size_t d, std::uint64_t seed) {
  oracle::Uniform u{seed};
  std::vector<ConceptVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> values(d);
    for (auto& x : values) x = 10.0 * u() - 5.0;
    out.push_back(vec(values, "r" + std::to_string(i)));
  }
  return out;
}

double dist2(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_SUITE("doc_vectors") {
  TEST_CASE("concept vector per 1000 words") {
    const auto map = testing::concept_map();
    std::vector<Lemma> words(495, "filler");
    for (int i = 0; i < 5; ++i) words.emplace_back("say");
    const auto v = concept_vector(testing::stratum("en", words), map, MapSide::target);
    REQUIRE(v.dims.size() == map.size());
    CHECK(std::is_sorted(v.dims.begin(), v.dims.end()));
    const auto say = std::find(v.dims.begin(), v.dims.end(), "say") - v.dims.begin();
    CHECK(v.values[static_cast<std::size_t>(say)] == doctest::Approx(10.0));

    const auto zero = concept_vector(testing::stratum("en", {"filler"}), map, MapSide::target);
    for (double x : zero.values) CHECK(x == 0.0);
    CHECK_THROWS_AS(concept_vector(testing::stratum("en", {}), map, MapSide::target), Error);
  }

  TEST_CASE("concept vector ignores document order") {
    const auto map = testing::concept_map();
    auto strata = load_corpus(testing::fixture("mini/manifest.json"));
    auto s = strata[2];
    const auto a = concept_vector(s, map, MapSide::target);
    std::reverse(s.documents.begin(), s.documents.end());
    CHECK(concept_vector(s, map, MapSide::target).values == a.values);
  }

  TEST_CASE("cosine cases") {
    CHECK(cosine(vec({1, 2, 0}), vec({2, 1, 0})) == doctest::Approx(0.8));
    CHECK(cosine(vec({3, 1}), vec({3, 1})) == doctest::Approx(1.0));
    CHECK(cosine(vec({1, 0}), vec({0, 4})) == 0.0);
    try {
      cosine(vec({0, 0}), vec({1, 1}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "undefined cosine");
    }
    CHECK_THROWS_AS(cosine(vec({1}), vec({1, 2})), Error);
  }

  TEST_CASE("cosine symmetry and scale invariance") {
    const auto vs = random_vectors(50, 6, 3);
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
      const double c = cosine(vs[i], vs[i + 1]);
      CHECK(c == doctest::Approx(cosine(vs[i + 1], vs[i])));
      auto scaled = vs[i];
      for (auto& x : scaled.values) x *= 3.7;
      CHECK(cosine(scaled, vs[i + 1]) == doctest::Approx(c));
      CHECK(c >= -1.0);
      CHECK(c <= 1.0);
    }
  }

  TEST_CASE("euclidean is a metric") {
    CHECK(euclidean(vec({0, 0}), vec({3, 4})) == 5.0);
    CHECK(euclidean(vec({1, 2}), vec({1, 2})) == 0.0);
    CHECK_THROWS_AS(euclidean(vec({1}), vec({1, 2})), Error);
    const auto vs = random_vectors(60, 8, 17);
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> pick(0, vs.size() - 1);
    for (int t = 0; t < 1000; ++t) {
      const auto& a = vs[pick(rng)];
      const auto& b = vs[pick(rng)];
      const auto& c = vs[pick(rng)];
      CHECK(euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-12);
      CHECK(euclidean(a, b) == euclidean(b, a));
      CHECK(euclidean(a, b) >= 0.0);
    }
  }

  TEST_CASE("PCA agrees with a Jacobi eigendecomposition oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto vs = random_vectors(5, 8, seed);
      const auto pca = pca_2d(vs);
      CHECK(pca.converged);
      oracle::Matrix rows;
      for (const auto& v : vs) rows.push_back(v.values);
      const auto ref = oracle::pca_project(rows);
      for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
          const double want = std::hypot(ref[i].first - ref[j].first, ref[i].second - ref[j].second);
          CHECK(std::fabs(dist2(pca.coords[i], pca.coords[j]) - want) < 1e-6);
          CHECK(dist2(pca.coords[i], pca.coords[j]) <= euclidean(vs[i], vs[j]) + 1e-9);
        }
      }
    }
  }

  TEST_CASE("PCA eigen residual at convergence") {
    const auto vs = random_vectors(12, 8, 99);
    const auto pca = pca_2d(vs);
    oracle::Matrix rows;
    for (const auto& v : vs) rows.push_back(v.values);
    const std::size_t d = 8;
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
      for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / 12.0;
    oracle::Matrix cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / 11.0;
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov[i][i];
    double res = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double cw = 0.0;
      for (std::size_t j = 0; j < d; ++j) cw += cov[i][j] * pca.axis_first[j];
      res += std::pow(cw - pca.eigenvalue_first * pca.axis_first[i], 2);
    }
    CHECK(std::sqrt(res) <= 1e-8 * std::max(1.0, trace));
    const auto [vals, vecs] = oracle::jacobi_eigen(cov);
    CHECK(pca.eigenvalue_first == doctest::Approx(vals[0]).epsilon(1e-9));
    CHECK(pca.eigenvalue_second == doctest::Approx(vals[1]).epsilon(1e-9));
    CHECK(pca.explained_first + pca.explained_second <= 1.0 + 1e-12);
  }

  TEST_CASE("collinear input has no second component") {
    std::vector<ConceptVector> vs;
    for (double t : {-2.0, 0.5, 1.0, 4.0, 7.5}) vs.push_back(vec({t, 2.0 * t, -t, 0.5 * t}));
    const auto pca = pca_2d(vs);
    CHECK(pca.explained_second < 1e-9);
    CHECK(pca.explained_first == doctest::Approx(1.0));
    for (const auto& p : pca.coords) CHECK(std::fabs(p.y) < 1e-9);
  }

  TEST_CASE("projections of symmetric points sum to zero") {
    const std::vector<ConceptVector> vs{vec({1, 2, 3}), vec({-1, -2, -3}), vec({2, -1, 0}), vec({-2, 1, 0})};
    const auto pca = pca_2d(vs);
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : pca.coords) {
      sx += p.x;
      sy += p.y;
    }
    CHECK(std::fabs(sx) < 1e-9);
    CHECK(std::fabs(sy) < 1e-9);
  }

  TEST_CASE("PCA orientation and degenerate input") {
    const auto pca = pca_2d(random_vectors(6, 5, 4));
    const auto largest = [](const std::vector<double>& axis) {
      return *std::max_element(axis.begin(), axis.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    };
    CHECK(largest(pca.axis_first) > 0.0);
    CHECK(largest(pca.axis_second) > 0.0);
    try {
      pca_2d(std::vector<ConceptVector>{vec({1, 2}), vec({1, 2}), vec({1, 2})});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "degenerate covariance");
    }
    CHECK_THROWS_AS(pca_2d(std::vector<ConceptVector>{vec({1, 2})}), Error);
  }
}
