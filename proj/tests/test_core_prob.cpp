#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "monofact/core_prob.hpp"
#include "monofact/error.hpp"
#include "support.hpp"

using namespace monofact;
using testsupport::random_dist;

TEST_SUITE("core_prob") {

TEST_CASE("dist_from_weights normalizes and validates") {
  const FactoidUniverse u(4);
  const FactoidDist bottom = dist_from_weights(u, {{0, 1.0}});
  CHECK(bottom(0) == doctest::Approx(1.0));
  CHECK(bottom(1) == 0.0);

  const FactoidDist half = dist_from_weights(u, {{1, 2.0}, {2, 2.0}});
  CHECK(half(1) == doctest::Approx(0.5));
  CHECK(half(2) == doctest::Approx(0.5));
  CHECK(half(3) == 0.0);

  CHECK_THROWS_AS(dist_from_weights(u, {{1, 0.3}, {2, -0.1}}), DomainError);
  CHECK_THROWS_AS(dist_from_weights(u, {{7, 1.0}}), DomainError);
  CHECK_THROWS_AS(dist_from_weights(u, {{1, 0.0}}), DomainError);
  CHECK_THROWS_AS(dist_from_weights(u, {{1, std::numeric_limits<double>::infinity()}}), DomainError);
  const Atom dup[] = {{1, 1.0}, {1, 2.0}};
  CHECK_THROWS_AS(FactoidDist::from_weights(u, dup), DomainError);
}

TEST_CASE("background probability covers unlisted factoids") {
  const FactoidUniverse u(1'000'000);
  const Atom atoms[] = {{5, 0.5}};
  const FactoidDist d = FactoidDist::from_weights(u, atoms, 0.5 / 999'999.0);
  CHECK(d(5) == doctest::Approx(0.5));
  CHECK(d(0) == doctest::Approx(0.5 / 999'999.0));
  CHECK(mass_of_set(d, FactoidSet::all(u)) == doctest::Approx(1.0));
  CHECK(mass_of_set(d, FactoidSet::all_except(u, {5})) == doctest::Approx(0.5));
}

TEST_CASE("mass_of_set examples") {
  const FactoidUniverse u(5);
  const FactoidId four[] = {1, 2, 3, 4};
  const FactoidDist d = FactoidDist::uniform_over(u, four);
  CHECK(mass_of_set(d, FactoidSet::of(u, {1, 2})) == doctest::Approx(0.5));
  CHECK(mass_of_set(d, FactoidSet::empty(u)) == 0.0);
  CHECK(mass_of_set(d, FactoidSet::all(u)) == doctest::Approx(1.0));
}

TEST_CASE("mass of a set and its complement sum to one") {
  SeededRng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t size = 2 + rng.below(30);
    const FactoidDist d = random_dist(size, rng);
    std::vector<FactoidId> ids;
    for (FactoidId y = 0; y < size; ++y) {
      if (rng.below(2)) ids.push_back(y);
    }
    const FactoidSet a = FactoidSet::of(d.universe(), ids);
    CHECK(mass_of_set(d, a) + mass_of_set(d, a.complement()) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("tv_distance examples") {
  const FactoidUniverse u(4);
  CHECK(tv_distance(dist_from_weights(u, {{1, 1}}), dist_from_weights(u, {{2, 1}})) ==
        doctest::Approx(1.0));
  const FactoidDist a = dist_from_weights(u, {{1, 0.5}, {2, 0.3}, {3, 0.2}});
  const FactoidDist b = dist_from_weights(u, {{1, 0.2}, {2, 0.3}, {3, 0.5}});
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.3));
  CHECK_THROWS_AS(tv_distance(a, FactoidDist::uniform(FactoidUniverse(5))), DomainError);
}

TEST_CASE("tv forms agree with exhaustive subset maximization") {
  SeededRng rng(12);
  for (int t = 0; t < 300; ++t) {
    const std::size_t size = 2 + rng.below(11);
    const FactoidDist a = random_dist(size, rng);
    const FactoidDist b = random_dist(size, rng);
    const double brute = testsupport::brute_tv(a, b);
    const TvForms f = tv_forms(a, b);
    CHECK(std::abs(f.max_over_subsets - brute) <= 1e-12);
    CHECK(std::abs(f.half_l1 - brute) <= 1e-12);
    CHECK(std::abs(f.positive_part - brute) <= 1e-12);
  }
}

TEST_CASE("tv forms agree with background atoms on a large universe") {
  const FactoidUniverse u(10'000'000);
  const Atom a_atoms[] = {{0, 0.1}, {3, 0.2}};
  const Atom b_atoms[] = {{3, 0.5}, {9, 0.25}};
  const FactoidDist a = FactoidDist::from_weights(u, a_atoms, 0.7 / 9'999'998.0);
  const FactoidDist b = FactoidDist::from_weights(u, b_atoms, 0.25 / 9'999'998.0);
  const TvForms f = tv_forms(a, b);
  CHECK(f.half_l1 == doctest::Approx(f.max_over_subsets).epsilon(1e-12));
  CHECK(f.positive_part == doctest::Approx(f.max_over_subsets).epsilon(1e-12));
  // a exceeds b on 0 (where b has its background) and on the 9'999'997
  // factoids that neither lists.
  const double expected = 0.1 - 0.25 / 9'999'998.0 + (0.7 - 0.25) / 9'999'998.0 * 9'999'997.0;
  CHECK(f.max_over_subsets == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("tv is a metric bounded by one") {
  SeededRng rng(13);
  for (int t = 0; t < 200; ++t) {
    const std::size_t size = 2 + rng.below(40);
    const FactoidDist a = random_dist(size, rng);
    const FactoidDist b = random_dist(size, rng);
    const FactoidDist c = random_dist(size, rng);
    const double ab = tv_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab == doctest::Approx(tv_distance(b, a)).epsilon(1e-12));
    CHECK(tv_distance(a, c) <= ab + tv_distance(b, c) + 1e-12);
  }
}

TEST_CASE("tv cross-check toggle") {
  set_tv_cross_check(true);
  SeededRng rng(14);
  const FactoidDist a = random_dist(9, rng);
  const FactoidDist b = random_dist(9, rng);
  CHECK_NOTHROW(tv_distance(a, b));
  CHECK(tv_cross_check_enabled());
  set_tv_cross_check(false);
  CHECK_FALSE(tv_cross_check_enabled());
}

TEST_CASE("kl_divergence examples and Gibbs inequality") {
  const FactoidUniverse u(3);
  const FactoidDist one = dist_from_weights(u, {{1, 1}});
  const FactoidDist half = dist_from_weights(u, {{1, 0.5}, {2, 0.5}});
  CHECK(kl_divergence(half, half) == doctest::Approx(0.0));
  CHECK(kl_divergence(one, half) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(kl_divergence(half, one)));

  SeededRng rng(15);
  for (int t = 0; t < 200; ++t) {
    const std::size_t size = 2 + rng.below(20);
    const FactoidDist a = random_dist(size, rng);
    const FactoidDist b = random_dist(size, rng, 0.0);
    const double kl = kl_divergence(a, b);
    CHECK(std::isfinite(kl));
    CHECK(kl >= -1e-12);
  }
}

TEST_CASE("mixture") {
  const FactoidUniverse u(3);
  const FactoidDist a = FactoidDist::point_mass(u, 0);
  const FactoidDist b = dist_from_weights(u, {{1, 1}, {2, 1}});
  const FactoidDist m = mixture(a, b, 0.25);
  CHECK(m(0) == doctest::Approx(0.25));
  CHECK(m(1) == doctest::Approx(0.375));
  CHECK_THROWS_AS(mixture(a, b, 1.5), DomainError);
}

TEST_CASE("sampling") {
  const FactoidUniverse u(6);
  SeededRng rng(16);
  const auto pm = sample_iid(FactoidDist::point_mass(u, 4), 5, rng);
  CHECK(pm == std::vector<FactoidId>{4, 4, 4, 4, 4});
  CHECK_THROWS_AS(sample_iid(FactoidDist::point_mass(u, 4), 0, rng), DomainError);

  const FactoidDist two = dist_from_weights(u, {{1, 1}, {2, 1}});
  const auto draws = sample_iid(two, 100'000, rng);
  std::size_t ones = 0;
  for (FactoidId y : draws) {
    CHECK((y == 1 || y == 2));
    ones += y == 1 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(ones) / 1e5 - 0.5) <= 0.01);

  SeededRng r1(99);
  SeededRng r2(99);
  CHECK(sample_iid(two, 1000, r1) == sample_iid(two, 1000, r2));
}

TEST_CASE("sampler frequencies match atoms and background") {
  const FactoidUniverse u(1000);
  const Atom atoms[] = {{3, 0.3}, {7, 0.2}};
  const FactoidDist d = FactoidDist::from_weights(u, atoms, 0.5 / 998.0);
  SeededRng rng(17);
  const std::size_t n = 200'000;
  const auto draws = sample_iid(d, n, rng);
  std::map<FactoidId, std::size_t> c;
  for (FactoidId y : draws) ++c[y];
  auto within = [&](double observed, double p) {
    return std::abs(observed - p) <= 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
  };
  CHECK(within(static_cast<double>(c[3]) / n, 0.3));
  CHECK(within(static_cast<double>(c[7]) / n, 0.2));
  CHECK(within(static_cast<double>(n - c[3] - c[7]) / n, 0.5));
}

TEST_CASE("nth_unlisted") {
  const FactoidId excluded[] = {0, 2, 3, 7};
  CHECK(detail::nth_unlisted(excluded, 0) == 1);
  CHECK(detail::nth_unlisted(excluded, 1) == 4);
  CHECK(detail::nth_unlisted(excluded, 3) == 6);
  CHECK(detail::nth_unlisted(excluded, 4) == 8);
}

TEST_CASE("universe and set basics") {
  CHECK_THROWS_AS(FactoidUniverse(1), DomainError);
  const FactoidUniverse u(10);
  const FactoidSet s = FactoidSet::of(u, {3, 1, 3});
  CHECK(s.size() == 2);
  CHECK(s.complement().size() == 8);
  CHECK(s.complement().contains(0));
  CHECK_FALSE(s.complement().contains(3));
  CHECK(s.complement().complement().members() == std::vector<FactoidId>{1, 3});
  CHECK_THROWS_AS(FactoidSet::of(u, {10}), DomainError);
}

}  // TEST_SUITE
