#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "monofact/error.hpp"
#include "monofact/harness.hpp"
#include "monofact/worlds.hpp"

using namespace monofact;

namespace {

// Every multiset of draws of length n over a universe of `size`, as sorted vectors.
void all_samples(std::size_t size, std::size_t n, FactoidId from, std::vector<FactoidId>& cur,
                 std::vector<std::vector<FactoidId>>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  for (FactoidId y = from; y < size; ++y) {
    cur.push_back(y);
    all_samples(size, n, y, cur, out);
    cur.pop_back();
  }
}

// Every N-subset of 1..size-1 as a uniform world.
ExplicitWorld uniform_world_prior(std::size_t size, std::size_t facts) {
  ExplicitWorld w;
  const FactoidUniverse u(size);
  std::vector<std::vector<FactoidId>> subsets;
  for (std::uint32_t mask = 0; mask < (1u << (size - 1)); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != facts) continue;
    std::vector<FactoidId> f;
    for (std::size_t i = 0; i + 1 < size; ++i) {
      if (mask >> i & 1u) f.push_back(static_cast<FactoidId>(i + 1));
    }
    subsets.push_back(f);
  }
  for (const auto& f : subsets) {
    w.instances.emplace_back(1.0 / static_cast<double>(subsets.size()),
                             WorldInstance(FactoidDist::uniform_over(u, f)));
  }
  return w;
}

}  // namespace

TEST_SUITE("worlds") {

TEST_CASE("world instance sets") {
  const FactoidUniverse u(6);
  const FactoidId f[] = {2, 4};
  const WorldInstance w(FactoidDist::uniform_over(u, f));
  CHECK(w.facts().members() == std::vector<FactoidId>{0, 2, 4});
  CHECK(w.hallucinations().members() == std::vector<FactoidId>{1, 3, 5});
  CHECK(sparsity(w) == doctest::Approx(std::log(1.0)));
}

TEST_CASE("sampled worlds put no mass on hallucinations and always contain bottom") {
  SeededRng rng(41);
  const std::vector<WorldModel> models = {
      PermutedPowerLaw{200, 30, 0.0}, PermutedPowerLaw{200, 30, 1.3}, W5World{2, 3, 2, 2},
      MultiTypeWorld{{{50, 5, 0.0, 0.3}, {80, 10, 1.0, 0.7}}}};
  for (const auto& model : models) {
    for (int t = 0; t < 20; ++t) {
      const WorldInstance w = sample_world(model, rng);
      CHECK(w.facts().contains(kBottom));
      CHECK(mass_of_set(w.p(), w.hallucinations()) <= 1e-15);
      CHECK(mass_of_set(w.p(), FactoidSet::all(w.universe())) == doctest::Approx(1.0));
      CHECK(w.universe().size() == universe_size(model));
    }
  }
}

TEST_CASE("permuted power law shape") {
  SeededRng rng(42);
  const WorldInstance uni = sample_world(PermutedPowerLaw{1000, 50, 0.0}, rng);
  CHECK(uni.facts().size() == 51);
  CHECK(uni.p()(kBottom) == 0.0);
  for (FactoidId y : uni.facts().members()) {
    if (y != kBottom) CHECK(uni.p()(y) == doctest::Approx(1.0 / 50));
  }

  const WorldInstance zipf = sample_world(PermutedPowerLaw{1000, 50, 1.0}, rng);
  std::vector<double> probs;
  for (const Atom& a : zipf.p().atoms()) probs.push_back(a.prob);
  std::sort(probs.rbegin(), probs.rend());
  REQUIRE(probs.size() == 50);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    CHECK(probs[i] / probs[0] == doctest::Approx(1.0 / static_cast<double>(i + 1)));
  }

  const WorldInstance full = sample_world(PermutedPowerLaw{30, 29, 0.0}, rng);
  CHECK(full.hallucinations().size() == 0);
  CHECK_THROWS_AS(sample_world(PermutedPowerLaw{30, 30, 0.0}, rng), DomainError);
}

TEST_CASE("permuted power law facts are uniform over non-bottom factoids") {
  // Pr[y in F] = N / (|Y| - 1) for every y != bottom.
  const std::size_t size = 41;
  const std::size_t facts = 8;
  const std::size_t draws = 20'000;
  SeededRng rng(43);
  std::vector<std::size_t> hits(size, 0);
  for (std::size_t t = 0; t < draws; ++t) {
    const WorldInstance w = sample_world(PermutedPowerLaw{size, facts, 1.0}, rng);
    for (FactoidId y : w.facts().members()) ++hits[y];
  }
  CHECK(hits[kBottom] == draws);
  const double p = static_cast<double>(facts) / static_cast<double>(size - 1);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(draws));
  for (std::size_t y = 1; y < size; ++y) {
    CHECK(std::abs(static_cast<double>(hits[y]) / draws - p) <= 3.5 * sigma);
  }
}

TEST_CASE("w5 construction") {
  const W5World m{2, 2, 2, 2};
  CHECK(m.universe_size() == 17);
  SeededRng rng(44);
  const WorldInstance w = sample_world(m, rng);
  CHECK(w.facts().size() == 5);
  std::set<std::size_t> slots;
  for (const Atom& a : w.p().atoms()) {
    CHECK(a.prob == doctest::Approx(0.25));
    slots.insert(m.slot_of(a.id));
  }
  CHECK(slots.size() == 4);
  CHECK(m.slot_of(m.id_of(1, 0, 1, 1)) == 2);
  CHECK_THROWS_AS(m.slot_of(kBottom), DomainError);
}

TEST_CASE("multi-type worlds keep per-type mass and ranges") {
  const MultiTypeWorld m{{{50, 5, 0.0, 0.3}, {80, 10, 1.0, 0.7}}};
  const auto ranges = type_ranges(m);
  REQUIRE(ranges.size() == 2);
  CHECK(ranges[0].first == 1);
  CHECK(ranges[1].first == 51);
  CHECK(universe_size(m) == 131);
  SeededRng rng(45);
  const WorldInstance w = sample_world(m, rng);
  double mass0 = 0.0;
  double mass1 = 0.0;
  std::size_t count0 = 0;
  for (const Atom& a : w.p().atoms()) {
    if (ranges[0].contains(a.id)) {
      mass0 += a.prob;
      ++count0;
    } else {
      CHECK(ranges[1].contains(a.id));
      mass1 += a.prob;
    }
  }
  CHECK(mass0 == doctest::Approx(0.3));
  CHECK(mass1 == doctest::Approx(0.7));
  CHECK(count0 == 5);
  CHECK_THROWS_AS(validate(WorldModel{MultiTypeWorld{{{50, 5, 0.0, 0.3}}}}), DomainError);
}

TEST_CASE("explicit world sampling follows the prior") {
  const FactoidUniverse u(4);
  const FactoidId f1[] = {1};
  const FactoidId f2[] = {2, 3};
  ExplicitWorld single;
  single.instances.emplace_back(1.0, WorldInstance(FactoidDist::uniform_over(u, f1)));
  SeededRng rng(46);
  for (int t = 0; t < 10; ++t) CHECK(sample_world(single, rng).facts().members() == std::vector<FactoidId>{0, 1});

  ExplicitWorld two;
  two.instances.emplace_back(0.25, WorldInstance(FactoidDist::uniform_over(u, f1)));
  two.instances.emplace_back(0.75, WorldInstance(FactoidDist::uniform_over(u, f2)));
  std::size_t first = 0;
  for (int t = 0; t < 10'000; ++t) first += sample_world(two, rng).facts().size() == 2 ? 1 : 0;
  CHECK(std::abs(first / 1e4 - 0.25) < 4 * std::sqrt(0.25 * 0.75 / 1e4));
}

TEST_CASE("uniform posterior sampler") {
  const PermutedPowerLaw model{50, 10, 0.0};
  const FactoidUniverse u(50);
  SeededRng rng(47);
  const FactoidSet all_seen = FactoidSet::of(u, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  for (int t = 0; t < 5; ++t) {
    CHECK(posterior_sampler_uniform_world(model, all_seen, rng).facts().members() ==
          all_seen.members());
  }
  const PermutedPowerLaw dense{50, 49, 0.0};
  CHECK(posterior_sampler_uniform_world(dense, FactoidSet::of(u, {0, 3}), rng).hallucinations().size() == 0);
  CHECK_THROWS_AS(posterior_sampler_uniform_world(PermutedPowerLaw{50, 10, 1.0}, all_seen, rng),
                  UnsupportedModel);

  // Pr[y in F] = (N - m) / |Y \ O| for every unobserved y.
  const FactoidSet seen = FactoidSet::of(u, {0, 5, 9, 12});
  const std::size_t draws = 20'000;
  std::vector<std::size_t> hits(50, 0);
  for (std::size_t t = 0; t < draws; ++t) {
    const WorldInstance w = posterior_sampler_uniform_world(model, seen, rng);
    CHECK(w.facts().size() == 11);
    for (FactoidId y : w.facts().members()) ++hits[y];
  }
  const double p = 7.0 / 46.0;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(draws));
  for (FactoidId y = 0; y < 50; ++y) {
    if (seen.contains(y)) {
      CHECK(hits[y] == draws);
    } else {
      CHECK(std::abs(static_cast<double>(hits[y]) / draws - p) <= 3.5 * sigma);
    }
  }
}

TEST_CASE("posterior sampler matches exhaustive posterior on tiny worlds") {
  // For the uniform world the exhaustive posterior over all N-subsets is the oracle.
  SeededRng rng(48);
  for (std::size_t size = 3; size <= 8; ++size) {
    for (std::size_t facts = 1; facts <= std::min<std::size_t>(3, size - 1); ++facts) {
      const ExplicitWorld prior = uniform_world_prior(size, facts);
      for (std::size_t n = 1; n <= 3; ++n) {
        std::vector<std::vector<FactoidId>> samples;
        std::vector<FactoidId> cur;
        all_samples(size, n, 1, cur, samples);
        for (const auto& draws : samples) {
          const TrainingSample s(FactoidUniverse(size), draws);
          std::size_t seen = 0;
          for (const auto& m : s.counts()) seen += m.id != kBottom ? 1 : 0;
          if (seen > facts) {
            CHECK_THROWS_AS(analyze_regularity(prior, s), DomainError);
            continue;
          }
          const RegularityReport rep = analyze_regularity(prior, s);
          CHECK(rep.r_facts == doctest::Approx(1.0));
          CHECK(rep.r_probs == doctest::Approx(1.0));
          const UniformPosteriorTerms t = uniform_posterior_terms(size, facts, seen);
          // Exhaustive posterior marginal for one unobserved factoid.
          const FactoidSet unobserved = s.unobserved();
          if (unobserved.size() == 0) continue;
          const FactoidId y = unobserved.members().front();
          double z = 0.0;
          double in_f = 0.0;
          double mean = 0.0;
          for (const auto& [w, inst] : prior.instances) {
            double like = w;
            for (FactoidId x : draws) like *= inst.p()(x);
            z += like;
            in_f += inst.facts().contains(y) ? like : 0.0;
            mean += like * inst.p()(y);
          }
          CHECK(in_f / z == doctest::Approx(t.max_fact_prob).epsilon(1e-12));
          CHECK(mean / z == doctest::Approx(t.max_mean_prob).epsilon(1e-12));
          const auto post =
              posterior_sampler_uniform_world(PermutedPowerLaw{size, facts, 0.0}, s.observed(), rng);
          for (const auto& m : s.counts()) CHECK(post.facts().contains(m.id));
          CHECK(post.facts().size() == facts + 1);
        }
      }
    }
  }
}

TEST_CASE("regularity of explicit models") {
  const FactoidUniverse u(16);
  const FactoidId f[] = {1, 2, 3};
  ExplicitWorld single;
  single.instances.emplace_back(1.0, WorldInstance(FactoidDist::uniform_over(u, f)));
  const RegularityReport rep = analyze_regularity(single, TrainingSample(u, {}));
  CHECK(rep.s == doctest::Approx(1.09861228866811).epsilon(1e-13));
  CHECK_THROWS_AS(analyze_regularity(single, TrainingSample(u, {7})), DomainError);

  // Symmetric prior: all permutations of one profile.
  const FactoidUniverse u4(4);
  ExplicitWorld sym;
  const FactoidId perms[][3] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
  for (const auto& pm : perms) {
    const Atom atoms[] = {{pm[0], 0.6}, {pm[1], 0.4}};
    sym.instances.emplace_back(1.0 / 6.0, WorldInstance(FactoidDist::from_weights(u4, atoms)));
  }
  const RegularityReport srep = analyze_regularity(sym, TrainingSample(u4, {}));
  CHECK(srep.r_facts == doctest::Approx(1.0));
  CHECK(srep.r_probs == doctest::Approx(1.0));
}

TEST_CASE("w5 regularity: factorized analysis agrees with enumeration") {
  SeededRng rng(49);
  const std::vector<W5World> models = {{2, 2, 2, 2}, {1, 3, 2, 1}, {2, 1, 3, 2}, {1, 2, 2, 3}};
  for (const auto& m : models) {
    const ExplicitWorld all = enumerate_w5(m);
    const RegularityReport empty_f = analyze_regularity(m, TrainingSample(FactoidUniverse(m.universe_size()), {}));
    const RegularityReport empty_e = analyze_regularity(all, TrainingSample(FactoidUniverse(m.universe_size()), {}));
    CHECK(empty_f.r_facts == doctest::Approx(empty_e.r_facts));
    CHECK(empty_f.r_probs == doctest::Approx(empty_e.r_probs));
    CHECK(empty_f.s == doctest::Approx(empty_e.s));
    CHECK(empty_f.r_facts <= static_cast<double>(m.slots()) + 1e-12);
    for (int t = 0; t < 10; ++t) {
      const WorldInstance w = sample_world(m, rng);
      const TrainingSample s(w.universe(), sample_iid(w.p(), 1 + rng.below(4), rng));
      const RegularityReport f = analyze_regularity(m, s);
      const RegularityReport e = analyze_regularity(all, s);
      CHECK(f.r_facts == doctest::Approx(e.r_facts));
      CHECK(f.r_probs == doctest::Approx(e.r_probs));
      CHECK(f.r_facts <= static_cast<double>(m.slots()) + 1e-12);
    }
  }
  CHECK_THROWS_AS(enumerate_w5(W5World{3, 3, 3, 3}), DomainError);
}

TEST_CASE("w5 known regularity for the 3x3x3x3 world") {
  const W5World m{3, 3, 3, 3};
  const KnownRegularity k = known_regularity(m);
  CHECK(k.r == 9.0);
  CHECK(k.s == doctest::Approx(std::log(7.2)));
  CHECK(k.s == doctest::Approx(1.97408102602201).epsilon(1e-13));
  const RegularityReport rep = analyze_regularity(m, TrainingSample(FactoidUniverse(m.universe_size()), {}));
  CHECK(rep.r_facts <= 9.0 + 1e-12);
  CHECK(rep.s == doctest::Approx(std::log(7.2)));
}

TEST_CASE("known regularity of parametric worlds") {
  const KnownRegularity pl = known_regularity(PermutedPowerLaw{10'000'000, 1000, 0.0});
  CHECK(pl.r == 1.0);
  CHECK(pl.s == doctest::Approx(9.20924076663276).epsilon(1e-12));
  const KnownRegularity mt = known_regularity(MultiTypeWorld{{{1000, 10, 0.0, 0.5}, {500, 10, 0.0, 0.5}}});
  CHECK(mt.s == doctest::Approx(std::log(490.0 / 11.0)));
  CHECK_THROWS_AS(known_regularity(ExplicitWorld{}), DomainError);
}

}  // TEST_SUITE
