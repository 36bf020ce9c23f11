#include "monofact/worlds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "monofact/error.hpp"

namespace monofact {

namespace {

FactoidSet facts_of(const FactoidDist& p) {
  FactoidSet supp = p.support();
  if (supp.is_complement()) {
    std::vector<FactoidId> excluded;
    for (FactoidId y : supp.listed()) {
      if (y != kBottom) excluded.push_back(y);
    }
    return FactoidSet::all_except(p.universe(), std::move(excluded));
  }
  std::vector<FactoidId> ids(supp.listed().begin(), supp.listed().end());
  ids.push_back(kBottom);
  return FactoidSet::of(p.universe(), std::move(ids));
}

// Floyd's algorithm: k distinct values from [0, range), in insertion order.
std::vector<std::size_t> sample_distinct(std::size_t range, std::size_t k, SeededRng& rng) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::unordered_set<std::size_t> seen;
  seen.reserve(k * 2);
  for (std::size_t j = range - k; j < range; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    const std::size_t pick = seen.count(t) ? j : t;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

// Power-law weights on N randomly chosen and randomly ordered ids from
// [first, first + range_size).
std::vector<Atom> power_law_atoms(FactoidId first, std::size_t range_size, std::size_t fact_count,
                                  double exponent, SeededRng& rng) {
  std::vector<std::size_t> picks = sample_distinct(range_size, fact_count, rng);
  rng.shuffle(std::span<std::size_t>(picks));
  std::vector<Atom> atoms;
  atoms.reserve(fact_count);
  for (std::size_t rank = 0; rank < picks.size(); ++rank) {
    const double w = exponent == 0.0 ? 1.0 : std::pow(static_cast<double>(rank + 1), -exponent);
    atoms.push_back({static_cast<FactoidId>(first + picks[rank]), w});
  }
  return atoms;
}

void validate_power_law(std::size_t range_size, std::size_t fact_count, double exponent,
                        const std::string& what) {
  if (fact_count < 1) throw DomainError(what + ": fact_count must be at least 1");
  if (fact_count > range_size) {
    throw DomainError(what + ": fact_count exceeds the number of non-bottom factoids");
  }
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw DomainError(what + ": exponent must be finite and non-negative");
  }
}

double log_ratio(std::size_t hallucinations, std::size_t facts) {
  return std::log(static_cast<double>(hallucinations) / static_cast<double>(facts));
}

}  // namespace

WorldInstance::WorldInstance(FactoidDist p) : p_(std::move(p)), facts_(facts_of(p_)) {}

FactoidId W5World::id_of(std::size_t person, std::size_t date, std::size_t food,
                         std::size_t location) const {
  return static_cast<FactoidId>(1 + ((person * dates + date) * foods + food) * locations + location);
}

std::size_t W5World::slot_of(FactoidId y) const {
  if (y == kBottom || y >= universe_size()) throw DomainError("W5World::slot_of: not a tuple");
  return (y - 1) / choices();
}

void validate(const WorldModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PermutedPowerLaw>) {
          if (m.universe_size < 2) throw DomainError("permuted_power_law: universe_size < 2");
          validate_power_law(m.universe_size - 1, m.fact_count, m.exponent, "permuted_power_law");
        } else if constexpr (std::is_same_v<T, W5World>) {
          if (m.people == 0 || m.dates == 0 || m.foods == 0 || m.locations == 0) {
            throw DomainError("w5: all dimensions must be positive");
          }
        } else if constexpr (std::is_same_v<T, MultiTypeWorld>) {
          if (m.types.empty()) throw DomainError("multi_type: no types");
          double total = 0.0;
          for (std::size_t i = 0; i < m.types.size(); ++i) {
            const auto& t = m.types[i];
            validate_power_law(t.range_size, t.fact_count, t.exponent,
                               "multi_type type " + std::to_string(i + 1));
            if (!(t.weight > 0.0)) throw DomainError("multi_type: weights must be positive");
            total += t.weight;
          }
          if (std::abs(total - 1.0) > 1e-9) throw DomainError("multi_type: weights must sum to 1");
        } else {
          if (m.instances.empty()) throw DomainError("explicit world: no instances");
          double total = 0.0;
          for (const auto& [w, inst] : m.instances) {
            if (!(w > 0.0)) throw DomainError("explicit world: prior weights must be positive");
            if (!(inst.universe() == m.instances.front().second.universe())) {
              throw DomainError("explicit world: instances over different universes");
            }
            total += w;
          }
          if (std::abs(total - 1.0) > 1e-9) {
            throw DomainError("explicit world: prior weights must sum to 1");
          }
        }
      },
      model);
}

std::size_t universe_size(const WorldModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PermutedPowerLaw>) {
          return m.universe_size;
        } else if constexpr (std::is_same_v<T, W5World>) {
          return m.universe_size();
        } else if constexpr (std::is_same_v<T, MultiTypeWorld>) {
          std::size_t total = 1;
          for (const auto& t : m.types) total += t.range_size;
          return total;
        } else {
          return m.instances.at(0).second.universe().size();
        }
      },
      model);
}

std::vector<TypeRange> type_ranges(const MultiTypeWorld& model) {
  std::vector<TypeRange> out;
  FactoidId first = 1;
  for (const auto& t : model.types) {
    out.push_back({first, t.range_size});
    first = static_cast<FactoidId>(first + t.range_size);
  }
  return out;
}

WorldInstance sample_world(const WorldModel& model, SeededRng& rng) {
  validate(model);
  const FactoidUniverse universe(universe_size(model));
  return std::visit(
      [&](const auto& m) -> WorldInstance {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PermutedPowerLaw>) {
          auto atoms = power_law_atoms(1, m.universe_size - 1, m.fact_count, m.exponent, rng);
          return WorldInstance(FactoidDist::from_weights(universe, atoms));
        } else if constexpr (std::is_same_v<T, W5World>) {
          std::vector<Atom> atoms;
          atoms.reserve(m.slots());
          for (std::size_t person = 0; person < m.people; ++person) {
            for (std::size_t date = 0; date < m.dates; ++date) {
              const auto choice = static_cast<std::size_t>(rng.below(m.choices()));
              atoms.push_back(
                  {m.id_of(person, date, choice / m.locations, choice % m.locations), 1.0});
            }
          }
          return WorldInstance(FactoidDist::from_weights(universe, atoms));
        } else if constexpr (std::is_same_v<T, MultiTypeWorld>) {
          const auto ranges = type_ranges(m);
          std::vector<Atom> merged;
          for (std::size_t i = 0; i < m.types.size(); ++i) {
            const auto& t = m.types[i];
            auto atoms = power_law_atoms(ranges[i].first, t.range_size, t.fact_count, t.exponent, rng);
            double total = 0.0;
            for (const Atom& a : atoms) total += a.prob;
            for (Atom& a : atoms) a.prob *= t.weight / total;
            merged.insert(merged.end(), atoms.begin(), atoms.end());
          }
          return WorldInstance(FactoidDist::from_weights(universe, merged));
        } else {
          const double u = rng.uniform01();
          double acc = 0.0;
          for (const auto& [w, inst] : m.instances) {
            acc += w;
            if (u < acc) return inst;
          }
          return m.instances.back().second;
        }
      },
      model);
}

WorldInstance posterior_sampler_uniform_world(const PermutedPowerLaw& model,
                                              const FactoidSet& observed, SeededRng& rng) {
  if (model.exponent != 0.0) {
    throw UnsupportedModel("posterior_sampler_uniform_world: exact sampler requires exponent 0");
  }
  validate(WorldModel{model});
  if (observed.is_complement()) throw DomainError("posterior sampler: observed set too large");
  if (observed.universe().size() != model.universe_size) {
    throw DomainError("posterior sampler: universe mismatch");
  }
  std::vector<FactoidId> excluded(observed.listed().begin(), observed.listed().end());
  if (!std::binary_search(excluded.begin(), excluded.end(), kBottom)) {
    excluded.insert(excluded.begin(), kBottom);
  }
  const std::size_t seen_facts = excluded.size() - 1;
  if (seen_facts > model.fact_count) {
    throw DomainError("posterior sampler: more observed facts than fact_count");
  }
  const std::size_t free_slots = model.universe_size - excluded.size();
  const std::size_t missing = model.fact_count - seen_facts;
  std::vector<FactoidId> facts(excluded.begin() + 1, excluded.end());
  for (std::size_t j : sample_distinct(free_slots, missing, rng)) {
    facts.push_back(detail::nth_unlisted(excluded, j));
  }
  return WorldInstance(FactoidDist::uniform_over(observed.universe(), facts));
}

double sparsity(const WorldInstance& world) {
  return log_ratio(world.hallucinations().size(), world.facts().size());
}

RegularityReport analyze_regularity(const ExplicitWorld& model, const TrainingSample& sample) {
  validate(WorldModel{model});
  const FactoidUniverse universe = model.instances.front().second.universe();
  if (!(universe == sample.universe())) throw DomainError("analyze_regularity: universe mismatch");
  const std::size_t size = universe.size();

  // Posterior weight of instance j is prior_j * prod_i p_j(draw_i).
  std::vector<double> log_w(model.instances.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < model.instances.size(); ++j) {
    const auto& [prior, inst] = model.instances[j];
    double lw = std::log(prior);
    bool consistent = true;
    for (const auto& m : sample.counts()) {
      const double py = inst.p()(m.id);
      if (py <= 0.0) {
        consistent = false;
        break;
      }
      lw += static_cast<double>(m.count) * std::log(py);
    }
    if (consistent) log_w[j] = lw;
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(top)) {
    throw DomainError("analyze_regularity: sample has zero posterior mass under every instance");
  }
  std::vector<double> w(log_w.size());
  double z = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(log_w[j] - top);
    z += w[j];
  }
  for (double& x : w) x /= z;

  std::vector<double> pr_fact(size, 0.0);
  std::vector<double> mean_p(size, 0.0);
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.size(); ++j) {
    const WorldInstance& inst = model.instances[j].second;
    s = std::min(s, sparsity(inst));
    if (w[j] == 0.0) continue;
    for (FactoidId y : inst.facts().members()) pr_fact[y] += w[j];
    for (const Atom& a : inst.p().atoms()) mean_p[a.id] += w[j] * a.prob;
  }

  const FactoidSet unobserved = sample.unobserved();
  double max_fact = 0.0;
  double sum_fact = 0.0;
  double max_prob = 0.0;
  double sum_prob = 0.0;
  for (std::size_t y = 0; y < size; ++y) {
    if (!unobserved.contains(static_cast<FactoidId>(y))) continue;
    max_fact = std::max(max_fact, pr_fact[y]);
    sum_fact += pr_fact[y];
    max_prob = std::max(max_prob, mean_p[y]);
    sum_prob += mean_p[y];
  }
  const auto u = static_cast<double>(unobserved.size());
  const double r_facts = sum_fact > 0.0 ? max_fact * u / sum_fact : 1.0;
  const double r_probs = sum_prob > 0.0 ? max_prob * u / sum_prob : 1.0;
  return {s, r_facts, r_probs, sample};
}

RegularityReport analyze_regularity(const W5World& model, const TrainingSample& sample) {
  validate(WorldModel{model});
  if (sample.universe().size() != model.universe_size()) {
    throw DomainError("analyze_regularity: universe mismatch");
  }
  // Under the posterior each slot is either pinned by its observed tuple or
  // still uniform over its choices, independently of the other slots.
  std::vector<FactoidId> pinned(model.slots(), kBottom);
  for (const auto& m : sample.counts()) {
    if (m.id == kBottom) {
      throw DomainError("analyze_regularity: bottom has zero probability in a W5 world");
    }
    const std::size_t slot = model.slot_of(m.id);
    if (pinned[slot] != kBottom && pinned[slot] != m.id) {
      throw DomainError("analyze_regularity: two facts observed for one W5 slot");
    }
    pinned[slot] = m.id;
  }
  const auto open_slots =
      static_cast<std::size_t>(std::count(pinned.begin(), pinned.end(), kBottom));
  const double pr_open = 1.0 / static_cast<double>(model.choices());
  const auto u = static_cast<double>(sample.unobserved().size());
  // E[|F n U|] = open_slots and the largest Pr[y in F] over U is 1/choices;
  // E[p(y)] is the same profile scaled by 1/slots.
  const double r = open_slots > 0 ? pr_open * u / static_cast<double>(open_slots) : 1.0;
  const std::size_t facts = model.slots() + 1;
  return {log_ratio(model.universe_size() - facts, facts), r, r, sample};
}

ExplicitWorld enumerate_w5(const W5World& model, std::size_t max_instances) {
  validate(WorldModel{model});
  double count = std::pow(static_cast<double>(model.choices()), static_cast<double>(model.slots()));
  if (count > static_cast<double>(max_instances)) {
    throw DomainError("enumerate_w5: " + std::to_string(count) + " instances exceed the limit");
  }
  const auto total = static_cast<std::size_t>(count);
  const FactoidUniverse universe(model.universe_size());
  ExplicitWorld out;
  out.instances.reserve(total);
  std::vector<std::size_t> choice(model.slots(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<FactoidId> facts;
    facts.reserve(model.slots());
    for (std::size_t slot = 0; slot < model.slots(); ++slot) {
      facts.push_back(static_cast<FactoidId>(1 + slot * model.choices() + choice[slot]));
    }
    out.instances.emplace_back(1.0 / static_cast<double>(total),
                               WorldInstance(FactoidDist::uniform_over(universe, facts)));
    for (std::size_t slot = 0; slot < model.slots(); ++slot) {
      if (++choice[slot] < model.choices()) break;
      choice[slot] = 0;
    }
  }
  return out;
}

KnownRegularity known_regularity(const WorldModel& model) {
  validate(model);
  return std::visit(
      [](const auto& m) -> KnownRegularity {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PermutedPowerLaw>) {
          return {log_ratio(m.universe_size - m.fact_count - 1, m.fact_count + 1), 1.0};
        } else if constexpr (std::is_same_v<T, W5World>) {
          const std::size_t facts = m.slots() + 1;
          return {log_ratio(m.universe_size() - facts, facts), static_cast<double>(m.slots())};
        } else if constexpr (std::is_same_v<T, MultiTypeWorld>) {
          // Each type lives in its own universe (range + bottom).
          double s = std::numeric_limits<double>::infinity();
          for (const auto& t : m.types) {
            s = std::min(s, log_ratio(t.range_size - t.fact_count, t.fact_count + 1));
          }
          return {s, 1.0};
        } else {
          throw UnsupportedModel("known_regularity: explicit worlds need analyze_regularity");
        }
      },
      model);
}

}  // namespace monofact
