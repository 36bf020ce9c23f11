#include "monofact/lms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "monofact/error.hpp"

namespace monofact {

LmAlgorithm LmAlgorithm::yay_mixture(LmAlgorithm base, double lambda) {
  LmAlgorithm alg = of(Kind::yay_mixture);
  alg.lambda = lambda;
  alg.base = std::make_shared<const LmAlgorithm>(std::move(base));
  return alg;
}

bool LmAlgorithm::uses_truth() const {
  if (kind == Kind::oracle) return true;
  return kind == Kind::yay_mixture && base && base->uses_truth();
}

const char* kind_name(LmAlgorithm::Kind kind) {
  switch (kind) {
    case LmAlgorithm::Kind::monofact_memorizer: return "monofact_memorizer";
    case LmAlgorithm::Kind::empirical: return "empirical";
    case LmAlgorithm::Kind::laplace: return "laplace";
    case LmAlgorithm::Kind::uniform: return "uniform";
    case LmAlgorithm::Kind::oracle: return "oracle";
    case LmAlgorithm::Kind::yay_mixture: return "yay_mixture";
  }
  return "unknown";
}

std::optional<LmAlgorithm::Kind> parse_kind(const std::string& name) {
  using K = LmAlgorithm::Kind;
  for (K k : {K::monofact_memorizer, K::empirical, K::laplace, K::uniform, K::oracle,
              K::yay_mixture}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

std::string LmAlgorithm::name() const {
  switch (kind) {
    case Kind::laplace: return "laplace(" + std::to_string(alpha) + ")";
    case Kind::yay_mixture:
      return "yay_mixture(" + (base ? base->name() : std::string("?")) + "," +
             std::to_string(lambda) + ")";
    default: return kind_name(kind);
  }
}

void validate(const LmAlgorithm& alg) {
  if (alg.kind == LmAlgorithm::Kind::laplace && !(alg.alpha > 0.0 && std::isfinite(alg.alpha))) {
    throw DomainError("laplace: alpha must be positive");
  }
  if (alg.kind == LmAlgorithm::Kind::yay_mixture) {
    if (!(alg.lambda >= 0.0 && alg.lambda <= 1.0)) {
      throw DomainError("yay_mixture: lambda must lie in [0,1]");
    }
    if (!alg.base) throw DomainError("yay_mixture: missing base algorithm");
    validate(*alg.base);
  }
}

FactoidDist train(const LmAlgorithm& alg, const TrainingSample& sample, const FactoidDist* truth) {
  validate(alg);
  const FactoidUniverse& universe = sample.universe();
  switch (alg.kind) {
    case LmAlgorithm::Kind::monofact_memorizer: {
      // MF/|U| on every unobserved factoid, (1 - MF)/|O| on every observed one.
      // Choosing the document for each factoid is the identity here.
      const double mf = monofact_estimate(sample);
      const FactoidSet& observed = sample.observed();
      const std::size_t unobserved = universe.size() - observed.size();
      if (unobserved == 0) throw DomainError("monofact_memorizer: U is empty");
      const double on_observed = (1.0 - mf) / static_cast<double>(observed.size());
      std::vector<Atom> atoms;
      atoms.reserve(observed.size());
      for (FactoidId y : observed.listed()) atoms.push_back({y, on_observed});
      return FactoidDist::from_weights(universe, atoms, mf / static_cast<double>(unobserved));
    }
    case LmAlgorithm::Kind::empirical: {
      if (sample.n() == 0) throw DomainError("empirical: empty sample");
      std::vector<Atom> atoms;
      for (const auto& m : sample.counts()) atoms.push_back({m.id, static_cast<double>(m.count)});
      return FactoidDist::from_weights(universe, atoms);
    }
    case LmAlgorithm::Kind::laplace: {
      std::vector<Atom> atoms;
      for (const auto& m : sample.counts()) {
        atoms.push_back({m.id, static_cast<double>(m.count) + alg.alpha});
      }
      return FactoidDist::from_weights(universe, atoms, alg.alpha);
    }
    case LmAlgorithm::Kind::uniform:
      return FactoidDist::uniform(universe);
    case LmAlgorithm::Kind::oracle:
      if (truth == nullptr) throw DomainError("oracle: requires the true distribution");
      if (!(truth->universe() == universe)) throw DomainError("oracle: universe mismatch");
      return *truth;
    case LmAlgorithm::Kind::yay_mixture:
      return mixture(FactoidDist::point_mass(universe, kBottom), train(*alg.base, sample, truth),
                     alg.lambda);
  }
  throw DomainError("train: unknown algorithm");
}

double hallucination_rate(const FactoidDist& g, const WorldInstance& world) {
  if (!(g.universe() == world.universe())) throw DomainError("hallucination_rate: universe mismatch");
  return std::clamp(mass_of_set(g, world.hallucinations()), 0.0, 1.0);
}

}  // namespace monofact
