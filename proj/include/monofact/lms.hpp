#pragma once

#include <memory>
#include <optional>
#include <string>

#include "monofact/core_prob.hpp"
#include "monofact/estimators.hpp"
#include "monofact/worlds.hpp"

namespace monofact {

/// A learning algorithm mapping training data to a generated factoid
/// distribution g.
struct LmAlgorithm {
  enum class Kind { monofact_memorizer, empirical, laplace, uniform, oracle, yay_mixture };

  Kind kind = Kind::empirical;
  double alpha = 0.5;    ///< laplace pseudo-count
  double lambda = 0.99;  ///< yay_mixture weight on bottom
  std::shared_ptr<const LmAlgorithm> base;  ///< yay_mixture only

  static LmAlgorithm of(Kind k) {
    LmAlgorithm a;
    a.kind = k;
    return a;
  }
  static LmAlgorithm monofact_memorizer() { return of(Kind::monofact_memorizer); }
  static LmAlgorithm empirical() { return of(Kind::empirical); }
  static LmAlgorithm laplace(double alpha) {
    LmAlgorithm a = of(Kind::laplace);
    a.alpha = alpha;
    return a;
  }
  static LmAlgorithm uniform() { return of(Kind::uniform); }
  static LmAlgorithm oracle() { return of(Kind::oracle); }
  static LmAlgorithm yay_mixture(LmAlgorithm base, double lambda);

  /// The oracle reads the hidden truth and is not a learning algorithm.
  bool uses_truth() const;
  std::string name() const;
};

void validate(const LmAlgorithm& alg);
const char* kind_name(LmAlgorithm::Kind kind);
std::optional<LmAlgorithm::Kind> parse_kind(const std::string& name);

/// Train on the sample. `truth` is required by the oracle and ignored otherwise.
FactoidDist train(const LmAlgorithm& alg, const TrainingSample& sample,
                  const FactoidDist* truth = nullptr);

/// g(H), the probability of generating a factoid outside F.
double hallucination_rate(const FactoidDist& g, const WorldInstance& world);

}  // namespace monofact
