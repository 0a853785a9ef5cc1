#pragma once

#include <map>

#include "kselect/mechanisms.hpp"
#include "kselect/rational.hpp"

namespace kselect {

// Raised when an enumeration would exceed the configured guard; the message
// names the bound and the offending count.
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExactOptions {
  // Upper bound on the number of enumerated randomness paths.
  std::uint64_t max_paths = 100'000'000;
};

// Exact outcome distribution of one mechanism run on one graph. Probabilities
// are exact rationals and sum to exactly 1.
struct SelectionDistribution {
  int n = 0;
  int k = 0;
  std::map<Selection, Rational> outcomes;
};

// Full enumeration of the mechanism's randomness:
//   - deterministic mechanisms yield a point mass;
//   - random-subset enumerates all C(n, k) outcomes;
//   - m-RP enumerates m^n assignments x C(m, |T|) choices of T x fill subsets;
//   - sliding-partition runs a dynamic program over eliminated-set states.
SelectionDistribution exact_distribution(const MechanismSpec& spec, const DirectedGraph& g,
                                         const ExactOptions& opts = {});

// Per-agent selection probabilities Pr[i in S], same enumeration, no outcome
// map. Index i-1 holds agent i.
std::vector<Rational> exact_selection_probabilities(const MechanismSpec& spec,
                                                    const DirectedGraph& g,
                                                    const ExactOptions& opts = {});

// Pr[i in S] derived from a distribution; the values sum to exactly k.
std::map<AgentId, Rational> selection_probabilities(const SelectionDistribution& dist);

// E[sum of indegrees of the selected set]. Evaluates both the outcome-sum and
// the per-agent linearity form and insists they agree.
Rational expected_total_indegree(const DirectedGraph& g, const SelectionDistribution& dist);

}  // namespace kselect
