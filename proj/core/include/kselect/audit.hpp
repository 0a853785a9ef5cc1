#pragma once

#include <optional>

#include "kselect/exact.hpp"

namespace kselect {

// Maximum total indegree over all k-subsets: the sum of the k largest
// indegrees.
long long opt_value(const DirectedGraph& g, int k);

// Approximation-ratio measurement for one (mechanism, graph) pair.
// Conventions: OPT = 0 gives ratio 1 (every mechanism is vacuously optimal);
// OPT > 0 with zero expected indegree is reported as infinite, never as a
// float.
struct RatioEstimate {
  enum class Mode { Exact, MonteCarlo };
  Mode mode = Mode::Exact;
  long long opt = 0;
  bool infinite = false;

  // Exact mode.
  Rational ratio{};
  Rational expected{};

  // Monte Carlo mode (99% normal-approximation interval).
  double ratio_value = 0.0;
  double expected_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_high_infinite = false;
  std::uint64_t trials = 0;
};

RatioEstimate approx_ratio_exact(const MechanismSpec& spec, const DirectedGraph& g,
                                 const ExactOptions& opts = {});
RatioEstimate approx_ratio_mc(const MechanismSpec& spec, const DirectedGraph& g,
                              std::uint64_t trials, std::uint64_t seed);

// True when the estimate witnesses a ratio >= bound (infinite counts).
bool ratio_at_least(const RatioEstimate& est, const Rational& bound);

// The instance set an audit quantifies over.
struct GraphScope {
  enum class Kind { AllGraphs, Explicit, Sampled };
  Kind kind = Kind::AllGraphs;
  std::vector<DirectedGraph> graphs;  // Explicit
  std::uint64_t sample_count = 0;     // Sampled
  std::uint64_t sample_seed = 0;
  double sample_p = 0.5;

  static GraphScope all() { return {}; }
  static GraphScope of(std::vector<DirectedGraph> graphs);
  static GraphScope sampled(std::uint64_t count, std::uint64_t seed, double p = 0.5);
};

struct AuditOptions {
  std::uint64_t max_engine_evals = 2'000'000;
  ExactOptions exact{};
};

struct Counterexample {
  DirectedGraph graph;             // true graph
  std::vector<AgentId> coalition;  // deviating agents
  DirectedGraph reported;          // graph after the misreport
  std::vector<Rational> before;    // per-agent probabilities on `graph`
  std::vector<Rational> after;     // per-agent probabilities on `reported`
};

enum class Verdict { Holds, Violated, Inconclusive };

// A violated report always carries a counterexample that has been re-checked
// by replaying both engine evaluations from scratch.
struct AuditReport {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Counterexample> counterexample;
  std::uint64_t instances_checked = 0;
  std::uint64_t deviations_checked = 0;
  double runtime_seconds = 0.0;
};

// Strategyproofness audit: for every in-scope graph, every agent, and every
// of the 2^(n-1) reports of that agent's outgoing-edge set, the agent's exact
// selection probability must not change. The first violation in (graph,
// agent, report) order is returned. AllGraphs scope requires n <= 4; a
// Sampled scope that finds nothing is Inconclusive.
AuditReport check_sp(const MechanismSpec& spec, int n, const GraphScope& scope,
                     const AuditOptions& opts = {});

// Group-strategyproofness audit (weak form): violated iff some coalition of
// size <= coalition_size can jointly misreport so that every member's exact
// selection probability strictly increases. Exhaustive mode supports
// coalition_size <= 2.
AuditReport check_gsp(const MechanismSpec& spec, int n, int coalition_size,
                      const GraphScope& scope, const AuditOptions& opts = {});

// A function table over the star domain: index x in [0, 2^(n-1)) encodes
// which of agents 1..n-1 point at the hub agent n; the value is the selected
// k-subset.
using StarTable = std::vector<Selection>;

struct ParityReport {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> occurrence_count;  // per agent 1..n: |{x : i in f(x)}|
  BigInt total_membership = 0;                  // sum over x of |f(x)|
  std::vector<bool> agent_count_even;           // per agent 1..n
  bool constraints12 = false;                   // hub excluded at 0, included elsewhere
  bool hub_count_odd = false;
  bool total_even = false;
  // constraints 1-2 hold, the hub count is odd and the total is even; any
  // strategyproof completion would need every non-hub count even, which the
  // parity arithmetic rules out.
  bool contradiction_forced = false;
};

ParityReport parity_audit(const StarTable& table, int n, int k);

struct ImpossibilityOptions {
  std::uint64_t max_nodes = 200'000'000;            // full or pruned enumeration budget
  std::uint64_t parity_enumeration_limit = 1'000'000;
  std::uint64_t parity_sample_count = 4096;         // when above the limit
  std::uint64_t parity_sample_seed = 0;
  int parity_samples_kept = 8;
};

struct ImpossibilityResult {
  int n = 0;
  int k = 0;
  BigInt table_space = 0;      // C(n,k)^(2^(n-1))
  bool exhaustive = true;      // full table enumeration (vs constraint-pruned search)
  std::uint64_t tables_checked = 0;
  std::uint64_t feasible_count = 0;  // tables satisfying constraints 1-3
  BigInt candidates12 = 0;           // tables satisfying constraints 1-2
  std::uint64_t parity_checked = 0;
  bool parity_all_contradiction = true;
  std::vector<ParityReport> parity_samples;
  double runtime_seconds = 0.0;
};

// Exhaustive search for deterministic SP mechanisms over the star domain:
// counts tables f: {0,1}^(n-1) -> S_k satisfying (1) n not in f(0), (2) n in
// f(x) for x != 0, (3) membership of every non-hub agent invariant under
// flipping its own bit. Also runs the parity audit over the constraint-1&2
// candidates (all of them, or a seeded sample when too many).
ImpossibilityResult impossibility_search(int n, int k, const ImpossibilityOptions& opts = {});

// Constructive lower-bound run on the directed cycle: finds a cycle agent
// with selection probability <= k/(k+1), removes its outgoing edge, and
// measures both ratios against the bound 1 + 1/(k^2+k-1).
struct CycleWitness {
  MechanismSpec spec;
  int n = 0;
  int k = 0;
  bool sp_premise_ok = true;  // a qualifying agent exists
  AgentId cycle_agent = 0;
  Rational prob_on_cycle{};
  DirectedGraph graph;
  DirectedGraph graph_deviated;
  RatioEstimate ratio_graph;
  RatioEstimate ratio_deviated;
  Rational bound{};
  bool bound_met = false;
};

CycleWitness cycle_lower_bound_witness(const MechanismSpec& spec, int n,
                                       const ExactOptions& opts = {});

// Constructive GSP lower-bound run: two minimal-probability agents on the
// empty graph, the mutual-edge graph G', and the single-edge graph G''; a
// GSP mechanism must exhibit ratio >= (n-1)/k on G''.
struct GspWitness {
  MechanismSpec spec;
  int n = 0;
  int k = 0;
  AgentId agent_i = 0;
  AgentId agent_j = 0;
  Rational prob_i_empty{};
  Rational prob_j_empty{};
  DirectedGraph graph_mutual;
  Rational prob_i_mutual{};
  Rational prob_j_mutual{};
  bool gsp_violated_at_mutual = false;  // both agents strictly gained
  AgentId qualifying_agent = 0;
  DirectedGraph graph_single;
  RatioEstimate ratio_single;
  Rational bound{};
  bool bound_met = false;
};

GspWitness gsp_lower_bound_witness(const MechanismSpec& spec, int n,
                                   const ExactOptions& opts = {});

}  // namespace kselect
