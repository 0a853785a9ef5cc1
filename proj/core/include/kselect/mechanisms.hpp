#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kselect/graph.hpp"
#include "kselect/rng.hpp"

namespace kselect {

// A selected subset, canonicalized: members sorted ascending.
using Selection = std::vector<AgentId>;

enum class MechanismKind { Optimal, RandomSubset, Mrp, EdgeScan, SlidingPartition };

// A closed description of one mechanism instance; the unit the audit suite
// quantifies over. k is the selection size; m the partition count (Mrp only).
struct MechanismSpec {
  MechanismKind kind = MechanismKind::Optimal;
  int k = 1;
  int m = 0;

  bool operator==(const MechanismSpec&) const = default;
};

// Mechanism string syntax: "optimal", "random-subset", "mrp:m=<int>",
// "edge-scan", "sliding-partition". k is supplied separately.
MechanismSpec parse_mechanism(const std::string& text, int k);
std::string mechanism_string(const MechanismSpec& spec);

// Throws ValidationError unless spec is runnable on n agents
// (1 <= k <= n; Mrp needs m >= 1; SlidingPartition needs k == 1;
// EdgeScan ignores k but needs n >= 2).
void validate_mechanism(const MechanismSpec& spec, int n);

// The fully resolved randomness of one Random m-Partition run. assignment[i-1]
// is agent i's subset (0-based, values 0..m-1); big_set_indices is the sorted
// subset T of {0..m-1} of size k - m*floor(k/m); fill_choice is the
// lexicographic rank of the completion subset among all (k-k')-subsets of the
// unselected agents, consulted only when step 3 leaves a shortfall.
struct MrpRandomness {
  std::vector<int> assignment;
  std::vector<int> big_set_indices;
  BigInt fill_choice = 0;
};

// The k agents with largest indegree. Ties are broken toward fewer outgoing
// edges, then lower index, which makes the selection deterministic and total.
Selection optimal_select(const DirectedGraph& g, int k);

// Uniform over all C(n, k) subsets; ignores the edges entirely.
Selection random_subset_draw(const DirectedGraph& g, int k, Rng& rng);
Selection random_subset(const DirectedGraph& g, int k, std::uint64_t seed);

// Deterministic core of the Random m-Partition mechanism: from each subset
// S_t take ceil(k/m) agents if t is in T else floor(k/m), ranked by indegree
// from outside S_t with lexicographic (lowest index) tie-break; a subset
// smaller than its quota contributes all of itself; a shortfall is completed
// by the fill subset designated by r.fill_choice.
Selection m_rp_core(const DirectedGraph& g, int k, int m, const MrpRandomness& r);

MrpRandomness draw_mrp_randomness(const DirectedGraph& g, int k, int m, Rng& rng);
Selection m_rp(const DirectedGraph& g, int k, int m, std::uint64_t seed);

// Deterministic scan mechanism; returns one or two agents.
Selection edge_scan(const DirectedGraph& g);

// Iterative elimination for k = 1: repeatedly remove an agent with minimum
// indegree from the eliminated set, uniform random tie-break; the survivor is
// selected.
Selection sliding_partition_draw(const DirectedGraph& g, Rng& rng);
Selection sliding_partition(const DirectedGraph& g, std::uint64_t seed);

// One sample of any mechanism. Deterministic mechanisms ignore the generator.
Selection sample_mechanism(const MechanismSpec& spec, const DirectedGraph& g, Rng& rng);

}  // namespace kselect
