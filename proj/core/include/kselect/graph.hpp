#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kselect {

// Agents are 1-based contiguous integers 1..n.
using AgentId = int;

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Immutable directed approval graph. Construction enforces: endpoints in
// 1..n, no self-loops, no duplicate edges. Isolated agents are retained via
// the explicit agent count.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(int n, std::vector<std::pair<AgentId, AgentId>> edges);

  int n() const { return n_; }
  const std::vector<std::pair<AgentId, AgentId>>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool has_edge(AgentId u, AgentId v) const;

  // Number of incoming edges of agent i.
  int indegree(AgentId i) const;

  // Number of incoming edges of agent i whose source lies in the given set.
  // `member` is indexed 1..n.
  int indegree_from(AgentId i, const std::vector<bool>& member) const;
  int indegree_from(AgentId i, const std::vector<AgentId>& set) const;

  // Sources of edges into i, ascending.
  const AgentId* in_begin(AgentId i) const { return in_src_.data() + in_off_[i - 1]; }
  const AgentId* in_end(AgentId i) const { return in_src_.data() + in_off_[i]; }

  std::vector<AgentId> out_neighbors(AgentId i) const;

  // Copy of this graph with agent i's outgoing edge set replaced by edges to
  // `targets`. Everything else is untouched.
  DirectedGraph with_outgoing_replaced(AgentId i, const std::vector<AgentId>& targets) const;

  bool operator==(const DirectedGraph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  void check_agent(AgentId i) const;

  int n_ = 0;
  std::vector<std::pair<AgentId, AgentId>> edges_;  // sorted ascending by (source, target)
  std::vector<int> indeg_;
  std::vector<int> in_off_;       // CSR offsets, size n+1
  std::vector<AgentId> in_src_;   // concatenated in-neighbor lists
};

// Edge-list text format: first non-comment line "n <int>", then lines
// "edge <u> <v>" (meaning u -> v). '#' starts a comment line, blank lines are
// ignored. Serialization is canonical: edges ascending by (u, v).
DirectedGraph parse_graph(const std::string& text);
std::string serialize_graph(const DirectedGraph& g);

// Star on n = bits.size() + 1 agents: edge (i, n) iff bits[i-1] == 1.
DirectedGraph gen_star(const std::vector<int>& bits);

// Directed cycle (1,2),...,(k,k+1),(k+1,1); agents k+2..n isolated.
DirectedGraph gen_cycle(int k, int n);

// Single edge (1, n).
DirectedGraph gen_single_edge(int n);

// Tree on n = 1 + t + t*d agents: t spokes (agents 2..t+1) each with an edge
// to agent 1 and d incoming edges from d distinct leaves.
DirectedGraph gen_sliding_counterexample(int t, int d);

// Each ordered pair (i, j), i != j, included independently with probability p.
DirectedGraph gen_random(int n, double p, std::uint64_t seed);

// Named fixed instances: "figure2", "figure4".
DirectedGraph gen_named(const std::string& name);

}  // namespace kselect
