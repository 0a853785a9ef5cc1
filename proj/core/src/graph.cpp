#include "kselect/graph.hpp"

#include <algorithm>
#include <sstream>

#include "kselect/rng.hpp"

namespace kselect {

DirectedGraph::DirectedGraph(int n, std::vector<std::pair<AgentId, AgentId>> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw ValidationError("graph needs at least one agent");
  for (const auto& [u, v] : edges_) {
    if (u < 1 || u > n_ || v < 1 || v > n_)
      throw ValidationError("edge endpoint out of range: (" + std::to_string(u) + "," +
                            std::to_string(v) + ") with n=" + std::to_string(n_));
    if (u == v) throw ValidationError("self-loop on agent " + std::to_string(u));
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ValidationError("duplicate edge");

  indeg_.assign(n_ + 1, 0);
  for (const auto& e : edges_) ++indeg_[e.second];
  in_off_.assign(n_ + 1, 0);
  for (int i = 1; i <= n_; ++i) in_off_[i] = in_off_[i - 1] + indeg_[i];
  in_src_.resize(edges_.size());
  std::vector<int> cursor(in_off_.begin(), in_off_.end() - 1);
  for (const auto& [u, v] : edges_) in_src_[cursor[v - 1]++] = u;
  for (int i = 1; i <= n_; ++i) std::sort(in_src_.begin() + in_off_[i - 1], in_src_.begin() + in_off_[i]);
}

void DirectedGraph::check_agent(AgentId i) const {
  if (i < 1 || i > n_)
    throw ValidationError("agent " + std::to_string(i) + " out of range 1.." + std::to_string(n_));
}

bool DirectedGraph::has_edge(AgentId u, AgentId v) const {
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(u, v));
}

int DirectedGraph::indegree(AgentId i) const {
  check_agent(i);
  return indeg_[i];
}

int DirectedGraph::indegree_from(AgentId i, const std::vector<bool>& member) const {
  check_agent(i);
  int count = 0;
  for (const AgentId* it = in_begin(i); it != in_end(i); ++it)
    if (member[*it]) ++count;
  return count;
}

int DirectedGraph::indegree_from(AgentId i, const std::vector<AgentId>& set) const {
  std::vector<bool> member(n_ + 1, false);
  for (AgentId a : set) {
    check_agent(a);
    member[a] = true;
  }
  return indegree_from(i, member);
}

std::vector<AgentId> DirectedGraph::out_neighbors(AgentId i) const {
  check_agent(i);
  std::vector<AgentId> out;
  auto lo = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, 0));
  for (auto it = lo; it != edges_.end() && it->first == i; ++it) out.push_back(it->second);
  return out;
}

DirectedGraph DirectedGraph::with_outgoing_replaced(AgentId i, const std::vector<AgentId>& targets) const {
  check_agent(i);
  std::vector<std::pair<AgentId, AgentId>> edges;
  edges.reserve(edges_.size() + targets.size());
  for (const auto& e : edges_)
    if (e.first != i) edges.push_back(e);
  for (AgentId t : targets) edges.emplace_back(i, t);
  return DirectedGraph(n_, std::move(edges));
}

namespace {

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_int(const std::string& s, long long& out) {
  try {
    size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

DirectedGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  long long n = -1;
  std::vector<std::pair<AgentId, AgentId>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;
    const auto tok = tokens(line);
    if (n < 0) {
      if (tok.size() != 2 || tok[0] != "n" || !parse_int(tok[1], n))
        throw ParseError(line_no, "expected header 'n <int>'");
      if (n < 1) throw ValidationError("agent count must be positive, got " + std::to_string(n));
      continue;
    }
    if (tok[0] != "edge" || tok.size() != 3)
      throw ParseError(line_no, "expected 'edge <u> <v>'");
    long long u, v;
    if (!parse_int(tok[1], u) || !parse_int(tok[2], v))
      throw ParseError(line_no, "expected 'edge <u> <v>'");
    if (u < 1 || u > n || v < 1 || v > n)
      throw ValidationError("line " + std::to_string(line_no) + ": edge endpoint out of range");
    if (u == v) throw ValidationError("line " + std::to_string(line_no) + ": self-loop");
    edges.emplace_back(static_cast<AgentId>(u), static_cast<AgentId>(v));
  }
  if (n < 0) throw ParseError(line_no, "missing 'n <int>' header");
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("duplicate edge");
  return DirectedGraph(static_cast<int>(n), std::move(edges));
}

std::string serialize_graph(const DirectedGraph& g) {
  std::string out = "n " + std::to_string(g.n()) + "\n";
  for (const auto& [u, v] : g.edges())
    out += "edge " + std::to_string(u) + " " + std::to_string(v) + "\n";
  return out;
}

DirectedGraph gen_star(const std::vector<int>& bits) {
  if (bits.empty()) throw ValidationError("gen_star: bit vector must be non-empty");
  const int n = static_cast<int>(bits.size()) + 1;
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (int i = 1; i < n; ++i) {
    if (bits[i - 1] != 0 && bits[i - 1] != 1) throw ValidationError("gen_star: bits must be 0/1");
    if (bits[i - 1] == 1) edges.emplace_back(i, n);
  }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph gen_cycle(int k, int n) {
  if (k < 1 || k > n - 1) throw ValidationError("gen_cycle: need 1 <= k <= n-1");
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (int i = 1; i <= k; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(k + 1, 1);
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph gen_single_edge(int n) {
  if (n < 2) throw ValidationError("gen_single_edge: need n >= 2");
  return DirectedGraph(n, {{1, n}});
}

DirectedGraph gen_sliding_counterexample(int t, int d) {
  if (t < 1 || d < 1) throw ValidationError("gen_sliding_counterexample: need t >= 1 and d >= 1");
  const int n = 1 + t + t * d;
  std::vector<std::pair<AgentId, AgentId>> edges;
  edges.reserve(t + t * d);
  for (int j = 1; j <= t; ++j) {
    const AgentId spoke = 1 + j;
    edges.emplace_back(spoke, 1);
    for (int l = 0; l < d; ++l) {
      const AgentId leaf = 1 + t + (j - 1) * d + l + 1;
      edges.emplace_back(leaf, spoke);
    }
  }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph gen_random(int n, double p, std::uint64_t seed) {
  if (n < 1) throw ValidationError("gen_random: need n >= 1");
  if (p < 0.0 || p > 1.0) throw ValidationError("gen_random: p must be in [0, 1]");
  Rng rng(derive_seed(seed, 0));
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      if (rng.unit_double() < p) edges.emplace_back(i, j);
    }
  return DirectedGraph(n, std::move(edges));
}

DirectedGraph gen_named(const std::string& name) {
  if (name == "figure2")
    return DirectedGraph(6, {{1, 2}, {3, 1}, {4, 1}, {4, 2}, {4, 3}, {4, 5}, {4, 6}, {6, 2}, {6, 5}});
  if (name == "figure4")
    return DirectedGraph(6, {{4, 5}, {2, 4}, {3, 1}, {3, 6}, {4, 3}});
  throw ValidationError("unknown named instance '" + name + "'");
}

}  // namespace kselect
