#include "kselect/mechanisms.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace kselect {

MechanismSpec parse_mechanism(const std::string& text, int k) {
  MechanismSpec spec;
  spec.k = k;
  if (text == "optimal") {
    spec.kind = MechanismKind::Optimal;
  } else if (text == "random-subset") {
    spec.kind = MechanismKind::RandomSubset;
  } else if (text == "edge-scan") {
    spec.kind = MechanismKind::EdgeScan;
  } else if (text == "sliding-partition") {
    spec.kind = MechanismKind::SlidingPartition;
  } else if (text.rfind("mrp:m=", 0) == 0) {
    spec.kind = MechanismKind::Mrp;
    try {
      size_t pos = 0;
      const std::string arg = text.substr(6);
      spec.m = std::stoi(arg, &pos);
      if (pos != arg.size() || spec.m < 1) throw std::invalid_argument("");
    } catch (...) {
      throw ValidationError("bad mechanism string '" + text + "': m must be a positive integer");
    }
  } else {
    throw ValidationError("unknown mechanism '" + text +
                          "' (expected optimal, random-subset, mrp:m=<int>, edge-scan, sliding-partition)");
  }
  return spec;
}

std::string mechanism_string(const MechanismSpec& spec) {
  switch (spec.kind) {
    case MechanismKind::Optimal: return "optimal";
    case MechanismKind::RandomSubset: return "random-subset";
    case MechanismKind::Mrp: return "mrp:m=" + std::to_string(spec.m);
    case MechanismKind::EdgeScan: return "edge-scan";
    case MechanismKind::SlidingPartition: return "sliding-partition";
  }
  return "?";
}

void validate_mechanism(const MechanismSpec& spec, int n) {
  switch (spec.kind) {
    case MechanismKind::EdgeScan:
      if (n < 2) throw ValidationError("edge-scan needs n >= 2");
      return;
    case MechanismKind::SlidingPartition:
      if (spec.k != 1) throw ValidationError("sliding-partition requires k = 1");
      return;
    case MechanismKind::Mrp:
      if (spec.m < 1) throw ValidationError("mrp requires m >= 1");
      [[fallthrough]];
    case MechanismKind::Optimal:
    case MechanismKind::RandomSubset:
      if (spec.k < 1 || spec.k > n)
        throw ValidationError("k=" + std::to_string(spec.k) + " out of range 1.." + std::to_string(n));
      return;
  }
}

Selection optimal_select(const DirectedGraph& g, int k) {
  const int n = g.n();
  if (k < 1 || k > n) throw ValidationError("optimal_select: k out of range");
  std::vector<int> outdeg(n + 1, 0);
  for (const auto& e : g.edges()) ++outdeg[e.first];
  std::vector<AgentId> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    if (g.indegree(a) != g.indegree(b)) return g.indegree(a) > g.indegree(b);
    if (outdeg[a] != outdeg[b]) return outdeg[a] < outdeg[b];
    return a < b;
  });
  Selection sel(order.begin(), order.begin() + k);
  std::sort(sel.begin(), sel.end());
  return sel;
}

Selection random_subset_draw(const DirectedGraph& g, int k, Rng& rng) {
  const int n = g.n();
  if (k < 1 || k > n) throw ValidationError("random_subset: k out of range");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 1);
  Selection sel = rng.sample_int(std::move(pool), k);
  std::sort(sel.begin(), sel.end());
  return sel;
}

Selection random_subset(const DirectedGraph& g, int k, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return random_subset_draw(g, k, rng);
}

namespace {

// Subset of `pool` (ascending) with the given lexicographic rank among all
// r-subsets.
std::vector<AgentId> unrank_combination(const std::vector<AgentId>& pool, int r, BigInt rank) {
  const int n = static_cast<int>(pool.size());
  std::vector<AgentId> out;
  out.reserve(r);
  int need = r;
  for (int pos = 0; pos < n && need > 0; ++pos) {
    const BigInt with_this = binomial_big(n - pos - 1, need - 1);
    if (rank < with_this) {
      out.push_back(pool[pos]);
      --need;
    } else {
      rank -= with_this;
    }
  }
  if (need != 0) throw ValidationError("combination rank out of range");
  return out;
}

int quota_for(int k, int m, bool in_big_set) {
  return in_big_set ? (k + m - 1) / m : k / m;
}

// Steps 1-3 of the partition mechanism for a fixed assignment and T; returns
// the (possibly short) selection, sorted.
Selection mrp_step3(const DirectedGraph& g, int k, int m, const std::vector<int>& assignment,
                    const std::vector<int>& big_set) {
  const int n = g.n();
  std::vector<int> crossdeg(n + 1, 0);
  for (const auto& [u, v] : g.edges())
    if (assignment[u - 1] != assignment[v - 1]) ++crossdeg[v];

  std::vector<std::vector<AgentId>> groups(m);
  for (int i = 1; i <= n; ++i) groups[assignment[i - 1]].push_back(i);

  std::vector<bool> is_big(m, false);
  for (int t : big_set) is_big[t] = true;

  Selection selected;
  for (int t = 0; t < m; ++t) {
    auto& members = groups[t];  // ascending; stable sort keeps index order among ties
    std::stable_sort(members.begin(), members.end(),
                     [&](AgentId a, AgentId b) { return crossdeg[a] > crossdeg[b]; });
    const int quota = quota_for(k, m, is_big[t]);
    const int take = std::min<int>(quota, static_cast<int>(members.size()));
    selected.insert(selected.end(), members.begin(), members.begin() + take);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

void check_mrp_randomness(const DirectedGraph& g, int k, int m, const MrpRandomness& r) {
  const int n = g.n();
  if (static_cast<int>(r.assignment.size()) != n)
    throw ValidationError("mrp randomness: assignment must have one entry per agent");
  for (int a : r.assignment)
    if (a < 0 || a >= m) throw ValidationError("mrp randomness: assignment entry out of range");
  const int tsize = k - m * (k / m);
  if (static_cast<int>(r.big_set_indices.size()) != tsize)
    throw ValidationError("mrp randomness: T must have size k - m*floor(k/m)");
  for (size_t i = 0; i < r.big_set_indices.size(); ++i) {
    const int t = r.big_set_indices[i];
    if (t < 0 || t >= m) throw ValidationError("mrp randomness: T entry out of range");
    if (i > 0 && r.big_set_indices[i - 1] >= t)
      throw ValidationError("mrp randomness: T must be strictly increasing");
  }
}

}  // namespace

Selection m_rp_core(const DirectedGraph& g, int k, int m, const MrpRandomness& r) {
  const int n = g.n();
  if (k < 1 || k > n) throw ValidationError("m_rp: k out of range");
  if (m < 1) throw ValidationError("m_rp: m must be >= 1");
  check_mrp_randomness(g, k, m, r);

  Selection selected = mrp_step3(g, k, m, r.assignment, r.big_set_indices);
  const int shortfall = k - static_cast<int>(selected.size());
  if (shortfall == 0) return selected;

  std::vector<bool> in_sel(n + 1, false);
  for (AgentId a : selected) in_sel[a] = true;
  std::vector<AgentId> unselected;
  for (int i = 1; i <= n; ++i)
    if (!in_sel[i]) unselected.push_back(i);

  if (r.fill_choice < 0 || r.fill_choice >= binomial_big(static_cast<int>(unselected.size()), shortfall))
    throw ValidationError("mrp randomness: fill_choice out of range");
  const auto fill = unrank_combination(unselected, shortfall, r.fill_choice);
  selected.insert(selected.end(), fill.begin(), fill.end());
  std::sort(selected.begin(), selected.end());
  return selected;
}

MrpRandomness draw_mrp_randomness(const DirectedGraph& g, int k, int m, Rng& rng) {
  const int n = g.n();
  if (k < 1 || k > n) throw ValidationError("m_rp: k out of range");
  if (m < 1) throw ValidationError("m_rp: m must be >= 1");
  MrpRandomness r;
  r.assignment.resize(n);
  for (int i = 0; i < n; ++i) r.assignment[i] = rng.below_int(m);
  const int tsize = k - m * (k / m);
  if (tsize > 0) {
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 0);
    r.big_set_indices = rng.sample_int(std::move(pool), tsize);
    std::sort(r.big_set_indices.begin(), r.big_set_indices.end());
  }
  const Selection partial = mrp_step3(g, k, m, r.assignment, r.big_set_indices);
  const int shortfall = k - static_cast<int>(partial.size());
  if (shortfall > 0)
    r.fill_choice = rng.below_big(binomial_big(n - static_cast<int>(partial.size()), shortfall));
  return r;
}

Selection m_rp(const DirectedGraph& g, int k, int m, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  const MrpRandomness r = draw_mrp_randomness(g, k, m, rng);
  return m_rp_core(g, k, m, r);
}

Selection edge_scan(const DirectedGraph& g) {
  if (g.n() < 2) throw ValidationError("edge_scan: need n >= 2");
  const auto& edges = g.edges();
  AgentId forward_pick = g.n();
  for (const auto& [u, v] : edges)
    if (u < v) {
      forward_pick = v;  // edges ascending by (u, v): first hit has min u, then min v
      break;
    }
  AgentId backward_pick = 1;
  for (auto it = edges.rbegin(); it != edges.rend(); ++it)
    if (it->first > it->second) {
      backward_pick = it->second;  // reversed scan: max u, then max v
      break;
    }
  if (forward_pick == backward_pick) return {forward_pick};
  Selection sel{forward_pick, backward_pick};
  std::sort(sel.begin(), sel.end());
  return sel;
}

Selection sliding_partition_draw(const DirectedGraph& g, Rng& rng) {
  const int n = g.n();
  std::vector<bool> eliminated(n + 1, false);
  std::vector<int> indeg_from_s(n + 1, 0);
  std::vector<AgentId> ties;
  for (int round = 0; round < n - 1; ++round) {
    int best = -1;
    ties.clear();
    for (int i = 1; i <= n; ++i) {
      if (eliminated[i]) continue;
      if (best < 0 || indeg_from_s[i] < best) {
        best = indeg_from_s[i];
        ties.clear();
        ties.push_back(i);
      } else if (indeg_from_s[i] == best) {
        ties.push_back(i);
      }
    }
    const AgentId out = ties[rng.below(ties.size())];
    eliminated[out] = true;
    for (AgentId v : g.out_neighbors(out))
      if (!eliminated[v]) ++indeg_from_s[v];
  }
  for (int i = 1; i <= n; ++i)
    if (!eliminated[i]) return {i};
  return {};  // unreachable
}

Selection sliding_partition(const DirectedGraph& g, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return sliding_partition_draw(g, rng);
}

Selection sample_mechanism(const MechanismSpec& spec, const DirectedGraph& g, Rng& rng) {
  validate_mechanism(spec, g.n());
  switch (spec.kind) {
    case MechanismKind::Optimal: return optimal_select(g, spec.k);
    case MechanismKind::RandomSubset: return random_subset_draw(g, spec.k, rng);
    case MechanismKind::Mrp: {
      const MrpRandomness r = draw_mrp_randomness(g, spec.k, spec.m, rng);
      return m_rp_core(g, spec.k, spec.m, r);
    }
    case MechanismKind::EdgeScan: return edge_scan(g);
    case MechanismKind::SlidingPartition: return sliding_partition_draw(g, rng);
  }
  throw ValidationError("unknown mechanism kind");
}

}  // namespace kselect
