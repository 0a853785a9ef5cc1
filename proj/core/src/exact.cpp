#include "kselect/exact.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace kselect {

namespace {

// Visitor signature: void(const Selection&, const Rational& probability).

template <typename Visit>
void enumerate_random_subset(const DirectedGraph& g, int k, const ExactOptions& opts, Visit visit) {
  const int n = g.n();
  std::uint64_t total;
  if (!binomial_within(n, k, opts.max_paths, total))
    throw GuardError("too large for exact engine: random-subset on n=" + std::to_string(n) +
                     ", k=" + std::to_string(k) + " needs C(n,k) paths, guard is " +
                     std::to_string(opts.max_paths));
  const Rational p(1, BigInt(total));
  Selection comb(k);
  std::iota(comb.begin(), comb.end(), 1);
  while (true) {
    visit(comb, p);
    int i = k - 1;
    while (i >= 0 && comb[i] == n - (k - 1 - i)) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
}

template <typename Visit>
void enumerate_mrp(const DirectedGraph& g, int k, int m, const ExactOptions& opts, Visit visit) {
  const int n = g.n();
  const int tsize = k - m * (k / m);
  const std::uint64_t assignments = pow_capped(m, n, opts.max_paths);
  std::uint64_t t_choices;
  if (!binomial_within(m, tsize, opts.max_paths, t_choices) ||
      assignments > opts.max_paths / t_choices)
    throw GuardError("too large for exact engine: mrp with m=" + std::to_string(m) +
                     ", n=" + std::to_string(n) + " needs m^n * C(m,|T|) paths, guard is " +
                     std::to_string(opts.max_paths));

  std::uint64_t paths_used = 0;
  const auto charge_paths = [&](std::uint64_t count) {
    if (count > opts.max_paths - paths_used)
      throw GuardError("too large for exact engine: mrp fill enumeration exceeds guard of " +
                       std::to_string(opts.max_paths));
    paths_used += count;
  };

  const Rational base(1, BigInt(assignments) * t_choices);

  // All tsize-subsets of {0..m-1}.
  std::vector<std::vector<int>> t_sets;
  {
    std::vector<int> comb(tsize);
    std::iota(comb.begin(), comb.end(), 0);
    if (tsize == 0) {
      t_sets.push_back({});
    } else {
      while (true) {
        t_sets.push_back(comb);
        int i = tsize - 1;
        while (i >= 0 && comb[i] == m - (tsize - i)) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < tsize; ++j) comb[j] = comb[j - 1] + 1;
      }
    }
  }

  std::vector<int> assignment(n, 0);
  std::vector<int> group_size(m);
  MrpRandomness r;
  while (true) {
    std::fill(group_size.begin(), group_size.end(), 0);
    for (int a : assignment) ++group_size[a];
    r.assignment = assignment;
    for (const auto& t_set : t_sets) {
      r.big_set_indices = t_set;
      // Shortfall depends only on group sizes and quotas.
      std::vector<bool> is_big(m, false);
      for (int t : t_set) is_big[t] = true;
      int kprime = 0;
      for (int t = 0; t < m; ++t)
        kprime += std::min(is_big[t] ? (k + m - 1) / m : k / m, group_size[t]);
      const std::uint64_t fills =
          kprime < k ? static_cast<std::uint64_t>(binomial_big(n - kprime, k - kprime)) : 1;
      charge_paths(fills);
      const Rational p = fills == 1 ? base : base / BigInt(fills);
      for (std::uint64_t rank = 0; rank < fills; ++rank) {
        r.fill_choice = rank;
        visit(m_rp_core(g, k, m, r), p);
      }
    }
    int i = n - 1;
    while (i >= 0 && assignment[i] == m - 1) assignment[i--] = 0;
    if (i < 0) break;
    ++assignment[i];
  }
}

template <typename Visit>
void enumerate_sliding(const DirectedGraph& g, const ExactOptions& opts, Visit visit) {
  const int n = g.n();
  if (n == 1) {
    visit(Selection{1}, Rational(1));
    return;
  }
  if (n > 63 || pow_capped(2, n, opts.max_paths / std::max(n, 1)) > opts.max_paths / n)
    throw GuardError("too large for exact engine: sliding-partition on n=" + std::to_string(n) +
                     " needs 2^n * n states, guard is " + std::to_string(opts.max_paths));

  std::vector<std::uint64_t> in_mask(n + 1, 0);
  for (const auto& [u, v] : g.edges()) in_mask[v] |= std::uint64_t(1) << (u - 1);

  // States keyed by eliminated-set bitmask, expanded level by level; the
  // elimination step depends only on the eliminated set.
  std::unordered_map<std::uint64_t, Rational> cur, next;
  cur.emplace(0, Rational(1));
  std::vector<AgentId> ties;
  for (int level = 0; level < n - 1; ++level) {
    next.clear();
    for (const auto& [state, prob] : cur) {
      int best = -1;
      ties.clear();
      for (int i = 1; i <= n; ++i) {
        if (state >> (i - 1) & 1) continue;
        const int d = std::popcount(in_mask[i] & state);
        if (best < 0 || d < best) {
          best = d;
          ties.clear();
          ties.push_back(i);
        } else if (d == best) {
          ties.push_back(i);
        }
      }
      const Rational share = prob / static_cast<int>(ties.size());
      for (AgentId j : ties) next[state | (std::uint64_t(1) << (j - 1))] += share;
    }
    cur.swap(next);
  }
  const std::uint64_t full = (std::uint64_t(1) << n) - 1;
  for (const auto& [state, prob] : cur) {
    const std::uint64_t survivor_bit = full & ~state;
    const AgentId survivor = std::countr_zero(survivor_bit) + 1;
    visit(Selection{survivor}, prob);
  }
}

template <typename Visit>
void enumerate_outcomes(const MechanismSpec& spec, const DirectedGraph& g, const ExactOptions& opts,
                        Visit visit) {
  validate_mechanism(spec, g.n());
  switch (spec.kind) {
    case MechanismKind::Optimal:
      visit(optimal_select(g, spec.k), Rational(1));
      return;
    case MechanismKind::EdgeScan:
      visit(edge_scan(g), Rational(1));
      return;
    case MechanismKind::RandomSubset:
      enumerate_random_subset(g, spec.k, opts, visit);
      return;
    case MechanismKind::Mrp:
      enumerate_mrp(g, spec.k, spec.m, opts, visit);
      return;
    case MechanismKind::SlidingPartition:
      enumerate_sliding(g, opts, visit);
      return;
  }
}

}  // namespace

SelectionDistribution exact_distribution(const MechanismSpec& spec, const DirectedGraph& g,
                                         const ExactOptions& opts) {
  SelectionDistribution dist;
  dist.n = g.n();
  dist.k = spec.k;
  enumerate_outcomes(spec, g, opts,
                     [&](const Selection& s, const Rational& p) { dist.outcomes[s] += p; });
  if (!dist.outcomes.empty()) dist.k = static_cast<int>(dist.outcomes.begin()->first.size());
  Rational total = 0;
  for (const auto& [s, p] : dist.outcomes) {
    if (static_cast<int>(s.size()) != dist.k)
      throw std::logic_error("exact engine produced selections of mixed size");
    total += p;
  }
  if (total != 1) throw std::logic_error("exact engine probability mass is not 1");
  return dist;
}

std::vector<Rational> exact_selection_probabilities(const MechanismSpec& spec,
                                                    const DirectedGraph& g,
                                                    const ExactOptions& opts) {
  std::vector<Rational> probs(g.n(), Rational(0));
  enumerate_outcomes(spec, g, opts, [&](const Selection& s, const Rational& p) {
    for (AgentId a : s) probs[a - 1] += p;
  });
  return probs;
}

std::map<AgentId, Rational> selection_probabilities(const SelectionDistribution& dist) {
  std::map<AgentId, Rational> probs;
  for (AgentId i = 1; i <= dist.n; ++i) probs[i] = 0;
  for (const auto& [s, p] : dist.outcomes)
    for (AgentId a : s) probs[a] += p;
  return probs;
}

Rational expected_total_indegree(const DirectedGraph& g, const SelectionDistribution& dist) {
  Rational by_outcome = 0;
  for (const auto& [s, p] : dist.outcomes) {
    long long total = 0;
    for (AgentId a : s) total += g.indegree(a);
    by_outcome += p * total;
  }
  Rational by_agent = 0;
  for (const auto& [agent, p] : selection_probabilities(dist)) by_agent += p * g.indegree(agent);
  if (by_outcome != by_agent)
    throw std::logic_error("expected_total_indegree: outcome-sum and linearity forms disagree");
  return by_outcome;
}

}  // namespace kselect
