#include "kselect/audit.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace kselect {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

long long opt_value(const DirectedGraph& g, int k) {
  if (k < 1 || k > g.n()) throw ValidationError("opt_value: k out of range");
  std::vector<int> degs(g.n());
  for (int i = 1; i <= g.n(); ++i) degs[i - 1] = g.indegree(i);
  std::sort(degs.begin(), degs.end(), std::greater<>());
  long long total = 0;
  for (int i = 0; i < k; ++i) total += degs[i];
  return total;
}

RatioEstimate approx_ratio_exact(const MechanismSpec& spec, const DirectedGraph& g,
                                 const ExactOptions& opts) {
  RatioEstimate est;
  est.mode = RatioEstimate::Mode::Exact;
  est.opt = opt_value(g, spec.k);
  const SelectionDistribution dist = exact_distribution(spec, g, opts);
  est.expected = expected_total_indegree(g, dist);
  if (est.opt == 0) {
    est.ratio = 1;
  } else if (est.expected == 0) {
    est.infinite = true;
  } else {
    est.ratio = Rational(est.opt) / est.expected;
  }
  return est;
}

RatioEstimate approx_ratio_mc(const MechanismSpec& spec, const DirectedGraph& g,
                              std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("approx_ratio_mc: trials must be >= 1");
  validate_mechanism(spec, g.n());
  RatioEstimate est;
  est.mode = RatioEstimate::Mode::MonteCarlo;
  est.trials = trials;
  est.opt = opt_value(g, spec.k);

  long long sum = 0;
  long long sumsq = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const Selection s = sample_mechanism(spec, g, rng);
    long long v = 0;
    for (AgentId a : s) v += g.indegree(a);
    sum += v;
    sumsq += v * v;
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(trials);
  est.expected_value = mean;
  if (est.opt == 0) {
    est.ratio_value = 1.0;
    est.ci_low = est.ci_high = 1.0;
    return est;
  }
  if (sum == 0) {
    est.infinite = true;
    return est;
  }
  double var = 0.0;
  if (trials > 1) {
    var = (static_cast<double>(sumsq) - static_cast<double>(trials) * mean * mean) /
          static_cast<double>(trials - 1);
    var = std::max(var, 0.0);
  }
  const double z99 = 2.5758293035489004;
  const double se = std::sqrt(var / static_cast<double>(trials));
  const double lo = mean - z99 * se;
  const double hi = mean + z99 * se;
  est.ratio_value = static_cast<double>(est.opt) / mean;
  est.ci_low = static_cast<double>(est.opt) / hi;
  if (lo > 0) {
    est.ci_high = static_cast<double>(est.opt) / lo;
  } else {
    est.ci_high_infinite = true;
  }
  return est;
}

bool ratio_at_least(const RatioEstimate& est, const Rational& bound) {
  if (est.infinite) return true;
  if (est.mode == RatioEstimate::Mode::Exact) return est.ratio >= bound;
  return est.ratio_value >= bound.convert_to<double>();
}

GraphScope GraphScope::of(std::vector<DirectedGraph> graphs) {
  GraphScope scope;
  scope.kind = Kind::Explicit;
  scope.graphs = std::move(graphs);
  return scope;
}

GraphScope GraphScope::sampled(std::uint64_t count, std::uint64_t seed, double p) {
  GraphScope scope;
  scope.kind = Kind::Sampled;
  scope.sample_count = count;
  scope.sample_seed = seed;
  scope.sample_p = p;
  return scope;
}

namespace {

// Ordered non-diagonal pairs (u, v), ascending; bit b of a graph mask selects
// pair_list[b].
std::vector<std::pair<AgentId, AgentId>> ordered_pairs(int n) {
  std::vector<std::pair<AgentId, AgentId>> pairs;
  for (int u = 1; u <= n; ++u)
    for (int v = 1; v <= n; ++v)
      if (u != v) pairs.emplace_back(u, v);
  return pairs;
}

DirectedGraph graph_from_mask(int n, const std::vector<std::pair<AgentId, AgentId>>& pairs,
                              std::uint64_t mask) {
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (size_t b = 0; b < pairs.size(); ++b)
    if (mask >> b & 1) edges.push_back(pairs[b]);
  return DirectedGraph(n, std::move(edges));
}

// Applies fn to every scope graph in deterministic order until fn returns
// false.
void for_each_scope_graph(const GraphScope& scope, int n,
                          const std::function<bool(const DirectedGraph&)>& fn) {
  switch (scope.kind) {
    case GraphScope::Kind::AllGraphs: {
      if (n > 4)
        throw GuardError("exhaustive graph scope supports n <= 4 (2^" +
                         std::to_string(n * (n - 1)) + " graphs requested)");
      const auto pairs = ordered_pairs(n);
      const std::uint64_t total = std::uint64_t(1) << pairs.size();
      for (std::uint64_t mask = 0; mask < total; ++mask)
        if (!fn(graph_from_mask(n, pairs, mask))) return;
      return;
    }
    case GraphScope::Kind::Explicit: {
      for (const auto& g : scope.graphs) {
        if (g.n() != n)
          throw ValidationError("scope graph has n=" + std::to_string(g.n()) +
                                ", audit expects n=" + std::to_string(n));
        if (!fn(g)) return;
      }
      return;
    }
    case GraphScope::Kind::Sampled: {
      for (std::uint64_t i = 0; i < scope.sample_count; ++i)
        if (!fn(gen_random(n, scope.sample_p, derive_seed(scope.sample_seed, i)))) return;
      return;
    }
  }
}

class ProbEvaluator {
 public:
  ProbEvaluator(const MechanismSpec& spec, const AuditOptions& opts) : spec_(spec), opts_(opts) {}

  const std::vector<Rational>& operator()(const DirectedGraph& g) {
    std::string key = serialize_graph(g);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (evals_ >= opts_.max_engine_evals)
      throw GuardError("audit exceeds engine-evaluation guard of " +
                       std::to_string(opts_.max_engine_evals));
    ++evals_;
    auto probs = exact_selection_probabilities(spec_, g, opts_.exact);
    return cache_.emplace(std::move(key), std::move(probs)).first->second;
  }

 private:
  const MechanismSpec& spec_;
  const AuditOptions& opts_;
  std::unordered_map<std::string, std::vector<Rational>> cache_;
  std::uint64_t evals_ = 0;
};

std::vector<AgentId> targets_from_mask(int n, AgentId source, std::uint32_t mask) {
  std::vector<AgentId> targets;
  int b = 0;
  for (AgentId v = 1; v <= n; ++v) {
    if (v == source) continue;
    if (mask >> b & 1) targets.push_back(v);
    ++b;
  }
  return targets;
}

}  // namespace

AuditReport check_sp(const MechanismSpec& spec, int n, const GraphScope& scope,
                     const AuditOptions& opts) {
  validate_mechanism(spec, n);
  const auto start = Clock::now();
  AuditReport report;
  ProbEvaluator eval(spec, opts);
  const std::uint32_t report_count = std::uint32_t(1) << (n - 1);

  for_each_scope_graph(scope, n, [&](const DirectedGraph& g) {
    ++report.instances_checked;
    const std::vector<Rational> before = eval(g);
    for (AgentId i = 1; i <= n; ++i) {
      for (std::uint32_t rmask = 0; rmask < report_count; ++rmask) {
        const DirectedGraph deviated = g.with_outgoing_replaced(i, targets_from_mask(n, i, rmask));
        const std::vector<Rational>& after = eval(deviated);
        ++report.deviations_checked;
        if (after[i - 1] != before[i - 1]) {
          report.verdict = Verdict::Violated;
          report.counterexample = Counterexample{g, {i}, deviated, before, after};
          return false;
        }
      }
    }
    return true;
  });

  if (report.verdict != Verdict::Violated)
    report.verdict = scope.kind == GraphScope::Kind::Sampled ? Verdict::Inconclusive : Verdict::Holds;

  if (report.counterexample) {
    // Replay from scratch; a counterexample that does not reproduce is a bug.
    const auto& ce = *report.counterexample;
    const auto fresh_before = exact_selection_probabilities(spec, ce.graph, opts.exact);
    const auto fresh_after = exact_selection_probabilities(spec, ce.reported, opts.exact);
    const AgentId i = ce.coalition.front();
    if (fresh_after[i - 1] == fresh_before[i - 1])
      throw std::logic_error("check_sp: counterexample did not reproduce on replay");
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

AuditReport check_gsp(const MechanismSpec& spec, int n, int coalition_size,
                      const GraphScope& scope, const AuditOptions& opts) {
  validate_mechanism(spec, n);
  if (coalition_size < 1) throw ValidationError("check_gsp: coalition_size must be >= 1");
  if (coalition_size > 2)
    throw GuardError("exhaustive coalition enumeration supports coalition_size <= 2, got " +
                     std::to_string(coalition_size));
  const auto start = Clock::now();
  AuditReport report;
  ProbEvaluator eval(spec, opts);
  const std::uint32_t report_count = std::uint32_t(1) << (n - 1);

  // Coalitions of size 1..coalition_size, lexicographic.
  std::vector<std::vector<AgentId>> coalitions;
  for (AgentId i = 1; i <= n; ++i) coalitions.push_back({i});
  if (coalition_size >= 2)
    for (AgentId i = 1; i <= n; ++i)
      for (AgentId j = i + 1; j <= n; ++j) coalitions.push_back({i, j});

  for_each_scope_graph(scope, n, [&](const DirectedGraph& g) {
    ++report.instances_checked;
    const std::vector<Rational> before = eval(g);
    for (const auto& coalition : coalitions) {
      const size_t s = coalition.size();
      std::vector<std::uint32_t> rmask(s, 0);
      while (true) {
        DirectedGraph deviated = g;
        for (size_t c = 0; c < s; ++c)
          deviated =
              deviated.with_outgoing_replaced(coalition[c], targets_from_mask(n, coalition[c], rmask[c]));
        const std::vector<Rational>& after = eval(deviated);
        ++report.deviations_checked;
        bool all_gain = true;
        for (AgentId c : coalition)
          if (after[c - 1] <= before[c - 1]) {
            all_gain = false;
            break;
          }
        if (all_gain) {
          report.verdict = Verdict::Violated;
          report.counterexample = Counterexample{g, coalition, deviated, before, after};
          return false;
        }
        // Next joint report, last member fastest.
        size_t d = s;
        while (d > 0) {
          if (++rmask[d - 1] < report_count) break;
          rmask[d - 1] = 0;
          --d;
        }
        if (d == 0) break;
      }
    }
    return true;
  });

  if (report.verdict != Verdict::Violated)
    report.verdict = scope.kind == GraphScope::Kind::Sampled ? Verdict::Inconclusive : Verdict::Holds;

  if (report.counterexample) {
    const auto& ce = *report.counterexample;
    const auto fresh_before = exact_selection_probabilities(spec, ce.graph, opts.exact);
    const auto fresh_after = exact_selection_probabilities(spec, ce.reported, opts.exact);
    for (AgentId c : ce.coalition)
      if (fresh_after[c - 1] <= fresh_before[c - 1])
        throw std::logic_error("check_gsp: counterexample did not reproduce on replay");
  }
  report.runtime_seconds = seconds_since(start);
  return report;
}

ParityReport parity_audit(const StarTable& table, int n, int k) {
  if (n < 2) throw ValidationError("parity_audit: need n >= 2");
  const std::uint64_t cube = std::uint64_t(1) << (n - 1);
  if (table.size() != cube)
    throw ValidationError("parity_audit: incomplete table, expected 2^(n-1)=" +
                          std::to_string(cube) + " entries, got " + std::to_string(table.size()));
  ParityReport rep;
  rep.n = n;
  rep.k = k;
  rep.occurrence_count.assign(n, 0);
  for (const Selection& s : table) {
    for (AgentId a : s) {
      if (a < 1 || a > n) throw ValidationError("parity_audit: table value out of range");
      ++rep.occurrence_count[a - 1];
    }
    rep.total_membership += static_cast<int>(s.size());
  }
  rep.agent_count_even.resize(n);
  for (int i = 0; i < n; ++i) rep.agent_count_even[i] = rep.occurrence_count[i] % 2 == 0;

  const auto contains_hub = [&](const Selection& s) {
    return std::find(s.begin(), s.end(), n) != s.end();
  };
  rep.constraints12 = !contains_hub(table[0]);
  for (std::uint64_t x = 1; x < cube && rep.constraints12; ++x)
    if (!contains_hub(table[x])) rep.constraints12 = false;

  rep.hub_count_odd = rep.occurrence_count[n - 1] % 2 == 1;
  rep.total_even = rep.total_membership % 2 == 0;
  rep.contradiction_forced = rep.constraints12 && rep.hub_count_odd && rep.total_even;
  return rep;
}

namespace {

std::vector<std::uint32_t> subset_masks(int n, int k) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (std::uint32_t(1) << n); ++m)
    if (std::popcount(m) == k) masks.push_back(m);
  return masks;
}

Selection selection_from_mask(std::uint32_t mask, int n) {
  Selection s;
  for (int i = 1; i <= n; ++i)
    if (mask >> (i - 1) & 1) s.push_back(i);
  return s;
}

}  // namespace

ImpossibilityResult impossibility_search(int n, int k, const ImpossibilityOptions& opts) {
  if (n < 2 || n > 16) throw ValidationError("impossibility_search: need 2 <= n <= 16");
  if (k < 1 || k > n) throw ValidationError("impossibility_search: need 1 <= k <= n");
  const auto start = Clock::now();
  ImpossibilityResult result;
  result.n = n;
  result.k = k;
  const std::uint32_t cube = std::uint32_t(1) << (n - 1);
  const std::uint32_t hub_bit = std::uint32_t(1) << (n - 1);

  const auto subsets = subset_masks(n, k);
  result.table_space = boost::multiprecision::pow(BigInt(subsets.size()), cube);
  result.candidates12 =
      binomial_big(n - 1, k) * boost::multiprecision::pow(binomial_big(n - 1, k - 1), cube - 1);

  if (result.table_space <= opts.max_nodes) {
    // Literal enumeration of the whole table space.
    const std::uint32_t num_subsets = static_cast<std::uint32_t>(subsets.size());
    std::vector<std::uint32_t> f(cube, 0);
    while (true) {
      ++result.tables_checked;
      bool ok = !(subsets[f[0]] & hub_bit);  // constraint 1
      for (std::uint32_t x = 1; x < cube && ok; ++x)  // constraint 2
        if (!(subsets[f[x]] & hub_bit)) ok = false;
      if (ok) {
        // constraint 3: membership of agent i+1 invariant under flipping bit i
        for (int i = 0; i < n - 1 && ok; ++i)
          for (std::uint32_t x = 0; x < cube && ok; ++x)
            if (!(x >> i & 1) &&
                ((subsets[f[x]] >> i) & 1) != ((subsets[f[x | (std::uint32_t(1) << i)]] >> i) & 1))
              ok = false;
        if (ok) ++result.feasible_count;
      }
      std::uint32_t d = cube;
      while (d > 0) {
        if (++f[d - 1] < num_subsets) break;
        f[d - 1] = 0;
        --d;
      }
      if (d == 0) break;
    }
  } else {
    // Constraint-pruned depth-first search: assign cube points in index
    // order; every point's flipped-bit neighbors below it are already fixed,
    // so violations prune immediately. Counts exactly the same feasible set.
    result.exhaustive = false;
    std::vector<std::uint32_t> no_hub, with_hub;
    for (std::uint32_t s : subsets) (s & hub_bit ? with_hub : no_hub).push_back(s);
    std::vector<std::uint32_t> assigned(cube, 0);
    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t x) {
      if (x == cube) {
        ++result.feasible_count;
        return;
      }
      const auto& candidates = x == 0 ? no_hub : with_hub;
      for (std::uint32_t cand : candidates) {
        if (++result.tables_checked > opts.max_nodes)
          throw GuardError("impossibility search exceeds node guard of " +
                           std::to_string(opts.max_nodes));
        bool ok = true;
        for (int i = 0; i < n - 1 && ok; ++i)
          if (x >> i & 1) {
            const std::uint32_t below = x ^ (std::uint32_t(1) << i);
            if (((cand >> i) & 1) != ((assigned[below] >> i) & 1)) ok = false;
          }
        if (!ok) continue;
        assigned[x] = cand;
        dfs(x + 1);
      }
    };
    dfs(0);
  }

  // Parity accounting over constraint-1&2 candidates.
  std::vector<std::uint32_t> no_hub, with_hub;
  for (std::uint32_t s : subsets) (s & hub_bit ? with_hub : no_hub).push_back(s);
  const auto audit_candidate = [&](const std::vector<std::uint32_t>& choice) {
    ++result.parity_checked;
    std::vector<std::uint64_t> counts(n, 0);
    for (std::uint32_t x = 0; x < cube; ++x)
      for (int i = 0; i < n; ++i)
        if (choice[x] >> i & 1) ++counts[i];
    std::uint64_t total = 0;
    for (std::uint32_t x = 0; x < cube; ++x) total += std::popcount(choice[x]);
    const bool hub_odd = counts[n - 1] % 2 == 1;
    const bool total_even = total % 2 == 0;
    if (!(hub_odd && total_even)) result.parity_all_contradiction = false;
    if (static_cast<int>(result.parity_samples.size()) < opts.parity_samples_kept) {
      StarTable table(cube);
      for (std::uint32_t x = 0; x < cube; ++x) table[x] = selection_from_mask(choice[x], n);
      result.parity_samples.push_back(parity_audit(table, n, k));
    }
  };

  if (!no_hub.empty() && !with_hub.empty()) {
    if (result.candidates12 <= opts.parity_enumeration_limit) {
      std::vector<std::uint32_t> idx(cube, 0);
      std::vector<std::uint32_t> choice(cube);
      while (true) {
        choice[0] = no_hub[idx[0]];
        for (std::uint32_t x = 1; x < cube; ++x) choice[x] = with_hub[idx[x]];
        audit_candidate(choice);
        std::uint32_t d = cube;
        while (d > 0) {
          const std::uint32_t limit =
              d - 1 == 0 ? static_cast<std::uint32_t>(no_hub.size())
                         : static_cast<std::uint32_t>(with_hub.size());
          if (++idx[d - 1] < limit) break;
          idx[d - 1] = 0;
          --d;
        }
        if (d == 0) break;
      }
    } else {
      std::vector<std::uint32_t> choice(cube);
      for (std::uint64_t s = 0; s < opts.parity_sample_count; ++s) {
        Rng rng(derive_seed(opts.parity_sample_seed, s));
        choice[0] = no_hub[rng.below(no_hub.size())];
        for (std::uint32_t x = 1; x < cube; ++x) choice[x] = with_hub[rng.below(with_hub.size())];
        audit_candidate(choice);
      }
    }
  }

  result.runtime_seconds = seconds_since(start);
  return result;
}

CycleWitness cycle_lower_bound_witness(const MechanismSpec& spec, int n, const ExactOptions& opts) {
  validate_mechanism(spec, n);
  const int k = spec.k;
  if (k > n - 1) throw ValidationError("cycle witness needs k <= n-1");
  CycleWitness w;
  w.spec = spec;
  w.n = n;
  w.k = k;
  w.graph = gen_cycle(k, n);
  w.bound = Rational(1) + Rational(1, static_cast<long long>(k) * k + k - 1);

  const auto probs = exact_selection_probabilities(spec, w.graph, opts);
  const Rational threshold(k, k + 1);
  AgentId pick = 0;
  for (AgentId a = 1; a <= k + 1; ++a) {
    if (probs[a - 1] > threshold) continue;
    if (pick == 0 || probs[a - 1] < probs[pick - 1]) pick = a;
  }
  if (pick == 0) {
    // Impossible for a genuine distribution (the k+1 cycle probabilities sum
    // to at most k); reaching here means the SP premise machinery is broken.
    w.sp_premise_ok = false;
    return w;
  }
  w.cycle_agent = pick;
  w.prob_on_cycle = probs[pick - 1];
  w.graph_deviated = w.graph.with_outgoing_replaced(pick, {});
  w.ratio_graph = approx_ratio_exact(spec, w.graph, opts);
  w.ratio_deviated = approx_ratio_exact(spec, w.graph_deviated, opts);
  w.bound_met = ratio_at_least(w.ratio_graph, w.bound) || ratio_at_least(w.ratio_deviated, w.bound);
  return w;
}

GspWitness gsp_lower_bound_witness(const MechanismSpec& spec, int n, const ExactOptions& opts) {
  validate_mechanism(spec, n);
  if (n < 2) throw ValidationError("gsp witness needs n >= 2");
  GspWitness w;
  w.spec = spec;
  w.n = n;
  w.k = spec.k;
  w.bound = Rational(n - 1, spec.k);

  const DirectedGraph empty(n, {});
  const auto p0 = exact_selection_probabilities(spec, empty, opts);
  std::vector<AgentId> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    if (p0[a - 1] != p0[b - 1]) return p0[a - 1] < p0[b - 1];
    return a < b;
  });
  w.agent_i = order[0];
  w.agent_j = order[1];
  w.prob_i_empty = p0[w.agent_i - 1];
  w.prob_j_empty = p0[w.agent_j - 1];

  w.graph_mutual = DirectedGraph(n, {{w.agent_i, w.agent_j}, {w.agent_j, w.agent_i}});
  const auto p1 = exact_selection_probabilities(spec, w.graph_mutual, opts);
  w.prob_i_mutual = p1[w.agent_i - 1];
  w.prob_j_mutual = p1[w.agent_j - 1];

  const bool gained_i = w.prob_i_mutual > w.prob_i_empty;
  const bool gained_j = w.prob_j_mutual > w.prob_j_empty;
  if (gained_i && gained_j) {
    w.gsp_violated_at_mutual = true;
    return w;
  }
  AgentId keep;  // the agent whose probability did not improve
  if (gained_i) {
    keep = w.agent_j;
  } else if (gained_j) {
    keep = w.agent_i;
  } else {
    keep = p1[w.agent_i - 1] <= p1[w.agent_j - 1] ? w.agent_i : w.agent_j;
  }
  const AgentId other = keep == w.agent_i ? w.agent_j : w.agent_i;
  w.qualifying_agent = keep;
  w.graph_single = DirectedGraph(n, {{other, keep}});
  w.ratio_single = approx_ratio_exact(spec, w.graph_single, opts);
  w.bound_met = ratio_at_least(w.ratio_single, w.bound);
  return w;
}

}  // namespace kselect
