// kselect: generate approval-graph instances, run k-selection mechanisms,
// compute exact distributions and approximation ratios, and audit
// strategyproofness properties.
//
// Exit codes: 0 success, 1 usage or input error, 2 enumeration guard
// exceeded, 3 audit violation / unmet bound found.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kselect/audit.hpp"
#include "kselect/report_io.hpp"

namespace {

using namespace kselect;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGuard = 2;
constexpr int kExitViolation = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file '" + out_path + "'");
  out << content;
}

// Scope files hold one or more edge-list graphs separated by lines that
// contain only "---".
std::vector<DirectedGraph> parse_scope_file(const std::string& text) {
  std::vector<DirectedGraph> graphs;
  std::istringstream in(text);
  std::string line, chunk;
  const auto flush = [&] {
    if (chunk.find_first_not_of(" \t\r\n") == std::string::npos) return;
    graphs.push_back(parse_graph(chunk));
    chunk.clear();
  };
  while (std::getline(in, line)) {
    if (line == "---") {
      flush();
    } else {
      chunk += line;
      chunk += "\n";
    }
  }
  flush();
  if (graphs.empty()) throw ValidationError("scope file contains no graphs");
  return graphs;
}

ReportFormat parse_format(const std::string& format) {
  if (format == "json") return ReportFormat::Json;
  if (format == "csv") return ReportFormat::Csv;
  throw ValidationError("unknown format '" + format + "'");
}

// "mrp" plus --m N is equivalent to "mrp:m=N".
MechanismSpec parse_mechanism_with_m(const std::string& text, int k, int m) {
  if (text == "mrp") {
    if (m < 1) throw ValidationError("mechanism 'mrp' needs --m >= 1 (or use mrp:m=<int>)");
    return parse_mechanism("mrp:m=" + std::to_string(m), k);
  }
  return parse_mechanism(text, k);
}

struct GenOptions {
  std::string instance;
  std::string bits;
  int n = 0, k = 0, t = 0, d = 0;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenOptions& o) {
  DirectedGraph g;
  if (o.instance == "star") {
    std::vector<int> bits;
    for (char c : o.bits) {
      if (c != '0' && c != '1') throw ValidationError("--bits must be a 0/1 string");
      bits.push_back(c - '0');
    }
    g = gen_star(bits);
  } else if (o.instance == "cycle") {
    g = gen_cycle(o.k, o.n);
  } else if (o.instance == "single-edge") {
    g = gen_single_edge(o.n);
  } else if (o.instance == "sliding-tree") {
    g = gen_sliding_counterexample(o.t, o.d);
  } else if (o.instance == "random") {
    g = gen_random(o.n, o.p, o.seed);
  } else if (o.instance == "figure2" || o.instance == "figure4") {
    g = gen_named(o.instance);
  } else {
    throw ValidationError("unknown instance '" + o.instance + "'");
  }
  write_output(o.out, serialize_graph(g));
  return kExitOk;
}

struct RunOptions {
  std::string mechanism;
  int k = 1;
  int m = 0;
  std::string graph_path;
  std::string mode = "mc";
  std::uint64_t trials = 1;
  bool trials_given = false;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

int cmd_run(const RunOptions& o) {
  const DirectedGraph g = parse_graph(read_file(o.graph_path));
  const MechanismSpec spec = parse_mechanism_with_m(o.mechanism, o.k, o.m);
  const ReportFormat fmt = parse_format(o.format);
  if (o.mode == "exact") {
    if (o.trials_given) throw ValidationError("--mode exact forbids --trials");
    const SelectionDistribution dist = exact_distribution(spec, g);
    if (fmt == ReportFormat::Json) {
      write_output(o.out, to_json(dist));
    } else {
      std::string csv = "members,p\n";
      for (const auto& [members, p] : dist.outcomes) {
        std::string joined;
        for (size_t i = 0; i < members.size(); ++i)
          joined += (i ? " " : "") + std::to_string(members[i]);
        csv += joined + "," + fraction_string(p) + "\n";
      }
      write_output(o.out, csv);
    }
    return kExitOk;
  }
  if (o.mode != "mc") throw ValidationError("--mode must be exact or mc");
  if (o.trials < 1) throw ValidationError("--mode mc requires --trials >= 1");
  std::vector<Selection> samples;
  samples.reserve(o.trials);
  std::map<Selection, std::uint64_t> freq;
  for (std::uint64_t t = 0; t < o.trials; ++t) {
    Rng rng(derive_seed(o.seed, t));
    samples.push_back(sample_mechanism(spec, g, rng));
    ++freq[samples.back()];
  }
  if (fmt == ReportFormat::Json) {
    Json j;
    j["mechanism"] = mechanism_string(spec);
    j["k"] = spec.k;
    j["trials"] = o.trials;
    j["seed"] = o.seed;
    j["samples"] = samples;
    Json freqs = Json::array();
    for (const auto& [sel, count] : freq) {
      Json f;
      f["members"] = sel;
      f["count"] = count;
      f["freq"] = static_cast<double>(count) / static_cast<double>(o.trials);
      freqs.push_back(std::move(f));
    }
    j["frequencies"] = std::move(freqs);
    write_output(o.out, j.dump(2) + "\n");
  } else {
    std::string csv = "trial,members\n";
    for (std::uint64_t t = 0; t < o.trials; ++t) {
      std::string joined;
      for (size_t i = 0; i < samples[t].size(); ++i)
        joined += (i ? " " : "") + std::to_string(samples[t][i]);
      csv += std::to_string(t) + "," + joined + "\n";
    }
    csv += "\nmembers,count,freq\n";
    for (const auto& [sel, count] : freq) {
      std::string joined;
      for (size_t i = 0; i < sel.size(); ++i) joined += (i ? " " : "") + std::to_string(sel[i]);
      csv += joined + "," + std::to_string(count) + "," +
             decimal_string(static_cast<double>(count) / static_cast<double>(o.trials)) + "\n";
    }
    write_output(o.out, csv);
  }
  return kExitOk;
}

struct RatioOptions {
  std::string mechanism;
  int k = 1;
  int m = 0;
  std::string graph_path;
  std::string mode = "exact";
  std::uint64_t trials = 0;
  bool trials_given = false;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

int cmd_ratio(const RatioOptions& o) {
  const DirectedGraph g = parse_graph(read_file(o.graph_path));
  const MechanismSpec spec = parse_mechanism_with_m(o.mechanism, o.k, o.m);
  RatioEstimate est;
  if (o.mode == "exact") {
    if (o.trials_given) throw ValidationError("--mode exact forbids --trials");
    est = approx_ratio_exact(spec, g);
  } else if (o.mode == "mc") {
    if (o.trials < 1) throw ValidationError("--mode mc requires --trials >= 1");
    est = approx_ratio_mc(spec, g, o.trials, o.seed);
  } else {
    throw ValidationError("--mode must be exact or mc");
  }
  write_output(o.out, ratio_report(spec, o.graph_path, est, parse_format(o.format)));
  return kExitOk;
}

struct AuditOptionsCli {
  std::string mechanism;
  int k = 1;
  int m = 0;
  int n = 0;
  int coalition = 2;
  std::string scope = "all";
  std::uint64_t samples = 100;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

GraphScope resolve_scope(const AuditOptionsCli& o) {
  if (o.scope == "all") return GraphScope::all();
  if (o.scope == "sample") return GraphScope::sampled(o.samples, o.seed, o.p);
  return GraphScope::of(parse_scope_file(read_file(o.scope)));
}

int cmd_audit(const AuditOptionsCli& o, bool gsp) {
  const MechanismSpec spec = parse_mechanism_with_m(o.mechanism, o.k, o.m);
  const GraphScope scope = resolve_scope(o);
  const AuditReport report = gsp ? check_gsp(spec, o.n, o.coalition, scope)
                                 : check_sp(spec, o.n, scope);
  write_output(o.out, audit_report(spec, o.n, gsp ? "gsp" : "sp", report, parse_format(o.format)));
  return report.verdict == Verdict::Violated ? kExitViolation : kExitOk;
}

struct ImpossibilityOptionsCli {
  int n = 0;
  int k = 0;
  std::string format = "json";
  std::string out;
};

int cmd_impossibility(const ImpossibilityOptionsCli& o) {
  const ImpossibilityResult result = impossibility_search(o.n, o.k);
  write_output(o.out, impossibility_report(result, parse_format(o.format)));
  return result.feasible_count == 0 ? kExitOk : kExitViolation;
}

struct WitnessOptionsCli {
  std::string kind;
  std::string mechanism;
  int k = 1;
  int m = 0;
  int n = 0;
  std::string format = "json";
  std::string out;
};

int cmd_witness(const WitnessOptionsCli& o) {
  const MechanismSpec spec = parse_mechanism_with_m(o.mechanism, o.k, o.m);
  const ReportFormat fmt = parse_format(o.format);
  if (o.kind == "cycle") {
    const CycleWitness w = cycle_lower_bound_witness(spec, o.n);
    write_output(o.out, witness_report(w, fmt));
    return w.bound_met ? kExitOk : kExitViolation;
  }
  if (o.kind == "gsp") {
    const GspWitness w = gsp_lower_bound_witness(spec, o.n);
    write_output(o.out, witness_report(w, fmt));
    return w.bound_met ? kExitOk : kExitViolation;
  }
  throw ValidationError("--kind must be cycle or gsp");
}

struct SweepOptionsCli {
  std::string instance = "random";
  std::string graph_path;
  int n = 0;
  double p = 0.1;
  std::string ks;
  int kmax = 0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

int cmd_sweep(const SweepOptionsCli& o) {
  DirectedGraph g;
  std::string label;
  if (!o.graph_path.empty()) {
    g = parse_graph(read_file(o.graph_path));
    label = o.graph_path;
  } else if (o.instance == "random") {
    g = gen_random(o.n, o.p, o.seed);
    label = "random(n=" + std::to_string(o.n) + ",p=" + decimal_string(o.p) +
            ",seed=" + std::to_string(o.seed) + ")";
  } else {
    throw ValidationError("sweep needs --graph or --instance random with --n/--p");
  }
  std::vector<int> ks;
  if (!o.ks.empty()) {
    std::istringstream in(o.ks);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        ks.push_back(std::stoi(tok));
      } catch (...) {
        throw ValidationError("--ks must be a comma-separated list of integers");
      }
    }
  } else if (o.kmax >= 1) {
    for (int k = 1; k <= o.kmax; k *= 2) ks.push_back(k);
  } else {
    throw ValidationError("sweep needs --ks or --kmax");
  }
  if (o.trials < 1) throw ValidationError("sweep requires --trials >= 1");

  std::vector<SweepRow> rows;
  for (int k : ks) {
    SweepRow row;
    row.k = k;
    row.m = ceil_cube_root(k);
    row.instance = label;
    const MechanismSpec spec{MechanismKind::Mrp, k, row.m};
    row.estimate = approx_ratio_mc(spec, g, o.trials, derive_seed(o.seed, k));
    rows.push_back(std::move(row));
  }
  write_output(o.out, sweep_report(rows, parse_format(o.format)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategyproof k-selection on directed approval graphs"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance in edge-list format");
  gen_cmd->add_option("--instance", gen.instance,
                      "star|cycle|single-edge|sliding-tree|random|figure2|figure4")
      ->required();
  gen_cmd->add_option("--bits", gen.bits, "0/1 string for star instances");
  gen_cmd->add_option("--n", gen.n, "agent count");
  gen_cmd->add_option("--k", gen.k, "cycle length parameter");
  gen_cmd->add_option("--t", gen.t, "spoke count for sliding-tree");
  gen_cmd->add_option("--d", gen.d, "leaves per spoke for sliding-tree");
  gen_cmd->add_option("--p", gen.p, "edge probability for random instances");
  gen_cmd->add_option("--seed", gen.seed, "master seed (default 0)");
  gen_cmd->add_option("--out", gen.out, "output path (default stdout)");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run a mechanism on a graph");
  run_cmd->add_option("--mechanism", run.mechanism, "mechanism string")->required();
  run_cmd->add_option("--k", run.k, "selection size (default 1)");
  run_cmd->add_option("--m", run.m, "partition count when --mechanism is mrp");
  run_cmd->add_option("--graph", run.graph_path, "edge-list file")->required();
  run_cmd->add_option("--mode", run.mode, "exact|mc (default mc)");
  run_cmd->add_option("--trials", run.trials, "sample count for mc mode")
      ->each([&](const std::string&) { run.trials_given = true; });
  run_cmd->add_option("--seed", run.seed, "master seed (default 0)");
  run_cmd->add_option("--format", run.format, "json|csv (default json)");
  run_cmd->add_option("--out", run.out, "output path (default stdout)");

  RatioOptions ratio;
  auto* ratio_cmd = app.add_subcommand("ratio", "approximation ratio on a graph");
  ratio_cmd->add_option("--mechanism", ratio.mechanism, "mechanism string")->required();
  ratio_cmd->add_option("--k", ratio.k, "selection size (default 1)");
  ratio_cmd->add_option("--m", ratio.m, "partition count when --mechanism is mrp");
  ratio_cmd->add_option("--graph", ratio.graph_path, "edge-list file")->required();
  ratio_cmd->add_option("--mode", ratio.mode, "exact|mc (default exact)");
  ratio_cmd->add_option("--trials", ratio.trials, "sample count for mc mode")
      ->each([&](const std::string&) { ratio.trials_given = true; });
  ratio_cmd->add_option("--seed", ratio.seed, "master seed (default 0)");
  ratio_cmd->add_option("--format", ratio.format, "json|csv (default json)");
  ratio_cmd->add_option("--out", ratio.out, "output path (default stdout)");

  AuditOptionsCli sp;
  auto* sp_cmd = app.add_subcommand("audit-sp", "exhaustive strategyproofness audit");
  sp_cmd->add_option("--mechanism", sp.mechanism, "mechanism string")->required();
  sp_cmd->add_option("--k", sp.k, "selection size (default 1)");
  sp_cmd->add_option("--m", sp.m, "partition count when --mechanism is mrp");
  sp_cmd->add_option("--n", sp.n, "agent count")->required();
  sp_cmd->add_option("--scope", sp.scope, "all|sample|<file> (default all)");
  sp_cmd->add_option("--samples", sp.samples, "sampled-scope size (default 100)");
  sp_cmd->add_option("--p", sp.p, "edge probability for sampled scopes");
  sp_cmd->add_option("--seed", sp.seed, "master seed (default 0)");
  sp_cmd->add_option("--format", sp.format, "json|csv (default json)");
  sp_cmd->add_option("--out", sp.out, "output path (default stdout)");

  AuditOptionsCli gsp;
  auto* gsp_cmd = app.add_subcommand("audit-gsp", "exhaustive group-strategyproofness audit");
  gsp_cmd->add_option("--mechanism", gsp.mechanism, "mechanism string")->required();
  gsp_cmd->add_option("--k", gsp.k, "selection size (default 1)");
  gsp_cmd->add_option("--m", gsp.m, "partition count when --mechanism is mrp");
  gsp_cmd->add_option("--n", gsp.n, "agent count")->required();
  gsp_cmd->add_option("--coalition", gsp.coalition, "max coalition size (default 2)");
  gsp_cmd->add_option("--scope", gsp.scope, "all|sample|<file> (default all)");
  gsp_cmd->add_option("--samples", gsp.samples, "sampled-scope size (default 100)");
  gsp_cmd->add_option("--p", gsp.p, "edge probability for sampled scopes");
  gsp_cmd->add_option("--seed", gsp.seed, "master seed (default 0)");
  gsp_cmd->add_option("--format", gsp.format, "json|csv (default json)");
  gsp_cmd->add_option("--out", gsp.out, "output path (default stdout)");

  ImpossibilityOptionsCli imp;
  auto* imp_cmd = app.add_subcommand("impossibility",
                                     "exhaustive search for deterministic SP selection tables");
  imp_cmd->add_option("--n", imp.n, "agent count")->required();
  imp_cmd->add_option("--k", imp.k, "selection size")->required();
  imp_cmd->add_option("--format", imp.format, "json|csv (default json)");
  imp_cmd->add_option("--out", imp.out, "output path (default stdout)");

  WitnessOptionsCli wit;
  auto* wit_cmd = app.add_subcommand("witness", "constructive lower-bound witness");
  wit_cmd->add_option("--kind", wit.kind, "cycle|gsp")->required();
  wit_cmd->add_option("--mechanism", wit.mechanism, "mechanism string")->required();
  wit_cmd->add_option("--k", wit.k, "selection size (default 1)");
  wit_cmd->add_option("--m", wit.m, "partition count when --mechanism is mrp");
  wit_cmd->add_option("--n", wit.n, "agent count")->required();
  wit_cmd->add_option("--format", wit.format, "json|csv (default json)");
  wit_cmd->add_option("--out", wit.out, "output path (default stdout)");

  SweepOptionsCli sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "ratio sweep over k with m = ceil(k^(1/3))");
  sweep_cmd->add_option("--instance", sweep.instance, "random (default)");
  sweep_cmd->add_option("--graph", sweep.graph_path, "edge-list file (overrides --instance)");
  sweep_cmd->add_option("--n", sweep.n, "agent count for random instances");
  sweep_cmd->add_option("--p", sweep.p, "edge probability (default 0.1)");
  sweep_cmd->add_option("--ks", sweep.ks, "comma-separated k values");
  sweep_cmd->add_option("--kmax", sweep.kmax, "doubling grid 1,2,4,... up to kmax");
  sweep_cmd->add_option("--trials", sweep.trials, "samples per k (default 10000)");
  sweep_cmd->add_option("--seed", sweep.seed, "master seed (default 0)");
  sweep_cmd->add_option("--format", sweep.format, "json|csv (default json)");
  sweep_cmd->add_option("--out", sweep.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*run_cmd) return cmd_run(run);
    if (*ratio_cmd) return cmd_ratio(ratio);
    if (*sp_cmd) return cmd_audit(sp, false);
    if (*gsp_cmd) return cmd_audit(gsp, true);
    if (*imp_cmd) return cmd_impossibility(imp);
    if (*wit_cmd) return cmd_witness(wit);
    if (*sweep_cmd) return cmd_sweep(sweep);
  } catch (const GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
