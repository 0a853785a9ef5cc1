#include "kselect/report_io.hpp"

#include <charconv>

#include "json.hpp"

namespace kselect {

namespace {

using Json = nlohmann::ordered_json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ",";
    out += csv_escape(cells[i]);
  }
  out += "\n";
  return out;
}

std::string verdict_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Json fractions_json(const std::vector<Rational>& probs) {
  Json arr = Json::array();
  for (const auto& p : probs) arr.push_back(fraction_string(p));
  return arr;
}

void ratio_fields(const RatioEstimate& est, Json& j) {
  j["mode"] = est.mode == RatioEstimate::Mode::Exact ? "exact" : "mc";
  j["opt"] = est.opt;
  j["infinite"] = est.infinite;
  if (est.mode == RatioEstimate::Mode::Exact) {
    j["expected"] = fraction_string(est.expected);
    if (!est.infinite) j["ratio"] = fraction_string(est.ratio);
  } else {
    j["trials"] = est.trials;
    j["expected"] = est.expected_value;
    if (!est.infinite) {
      j["ratio"] = est.ratio_value;
      j["ci_low"] = est.ci_low;
      j["ci_high_infinite"] = est.ci_high_infinite;
      if (!est.ci_high_infinite) j["ci_high"] = est.ci_high;
    }
  }
}

std::vector<std::string> ratio_cells(const RatioEstimate& est) {
  // mode,opt,infinite,expected,ratio,trials,ci_low,ci_high
  std::vector<std::string> cells(8);
  cells[0] = est.mode == RatioEstimate::Mode::Exact ? "exact" : "mc";
  cells[1] = std::to_string(est.opt);
  cells[2] = est.infinite ? "true" : "false";
  if (est.mode == RatioEstimate::Mode::Exact) {
    cells[3] = fraction_string(est.expected);
    cells[4] = est.infinite ? "" : fraction_string(est.ratio);
  } else {
    cells[3] = decimal_string(est.expected_value);
    cells[4] = est.infinite ? "" : decimal_string(est.ratio_value);
    cells[5] = std::to_string(est.trials);
    if (!est.infinite) {
      cells[6] = decimal_string(est.ci_low);
      cells[7] = est.ci_high_infinite ? "infinite" : decimal_string(est.ci_high);
    }
  }
  return cells;
}

Json counterexample_json(const Counterexample& ce) {
  Json j;
  j["coalition"] = ce.coalition;
  j["graph"] = serialize_graph(ce.graph);
  j["reported"] = serialize_graph(ce.reported);
  j["before"] = fractions_json(ce.before);
  j["after"] = fractions_json(ce.after);
  return j;
}

Json parity_json(const ParityReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["occurrence_count"] = rep.occurrence_count;
  j["total_membership"] = rep.total_membership.str();
  j["constraints12"] = rep.constraints12;
  j["hub_count_odd"] = rep.hub_count_odd;
  j["total_even"] = rep.total_even;
  j["contradiction_forced"] = rep.contradiction_forced;
  return j;
}

}  // namespace

std::string decimal_string(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_json(const SelectionDistribution& dist) {
  Json j;
  j["n"] = dist.n;
  j["k"] = dist.k;
  Json outcomes = Json::array();
  for (const auto& [members, p] : dist.outcomes) {
    Json o;
    o["members"] = members;
    o["p"] = fraction_string(p);
    outcomes.push_back(std::move(o));
  }
  j["outcomes"] = std::move(outcomes);
  Json agents = Json::array();
  for (const auto& [agent, p] : selection_probabilities(dist)) {
    Json a;
    a["agent"] = agent;
    a["p"] = fraction_string(p);
    agents.push_back(std::move(a));
  }
  j["agent_probabilities"] = std::move(agents);
  return j.dump(2) + "\n";
}

std::string ratio_report(const MechanismSpec& spec, const std::string& instance,
                         const RatioEstimate& est, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["mechanism"] = mechanism_string(spec);
    j["k"] = spec.k;
    j["instance"] = instance;
    ratio_fields(est, j);
    return j.dump(2) + "\n";
  }
  std::string out = csv_line({"mechanism", "k", "instance", "mode", "opt", "infinite", "expected",
                              "ratio", "trials", "ci_low", "ci_high"});
  const auto rc = ratio_cells(est);
  out += csv_line({mechanism_string(spec), std::to_string(spec.k), instance, rc[0], rc[1], rc[2],
                   rc[3], rc[4], rc[5], rc[6], rc[7]});
  return out;
}

std::string audit_report(const MechanismSpec& spec, int n, const std::string& property,
                         const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["property"] = property;
    j["mechanism"] = mechanism_string(spec);
    j["k"] = spec.k;
    j["n"] = n;
    j["verdict"] = verdict_string(report.verdict);
    j["instances_checked"] = report.instances_checked;
    j["deviations_checked"] = report.deviations_checked;
    if (report.counterexample) j["counterexample"] = counterexample_json(*report.counterexample);
    return j.dump(2) + "\n";
  }
  std::string out = csv_line({"property", "mechanism", "k", "n", "verdict", "instances_checked",
                              "deviations_checked", "coalition", "graph", "reported"});
  std::vector<std::string> cells{property,
                                 mechanism_string(spec),
                                 std::to_string(spec.k),
                                 std::to_string(n),
                                 verdict_string(report.verdict),
                                 std::to_string(report.instances_checked),
                                 std::to_string(report.deviations_checked),
                                 "",
                                 "",
                                 ""};
  if (report.counterexample) {
    const auto& ce = *report.counterexample;
    std::string coalition;
    for (size_t i = 0; i < ce.coalition.size(); ++i)
      coalition += (i ? " " : "") + std::to_string(ce.coalition[i]);
    cells[7] = coalition;
    cells[8] = serialize_graph(ce.graph);
    cells[9] = serialize_graph(ce.reported);
  }
  out += csv_line(cells);
  return out;
}

std::string impossibility_report(const ImpossibilityResult& result, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["n"] = result.n;
    j["k"] = result.k;
    j["table_space"] = result.table_space.str();
    j["mode"] = result.exhaustive ? "exhaustive" : "pruned";
    j["tables_checked"] = result.tables_checked;
    j["feasible_count"] = result.feasible_count;
    j["candidates12"] = result.candidates12.str();
    j["parity_checked"] = result.parity_checked;
    j["parity_all_contradiction"] = result.parity_all_contradiction;
    Json samples = Json::array();
    for (const auto& rep : result.parity_samples) samples.push_back(parity_json(rep));
    j["parity_samples"] = std::move(samples);
    return j.dump(2) + "\n";
  }
  std::string out =
      csv_line({"n", "k", "table_space", "mode", "tables_checked", "feasible_count", "candidates12",
                "parity_checked", "parity_all_contradiction"});
  out += csv_line({std::to_string(result.n), std::to_string(result.k), result.table_space.str(),
                   result.exhaustive ? "exhaustive" : "pruned",
                   std::to_string(result.tables_checked), std::to_string(result.feasible_count),
                   result.candidates12.str(), std::to_string(result.parity_checked),
                   result.parity_all_contradiction ? "true" : "false"});
  return out;
}

std::string witness_report(const CycleWitness& w, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["witness"] = "cycle-lower-bound";
    j["mechanism"] = mechanism_string(w.spec);
    j["k"] = w.k;
    j["n"] = w.n;
    j["sp_premise_ok"] = w.sp_premise_ok;
    if (w.sp_premise_ok) {
      j["cycle_agent"] = w.cycle_agent;
      j["prob_on_cycle"] = fraction_string(w.prob_on_cycle);
      j["graph"] = serialize_graph(w.graph);
      j["graph_deviated"] = serialize_graph(w.graph_deviated);
      Json rg, rd;
      ratio_fields(w.ratio_graph, rg);
      ratio_fields(w.ratio_deviated, rd);
      j["ratio_graph"] = std::move(rg);
      j["ratio_deviated"] = std::move(rd);
    }
    j["bound"] = fraction_string(w.bound);
    j["bound_met"] = w.bound_met;
    return j.dump(2) + "\n";
  }
  std::string out = csv_line({"witness", "mechanism", "k", "n", "sp_premise_ok", "cycle_agent",
                              "prob_on_cycle", "ratio_graph", "ratio_deviated", "bound",
                              "bound_met"});
  const auto exact_or_inf = [](const RatioEstimate& est) {
    return est.infinite ? std::string("infinite") : fraction_string(est.ratio);
  };
  out += csv_line({"cycle-lower-bound", mechanism_string(w.spec), std::to_string(w.k),
                   std::to_string(w.n), w.sp_premise_ok ? "true" : "false",
                   w.sp_premise_ok ? std::to_string(w.cycle_agent) : "",
                   w.sp_premise_ok ? fraction_string(w.prob_on_cycle) : "",
                   w.sp_premise_ok ? exact_or_inf(w.ratio_graph) : "",
                   w.sp_premise_ok ? exact_or_inf(w.ratio_deviated) : "", fraction_string(w.bound),
                   w.bound_met ? "true" : "false"});
  return out;
}

std::string witness_report(const GspWitness& w, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["witness"] = "gsp-lower-bound";
    j["mechanism"] = mechanism_string(w.spec);
    j["k"] = w.k;
    j["n"] = w.n;
    j["agent_i"] = w.agent_i;
    j["agent_j"] = w.agent_j;
    j["prob_i_empty"] = fraction_string(w.prob_i_empty);
    j["prob_j_empty"] = fraction_string(w.prob_j_empty);
    j["graph_mutual"] = serialize_graph(w.graph_mutual);
    j["prob_i_mutual"] = fraction_string(w.prob_i_mutual);
    j["prob_j_mutual"] = fraction_string(w.prob_j_mutual);
    j["gsp_violated_at_mutual"] = w.gsp_violated_at_mutual;
    if (!w.gsp_violated_at_mutual) {
      j["qualifying_agent"] = w.qualifying_agent;
      j["graph_single"] = serialize_graph(w.graph_single);
      Json rs;
      ratio_fields(w.ratio_single, rs);
      j["ratio_single"] = std::move(rs);
    }
    j["bound"] = fraction_string(w.bound);
    j["bound_met"] = w.bound_met;
    return j.dump(2) + "\n";
  }
  std::string out =
      csv_line({"witness", "mechanism", "k", "n", "agent_i", "agent_j", "gsp_violated_at_mutual",
                "qualifying_agent", "ratio_single", "bound", "bound_met"});
  const std::string ratio_cell =
      w.gsp_violated_at_mutual
          ? ""
          : (w.ratio_single.infinite ? std::string("infinite") : fraction_string(w.ratio_single.ratio));
  out += csv_line({"gsp-lower-bound", mechanism_string(w.spec), std::to_string(w.k),
                   std::to_string(w.n), std::to_string(w.agent_i), std::to_string(w.agent_j),
                   w.gsp_violated_at_mutual ? "true" : "false",
                   w.gsp_violated_at_mutual ? "" : std::to_string(w.qualifying_agent), ratio_cell,
                   fraction_string(w.bound), w.bound_met ? "true" : "false"});
  return out;
}

std::string sweep_report(const std::vector<SweepRow>& rows, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json j;
      j["k"] = row.k;
      j["m"] = row.m;
      j["instance"] = row.instance;
      ratio_fields(row.estimate, j);
      arr.push_back(std::move(j));
    }
    Json top;
    top["rows"] = std::move(arr);
    return top.dump(2) + "\n";
  }
  std::string out = csv_line({"k", "m", "instance", "mode", "opt", "infinite", "expected", "ratio",
                              "trials", "ci_low", "ci_high"});
  for (const auto& row : rows) {
    const auto rc = ratio_cells(row.estimate);
    out += csv_line({std::to_string(row.k), std::to_string(row.m), row.instance, rc[0], rc[1],
                     rc[2], rc[3], rc[4], rc[5], rc[6], rc[7]});
  }
  return out;
}

}  // namespace kselect
