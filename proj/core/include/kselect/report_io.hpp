#pragma once

#include <string>
#include <vector>

#include "kselect/audit.hpp"

namespace kselect {

enum class ReportFormat { Json, Csv };

// One row of a ratio sweep over k, with m = ceil(k^(1/3)).
struct SweepRow {
  int k = 0;
  int m = 0;
  std::string instance;
  RatioEstimate estimate;
};

// All serializations are deterministic functions of their inputs: exact
// probabilities are "num/den" strings, Monte Carlo values are decimal with
// explicit trial counts, and the two never share a field. Wall-clock
// statistics are deliberately left out so identical inputs serialize
// byte-identically.
std::string to_json(const SelectionDistribution& dist);
std::string ratio_report(const MechanismSpec& spec, const std::string& instance,
                         const RatioEstimate& est, ReportFormat format);
std::string audit_report(const MechanismSpec& spec, int n, const std::string& property,
                         const AuditReport& report, ReportFormat format);
std::string impossibility_report(const ImpossibilityResult& result, ReportFormat format);
std::string witness_report(const CycleWitness& w, ReportFormat format);
std::string witness_report(const GspWitness& w, ReportFormat format);
std::string sweep_report(const std::vector<SweepRow>& rows, ReportFormat format);

// Decimal rendering used for every Monte Carlo value (shortest round-trip
// form, locale-independent).
std::string decimal_string(double x);

}  // namespace kselect
