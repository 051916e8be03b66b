#ifndef NAG_CHECKS_H_
#define NAG_CHECKS_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nag/ast.h"
#include "nag/eval.h"

namespace nag {

struct CheckStat {
  int passed = 0;
  int total = 0;
  // nullopt when there are no sites ("n/a").
  std::optional<double> fraction() const;
};

struct CheckReport {
  std::array<CheckStat, kNumCheckKinds> stats{};
  bool pass_all = false;
  // Every site, sorted by (node, kind, pass).
  std::vector<CheckEvent> events;

  const CheckStat& operator[](CheckKind k) const { return stats[static_cast<int>(k)]; }
};

// Site conventions:
//  * Var use sites are receiver, target, argument and return positions;
//    the literal is never a use. Every use is an undeclaredVarAccess site
//    and, by kind, a formalParamAccess or classVarAccess site.
//  * uninitializedObjects: one site per reference-typed Decl/ObjInit,
//    failing when a read (receiver, argument, return) reaches that binding
//    before an assignment or `new` initialized it.
//  * unusedVariables: one site per Decl/ObjInit; any use, including an
//    assignment target, counts.
//  * Type-level sites come from the validity conjuncts of b2, b3, b4a,
//    b6a, b6b and b7.
//  * returnStmtExists and parses: one site at the root.
CheckReport run_checks(const AstNode& ast, const MethodContext& ctx, const GrammarSpec& g);

// Parses first; a malformed text yields a report with only parses = 0/1.
CheckReport run_checks_text(const std::string& text, const MethodContext& ctx,
                            const GrammarSpec& g);

// Builds the per-check counts and pass_all from a list of site events.
CheckReport report_from_events(std::vector<CheckEvent> events);

struct AggregateReport {
  size_t programs = 0;
  std::array<std::optional<double>, kNumCheckKinds> mean{};
  double pass_all_fraction = 0.0;
};

// Unweighted mean of per-program fractions; n/a entries are skipped.
AggregateReport aggregate_reports(const std::vector<CheckReport>& reports);

std::string format_report_tsv(const CheckReport& r);
std::string format_report_text(const CheckReport& r);
std::string format_aggregate_text(const AggregateReport& a);

}  // namespace nag

#endif  // NAG_CHECKS_H_
