#ifndef NAG_FIDELITY_H_
#define NAG_FIDELITY_H_

#include <set>
#include <string>
#include <vector>

#include "nag/ast.h"
#include "nag/grammar.h"

namespace nag {

inline constexpr size_t kDefaultPathCap = 4096;

using CallSeq = std::vector<std::string>;
using LabelPath = std::vector<std::string>;

// Registry names of every Api leaf, plus "T.<init>" for each object creation.
std::set<std::string> api_call_set(const AstNode& ast, const GrammarSpec& g);

// Call sequences along code paths. A loop runs zero or one time, both arms
// of a branch are taken, and a try block yields the try path alone and the
// try path followed by each handler. Throws DataError past `cap` paths.
std::set<CallSeq> api_call_sequences(const AstNode& ast, const GrammarSpec& g, size_t cap = kDefaultPathCap);

// Root-to-leaf label paths ("Stmt#a2a", ..., "Var:local"); Var leaves keep
// only their kind.
std::set<LabelPath> program_paths(const AstNode& ast, const GrammarSpec& g, size_t cap = kDefaultPathCap);

// Locals renumbered 0, 1, ... in pre-order of first occurrence.
AstNode canonicalize_locals(const AstNode& ast);
bool ast_exact_match(const AstNode& a, const AstNode& b);

// Intersection over union; two empty sets score 1.
template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

struct FidelityReport {
  double api_call_set = 0;
  double api_call_sequences = 0;
  double program_paths = 0;
  double ast_exact_match = 0;
};

// Best score over the candidates, per metric. Throws DataError on an empty list.
FidelityReport fidelity_report(const std::vector<AstNode>& candidates, const AstNode& reference,
                               const GrammarSpec& g, size_t cap = kDefaultPathCap);

// Mean of per-program reports.
FidelityReport mean_report(const std::vector<FidelityReport>& reports);
std::string format_fidelity_text(const FidelityReport& r, size_t programs);

}  // namespace nag

#endif  // NAG_FIDELITY_H_
