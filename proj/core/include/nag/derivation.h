#ifndef NAG_DERIVATION_H_
#define NAG_DERIVATION_H_

#include <string>
#include <vector>

#include "nag/eval.h"
#include "nag/features.h"

namespace nag {

// The next expansion site of a partial derivation.
struct PendingSite {
  SymbolId symbol = -1;
  std::string parent_rule;
  int position = 0;
  int depth = 1;  // root = 1
  int stmt_ordinal = -1;
  SemState inh;
};

// A partial AST grown depth-first, left to right. Attributes are computed
// online: a child's inherited state when it becomes pending, a node's
// synthesized state when its last child finishes.
class Derivation {
 public:
  Derivation(const GrammarSpec& g, SemState root_inh);

  bool done() const { return done_; }
  const PendingSite& pending() const { return pending_; }
  ExpansionSite site() const;

  // Expands the pending site with alternative `alt` of its symbol.
  void apply(int alt);
  void apply_key(const std::string& key);

  const std::vector<std::string>& choices() const { return choices_; }
  int stmt_expansions() const { return seq_stmts_; }

  // Only valid once done().
  AnnotatedAst result() const;

 private:
  struct Node {
    SymbolId symbol = -1;
    int rule = -1;
    LeafPayload leaf;
    std::vector<int> children;
    SemState inh;
    SemState syn;
    bool valid = true;
    int stmt_ordinal = -1;
    std::vector<CheckEvent> trace;
  };
  struct Frame {
    int node;
    int depth;
    std::vector<SemState> child_syn;
  };

  void finish(int node);
  void set_pending_child(const Frame& f);
  AstNode build(int node) const;

  const GrammarSpec* g_;
  std::vector<Node> nodes_;  // creation order = pre-order
  std::vector<Frame> stack_;
  PendingSite pending_;
  std::vector<std::string> choices_;
  int seq_stmts_ = 0;
  bool done_ = false;
  size_t evals_ = 0;
};

}  // namespace nag

#endif  // NAG_DERIVATION_H_
