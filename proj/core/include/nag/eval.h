#ifndef NAG_EVAL_H_
#define NAG_EVAL_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nag/ast.h"
#include "nag/grammar.h"

namespace nag {

struct MethodContext {
  std::string name;
  std::vector<std::pair<VarId, TypeName>> formals;
  std::vector<std::pair<VarId, TypeName>> fields;
  std::vector<ApiSignature> internal_methods;
  TypeName method_ret_type = kVoid;
  // Source-level names for pretty-printing (formal 0 -> "f").
  std::map<VarId, std::string> display_names;

  bool declares_formal(const VarId& v) const;
  bool declares_field(const VarId& v) const;
};

// Rule a0. Throws DataError on a duplicate or mis-kinded VarId.
SemState initial_attributes(const MethodContext& ctx);

struct NodeAnnotation {
  SemState inh;
  SemState syn;
  bool valid = true;
  std::vector<CheckEvent> trace;
};

struct AnnotatedAst {
  AstNode ast;
  std::vector<NodeAnnotation> nodes;  // indexed by pre-order number
  size_t equation_evals = 0;

  bool valid() const { return nodes.empty() || nodes.front().valid; }
  std::vector<CheckEvent> events() const;
};

// Inherited state of child `child` of a node expanded with `rule`; the
// synthesized states of children 0..child-1 are in synth_so_far.
SemState eval_step(const GrammarSpec& g, int rule, int child, const SemState& parent_inh,
                   const std::vector<SemState>& synth_so_far, size_t* evals = nullptr);

// Synthesized state of a node once all its children are done.
SemState synth_step(const GrammarSpec& g, int rule, const SemState& inh,
                    const std::vector<SemState>& child_syn, std::vector<CheckEvent>* trace,
                    int node, size_t* evals = nullptr);

// One left-to-right pass; every node is visited once.
AnnotatedAst annotate(const AstNode& ast, const MethodContext& ctx, const GrammarSpec& g);
AnnotatedAst annotate_from(const AstNode& ast, const SemState& root_inh, const GrammarSpec& g);

std::string dump_annotations(const AnnotatedAst& a, const GrammarSpec& g);

}  // namespace nag

#endif  // NAG_EVAL_H_
