#ifndef NAG_AST_H_
#define NAG_AST_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nag/grammar.h"

namespace nag {

struct AstNode {
  SymbolId symbol = -1;
  int rule = -1;  // production index; -1 for leaves
  std::vector<AstNode> children;
  LeafPayload leaf;

  friend bool operator==(const AstNode&, const AstNode&) = default;
};

size_t node_count(const AstNode& n);

// Flattened pre-order view; index i is the node's pre-order number.
std::vector<const AstNode*> preorder(const AstNode& root);

class ParseError : public DataError {
 public:
  ParseError(size_t offset, const std::string& msg)
      : DataError("offset " + std::to_string(offset) + ": " + msg), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// S-expression format: (Sym#ruleId child*), (Type NAME), (Var KIND INDEX),
// (Api NAME). ';' starts a comment that runs to the end of the line.
AstNode parse_ast(const std::string& text, const GrammarSpec& g);
std::string serialize_ast(const AstNode& n, const GrammarSpec& g);

// Throws DataError when the tree does not match the grammar.
void validate_ast(const AstNode& n, const GrammarSpec& g);

struct PrettyOptions {
  std::map<VarId, std::string> var_names;
  // Display names for calls without a receiver, e.g. println -> System.out.println.
  std::map<std::string, std::string> api_display;
  std::string literal_text = "ARG";
  int indent = 2;
};

std::string default_var_name(const VarId& v);

// Java-like rendering. Deterministic; a statement per line.
std::string pretty_print(const AstNode& n, const GrammarSpec& g, const PrettyOptions& opts = {});

}  // namespace nag

#endif  // NAG_AST_H_
