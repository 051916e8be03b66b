#ifndef NAG_FEATURES_H_
#define NAG_FEATURES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nag/grammar.h"

namespace nag {

// Rows of the symbol-table matrix are registry types plus one OOV row;
// columns are the VarId slots.
struct Vocabulary {
  std::vector<TypeName> types;
  std::map<TypeName, int> type_index;
  std::vector<VarId> vars;

  static Vocabulary from_grammar(const GrammarSpec& g);
  int oov_row() const { return static_cast<int>(types.size()); }
  int rows() const { return oov_row() + 1; }
  int row_of(const TypeName& t) const;
  int col_of(const VarId& v) const;  // -1 when not a slot
};

// Syntactic position of an expansion site.
struct ExpansionSite {
  SymbolId symbol = -1;
  std::string parent_rule;  // "" at the root
  int position = 0;         // 0-based index in the parent's rhs
  std::string prev_choice;  // previous choice in pre-order, "" at the root
  int stmt_ordinal = -1;    // statements before this one in its block; -1 off sequence sites
};

// Ordinal of a child site: the statement-sequence symbol (lhs of a2a) starts
// each block at 0, a2a's head keeps the parent's ordinal and its tail adds
// one. Every other symbol gets -1.
int child_stmt_ordinal(const GrammarSpec& g, SymbolId child, const std::string& parent_rule, int position,
                       int parent_ordinal);

struct ContextFeatures {
  SymbolId symbol = -1;
  std::string parent_rule;
  int position = 0;
  std::string prev_choice;
  int stmt_ordinal = -1;

  bool attributes = true;  // false: every attribute-derived field is zero
  std::vector<std::pair<int, int>> symtab_cells;  // (row, col) of each 1
  std::optional<TypeName> expected_type;
  std::vector<VarId> match_set;  // slots whose type is expected_type
  bool ret_stmt_generated = false;
  std::pair<bool, bool> itr_vec{false, false};
  std::vector<VarId> initialized;
  std::vector<VarId> used;
  std::optional<TypeName> method_ret_type;

  std::vector<std::vector<uint8_t>> symtab_matrix(const Vocabulary& v) const;
};

ContextFeatures encode_context(const ExpansionSite& site, const SemState& inh,
                               const Vocabulary& vocab, bool use_attributes = true);

// Alternative keys per symbol: ruleIds for nonterminals, leaf keys for
// leaves, in the grammar's order.
class AlternativeTable {
 public:
  AlternativeTable() = default;
  explicit AlternativeTable(const GrammarSpec& g);

  const std::vector<std::string>& keys(SymbolId s) const { return keys_.at(s); }
  int index_of(SymbolId s, const std::string& key) const;  // -1 when absent
  size_t num_symbols() const { return keys_.size(); }
  const std::string& symbol_name(SymbolId s) const { return names_.at(s); }

  friend bool operator==(const AlternativeTable&, const AlternativeTable&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> keys_;
  std::vector<std::map<std::string, int>> index_;
};

}  // namespace nag

#endif  // NAG_FEATURES_H_
