#include "nag/features.h"

#include <algorithm>

namespace nag {

Vocabulary Vocabulary::from_grammar(const GrammarSpec& g) {
  Vocabulary v;
  v.types = g.registry().types();
  for (size_t i = 0; i < v.types.size(); ++i) v.type_index[v.types[i]] = static_cast<int>(i);
  v.vars = g.namespaces().all();
  return v;
}

int Vocabulary::row_of(const TypeName& t) const {
  auto it = type_index.find(t);
  return it == type_index.end() ? oov_row() : it->second;
}

int Vocabulary::col_of(const VarId& v) const {
  auto it = std::find(vars.begin(), vars.end(), v);
  return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

int child_stmt_ordinal(const GrammarSpec& g, SymbolId child, const std::string& parent_rule, int position,
                       int parent_ordinal) {
  const auto seq = g.find_rule("a2a");
  if (!seq || g.production(*seq).lhs != child) return -1;
  if (parent_rule != "a2a") return 0;
  return parent_ordinal + position;
}

std::vector<std::vector<uint8_t>> ContextFeatures::symtab_matrix(const Vocabulary& v) const {
  std::vector<std::vector<uint8_t>> m(v.rows(), std::vector<uint8_t>(v.vars.size(), 0));
  for (const auto& [r, c] : symtab_cells) m[r][c] = 1;
  return m;
}

ContextFeatures encode_context(const ExpansionSite& site, const SemState& inh,
                               const Vocabulary& vocab, bool use_attributes) {
  ContextFeatures f;
  f.symbol = site.symbol;
  f.parent_rule = site.parent_rule;
  f.position = site.position;
  f.prev_choice = site.prev_choice;
  f.stmt_ordinal = site.stmt_ordinal;
  f.attributes = use_attributes;
  if (!use_attributes) return f;

  const SymTab* st = inh.has(Attr::kSymTab) ? &inh.symtab(Attr::kSymTab) : nullptr;
  if (st) {
    for (const auto& [v, t] : st->entries()) {
      int col = vocab.col_of(v);
      if (col >= 0) f.symtab_cells.emplace_back(vocab.row_of(t), col);
    }
    std::sort(f.symtab_cells.begin(), f.symtab_cells.end());
  }
  if (inh.has(Attr::kTypeList)) {
    const TypeList& tl = inh.types(Attr::kTypeList);
    if (!tl.empty()) f.expected_type = tl.front();
  } else if (inh.has(Attr::kExprType)) {
    f.expected_type = inh.type(Attr::kExprType);
  } else if (inh.has(Attr::kExpType)) {
    f.expected_type = inh.type(Attr::kExpType);
  }
  if (f.expected_type && st) {
    for (const auto& [v, t] : st->entries()) {
      if (t == *f.expected_type && !v.is_literal()) f.match_set.push_back(v);
    }
    std::sort(f.match_set.begin(), f.match_set.end());
  }
  if (inh.has(Attr::kAttrIn)) {
    const Flags& fl = inh.flags(Attr::kAttrIn);
    f.ret_stmt_generated = fl.ret_stmt_generated;
    f.itr_vec = fl.itr_vec;
    for (const auto& [v, b] : fl.is_initialized) {
      if (b) f.initialized.push_back(v);
    }
    for (const auto& [v, b] : fl.is_used) {
      if (b) f.used.push_back(v);
    }
  }
  if (inh.has(Attr::kMethodRetType)) f.method_ret_type = inh.type(Attr::kMethodRetType);
  return f;
}

AlternativeTable::AlternativeTable(const GrammarSpec& g) {
  const size_t n = g.num_symbols();
  names_.resize(n);
  keys_.resize(n);
  index_.resize(n);
  for (size_t s = 0; s < n; ++s) {
    const Symbol& sym = g.symbol(static_cast<SymbolId>(s));
    names_[s] = sym.name;
    if (sym.is_leaf()) {
      for (const auto& p : g.leaf_alternatives(static_cast<SymbolId>(s))) keys_[s].push_back(leaf_key(p));
    } else {
      for (int r : g.alternatives(static_cast<SymbolId>(s))) keys_[s].push_back(g.production(r).rule_id);
    }
    for (size_t i = 0; i < keys_[s].size(); ++i) index_[s][keys_[s][i]] = static_cast<int>(i);
  }
}

int AlternativeTable::index_of(SymbolId s, const std::string& key) const {
  const auto& m = index_.at(s);
  auto it = m.find(key);
  return it == m.end() ? -1 : it->second;
}

}  // namespace nag
