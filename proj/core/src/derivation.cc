#include "nag/derivation.h"

namespace nag {

Derivation::Derivation(const GrammarSpec& g, SemState root_inh) : g_(&g) {
  pending_.symbol = g.start();
  pending_.inh = std::move(root_inh);
  pending_.stmt_ordinal = child_stmt_ordinal(g, g.start(), "", 0, -1);
}

ExpansionSite Derivation::site() const {
  ExpansionSite s;
  s.symbol = pending_.symbol;
  s.parent_rule = pending_.parent_rule;
  s.position = pending_.position;
  if (!choices_.empty()) s.prev_choice = choices_.back();
  s.stmt_ordinal = pending_.stmt_ordinal;
  return s;
}

void Derivation::apply_key(const std::string& key) {
  if (done_) throw GrammarError("derivation is complete");
  const Symbol& s = g_->symbol(pending_.symbol);
  if (s.is_leaf()) {
    const auto& alts = g_->leaf_alternatives(pending_.symbol);
    for (size_t i = 0; i < alts.size(); ++i) {
      if (leaf_key(alts[i]) == key) return apply(static_cast<int>(i));
    }
  } else {
    const auto& alts = g_->alternatives(pending_.symbol);
    for (size_t i = 0; i < alts.size(); ++i) {
      if (g_->production(alts[i]).rule_id == key) return apply(static_cast<int>(i));
    }
  }
  throw DataError("'" + key + "' is not an alternative of " + s.name);
}

void Derivation::apply(int alt) {
  if (done_) throw GrammarError("derivation is complete");
  const SymbolId sym = pending_.symbol;
  const Symbol& s = g_->symbol(sym);
  const int idx = static_cast<int>(nodes_.size());
  Node n;
  n.symbol = sym;
  n.inh = std::move(pending_.inh);
  n.stmt_ordinal = pending_.stmt_ordinal;
  if (!stack_.empty()) nodes_[stack_.back().node].children.push_back(idx);
  if (s.is_leaf()) {
    const auto& alts = g_->leaf_alternatives(sym);
    if (alt < 0 || alt >= static_cast<int>(alts.size())) throw GrammarError("leaf alternative out of range");
    n.leaf = alts[alt];
    n.syn = g_->eval_leaf(sym, n.leaf, n.inh);
    choices_.push_back(leaf_key(n.leaf));
    nodes_.push_back(std::move(n));
    finish(idx);
    return;
  }
  const auto& alts = g_->alternatives(sym);
  if (alt < 0 || alt >= static_cast<int>(alts.size())) throw GrammarError("alternative out of range");
  n.rule = alts[alt];
  const Production& p = g_->production(n.rule);
  choices_.push_back(p.rule_id);
  if (p.rule_id == "a2a") ++seq_stmts_;
  nodes_.push_back(std::move(n));
  if (p.rhs.empty()) {
    Node& me = nodes_[idx];
    me.syn = synth_step(*g_, me.rule, me.inh, {}, &me.trace, idx, &evals_);
    me.valid = me.syn.has(Attr::kValid) ? me.syn.boolean(Attr::kValid) : true;
    finish(idx);
    return;
  }
  stack_.push_back({idx, pending_.depth, {}});
  set_pending_child(stack_.back());
}

void Derivation::set_pending_child(const Frame& f) {
  const Node& n = nodes_[f.node];
  const int child = static_cast<int>(f.child_syn.size());
  PendingSite next;
  next.symbol = g_->production(n.rule).rhs[child];
  next.parent_rule = g_->production(n.rule).rule_id;
  next.position = child;
  next.depth = f.depth + 1;
  next.stmt_ordinal = child_stmt_ordinal(*g_, next.symbol, next.parent_rule, child, n.stmt_ordinal);
  next.inh = eval_step(*g_, n.rule, child, n.inh, f.child_syn, &evals_);
  pending_ = std::move(next);
}

void Derivation::finish(int node) {
  while (true) {
    if (stack_.empty()) {
      done_ = true;
      pending_ = {};
      return;
    }
    Frame& f = stack_.back();
    f.child_syn.push_back(nodes_[node].syn);
    const Production& p = g_->production(nodes_[f.node].rule);
    if (f.child_syn.size() < p.rhs.size()) {
      set_pending_child(f);
      return;
    }
    Node& parent = nodes_[f.node];
    parent.syn = synth_step(*g_, parent.rule, parent.inh, f.child_syn, &parent.trace, f.node, &evals_);
    parent.valid = parent.syn.has(Attr::kValid) ? parent.syn.boolean(Attr::kValid) : true;
    node = f.node;
    stack_.pop_back();
  }
}

AstNode Derivation::build(int node) const {
  const Node& n = nodes_[node];
  AstNode a;
  a.symbol = n.symbol;
  a.rule = n.rule;
  a.leaf = n.leaf;
  for (int c : n.children) a.children.push_back(build(c));
  return a;
}

AnnotatedAst Derivation::result() const {
  if (!done_) throw GrammarError("derivation is not complete");
  AnnotatedAst out;
  out.ast = build(0);
  out.equation_evals = evals_;
  out.nodes.reserve(nodes_.size());
  for (const auto& n : nodes_) out.nodes.push_back({n.inh, n.syn, n.valid, n.trace});
  return out;
}

}  // namespace nag
