#include "nag/eval.h"

#include <set>
#include <sstream>

namespace nag {

namespace {

const AttrValue& lookup(const GrammarSpec& g, const Production& p, const AttrRef& r,
                        const SemState& lhs_inh, const std::vector<SemState>& child_syn) {
  if (r.occ == kLhs) return lhs_inh.get(r.attr);
  if (r.occ >= static_cast<int>(child_syn.size())) {
    throw GrammarError(p.rule_id + ": " + g.occurrence_name(g.rule_index(p.rule_id), r.occ) + "." +
                       attr_name(r.attr) + " read before it was computed");
  }
  return child_syn[r.occ].get(r.attr);
}

void apply(const GrammarSpec& g, const Production& p, const std::vector<int>& eqs,
           const SemState& lhs_inh, const std::vector<SemState>& child_syn, SemState& out,
           std::vector<CheckEvent>* trace, int node, size_t* evals) {
  std::vector<const AttrValue*> in;
  for (int ei : eqs) {
    const Equation& e = p.equations[ei];
    in.clear();
    for (const AttrRef& r : e.inputs) in.push_back(&lookup(g, p, r, lhs_inh, child_syn));
    EqArgs args(in, trace, p.rule_id, node);
    out.set(e.target.attr, e.fn(args));
    if (evals) ++*evals;
  }
}

class Annotator {
 public:
  Annotator(const GrammarSpec& g, AnnotatedAst& out) : g_(g), out_(out) {}

  void visit(const AstNode& n, SemState inh) {
    const int idx = next_++;
    NodeAnnotation& ann = out_.nodes[idx];
    const Symbol& s = g_.symbol(n.symbol);
    if (s.is_leaf()) {
      ann.syn = g_.eval_leaf(n.symbol, n.leaf, inh);
      ++out_.equation_evals;
      ann.inh = std::move(inh);
      return;
    }
    std::vector<SemState> child_syn;
    child_syn.reserve(n.children.size());
    for (size_t i = 0; i < n.children.size(); ++i) {
      SemState ci = eval_step(g_, n.rule, static_cast<int>(i), inh, child_syn, &out_.equation_evals);
      int child_idx = next_;
      visit(n.children[i], std::move(ci));
      child_syn.push_back(out_.nodes[child_idx].syn);
    }
    NodeAnnotation& a = out_.nodes[idx];
    a.syn = synth_step(g_, n.rule, inh, child_syn, &a.trace, idx, &out_.equation_evals);
    a.valid = a.syn.has(Attr::kValid) ? a.syn.boolean(Attr::kValid) : true;
    a.inh = std::move(inh);
  }

 private:
  const GrammarSpec& g_;
  AnnotatedAst& out_;
  int next_ = 0;
};

}  // namespace

bool MethodContext::declares_formal(const VarId& v) const {
  for (const auto& [id, t] : formals) {
    if (id == v) return true;
  }
  return false;
}

bool MethodContext::declares_field(const VarId& v) const {
  for (const auto& [id, t] : fields) {
    if (id == v) return true;
  }
  return false;
}

SemState initial_attributes(const MethodContext& ctx) {
  SymTab st;
  Flags f;
  std::set<VarId> seen;
  auto add = [&](const VarId& v, const TypeName& t, VarKind want) {
    if (v.kind != want) throw DataError("context entry " + to_string(v) + " has the wrong kind");
    if (!seen.insert(v).second) throw DataError("duplicate VarId " + to_string(v) + " in context");
    if (t.empty()) throw DataError("context entry " + to_string(v) + " has an empty type");
    st.bind(v, t);
    f.is_initialized[v] = true;
  };
  for (const auto& [v, t] : ctx.formals) add(v, t, VarKind::kFormal);
  for (const auto& [v, t] : ctx.fields) add(v, t, VarKind::kField);
  SemState s;
  s.set(Attr::kSymTab, std::move(st));
  s.set(Attr::kAttrIn, std::move(f));
  s.set(Attr::kMethodRetType, ctx.method_ret_type);
  return s;
}

std::vector<CheckEvent> AnnotatedAst::events() const {
  std::vector<CheckEvent> out;
  for (const auto& n : nodes) out.insert(out.end(), n.trace.begin(), n.trace.end());
  return out;
}

SemState eval_step(const GrammarSpec& g, int rule, int child, const SemState& parent_inh,
                   const std::vector<SemState>& synth_so_far, size_t* evals) {
  const Production& p = g.production(rule);
  if (child < 0 || child >= static_cast<int>(p.rhs.size())) {
    throw GrammarError(p.rule_id + ": child index out of range");
  }
  SemState out;
  apply(g, p, p.child_equations[child], parent_inh, synth_so_far, out, nullptr, -1, evals);
  return out;
}

SemState synth_step(const GrammarSpec& g, int rule, const SemState& inh,
                    const std::vector<SemState>& child_syn, std::vector<CheckEvent>* trace,
                    int node, size_t* evals) {
  const Production& p = g.production(rule);
  SemState out;
  apply(g, p, p.lhs_equations, inh, child_syn, out, trace, node, evals);
  return out;
}

AnnotatedAst annotate_from(const AstNode& ast, const SemState& root_inh, const GrammarSpec& g) {
  validate_ast(ast, g);
  AnnotatedAst out;
  out.ast = ast;
  out.nodes.resize(node_count(ast));
  Annotator(g, out).visit(out.ast, root_inh);
  return out;
}

AnnotatedAst annotate(const AstNode& ast, const MethodContext& ctx, const GrammarSpec& g) {
  return annotate_from(ast, initial_attributes(ctx), g);
}

std::string dump_annotations(const AnnotatedAst& a, const GrammarSpec& g) {
  std::ostringstream os;
  auto nodes = preorder(a.ast);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const AstNode& n = *nodes[i];
    const Symbol& s = g.symbol(n.symbol);
    os << i << '\t' << s.name;
    if (n.rule >= 0) os << '#' << g.production(n.rule).rule_id;
    if (s.is_leaf()) os << ' ' << leaf_key(n.leaf);
    os << '\n';
    const NodeAnnotation& ann = a.nodes[i];
    for (Attr at : ann.inh.attrs()) {
      os << "  inh " << attr_name(at) << " = " << format_attr_value(ann.inh.get(at)) << '\n';
    }
    for (Attr at : ann.syn.attrs()) {
      os << "  syn " << attr_name(at) << " = " << format_attr_value(ann.syn.get(at)) << '\n';
    }
    for (const auto& e : ann.trace) {
      os << "  check " << check_name(e.kind) << ' ' << (e.pass ? "pass" : "fail") << '\n';
    }
  }
  return os.str();
}

}  // namespace nag
