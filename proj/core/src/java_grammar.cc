// The Java-subset attribute grammar. Where the published equations are
// inconsistent, the encoding below resolves them; each resolution is marked
// with a "reading:" comment at the equation it affects.

#include <utility>

#include "nag/grammar.h"

namespace nag {

namespace {

using A = Attr;

AttrRef L(Attr a) { return {kLhs, a}; }
AttrRef C(int i, Attr a) { return {i, a}; }

AttrValue none() { return std::monostate{}; }

class RuleBuilder {
 public:
  RuleBuilder(GrammarSpec& g, std::string rule_id, SymbolId lhs, std::vector<SymbolId> rhs)
      : g_(g) {
    p_.rule_id = std::move(rule_id);
    p_.lhs = lhs;
    p_.rhs = std::move(rhs);
  }

  RuleBuilder& eq(AttrRef target, std::vector<AttrRef> inputs, EqFn fn) {
    p_.equations.push_back({target, std::move(inputs), std::move(fn)});
    return *this;
  }
  RuleBuilder& copy(AttrRef target, AttrRef src) {
    return eq(target, {src}, [](EqArgs& a) { return a.raw(0); });
  }
  RuleBuilder& constant(AttrRef target, AttrValue v) {
    return eq(target, {}, [v](EqArgs&) { return v; });
  }

  void done() { g_.add_production(std::move(p_)); }

 private:
  GrammarSpec& g_;
  Production p_;
};

// The bundle every statement-like symbol carries.
const std::vector<Attr> kStmtInh = {A::kSymTab, A::kAttrIn, A::kMethodRetType};
const std::vector<Attr> kStmtSyn = {A::kSymTabOut, A::kAttrOut, A::kValid};

Flags with_var(Flags f, const VarId& v, std::optional<bool> init, std::optional<bool> used) {
  if (v.is_literal()) return f;
  if (init) f.is_initialized[v] = *init;
  if (used) f.is_used[v] = *used;
  return f;
}

// Branch join: must-analysis over the two arms, restricted to the
// bindings visible at the branch.
Flags join_arms(const Flags& a, const Flags& b, const SymTab& scope) {
  Flags out;
  for (const auto& [v, t] : scope.entries()) {
    (void)t;
    bool init = a.initialized(v) && b.initialized(v);
    if (a.is_initialized.count(v) || b.is_initialized.count(v)) out.is_initialized[v] = init;
    if (a.is_used.count(v) || b.is_used.count(v)) out.is_used[v] = a.used(v) || b.used(v);
  }
  out.ret_stmt_generated = a.ret_stmt_generated && b.ret_stmt_generated;
  out.itr_vec = {a.itr_vec.first && b.itr_vec.first, a.itr_vec.second && b.itr_vec.second};
  return out;
}

// True iff the typed variable matches the expected type. A literal takes
// the expected type of its position, so it matches whenever one exists.
bool var_has_type(const SymTab& st, const VarId& v, const std::optional<TypeName>& expected) {
  if (!expected) return false;
  if (v.is_literal()) return true;
  const TypeName* t = st.find(v);
  return t != nullptr && *t == *expected;
}

// a3-a6 share one shape: child symbol carries symTab/attrIn down, the
// statement adds the child's symTab delta and takes its flag bundle.
void simple_stmt(GrammarSpec& g, const char* rule, SymbolId stmt, SymbolId child) {
  RuleBuilder(g, rule, stmt, {child})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .eq(L(A::kSymTabOut), {L(A::kSymTab), C(0, A::kSymTabOut)},
          [](EqArgs& a) -> AttrValue { return a.symtab(0).plus(a.symtab(1)); })
      // reading (a5): "Stmt.attrOut↓" on the right-hand side is Stmt.attrIn↓.
      // "attrIn + child.attrOut" is the child's bundle, which already
      // extends attrIn.
      .eq(L(A::kAttrOut), {L(A::kAttrIn), C(0, A::kAttrOut)},
          [](EqArgs& a) -> AttrValue { return a.flags(1); })
      .copy(L(A::kValid), C(0, A::kValid))
      .done();
}

// c1.*: compound statements do not leak bindings.
void compound_stmt(GrammarSpec& g, const char* rule, SymbolId stmt, SymbolId child) {
  RuleBuilder(g, rule, stmt, {child})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), C(0, A::kAttrOut))
      .copy(L(A::kValid), C(0, A::kValid))
      .done();
}

}  // namespace

GrammarSpec java_subset_grammar(std::shared_ptr<const ApiRegistry> registry,
                                const JavaGrammarOptions& opts) {
  GrammarSpec g;
  g.set_registry(std::move(registry));
  g.set_namespaces(opts.namespaces);

  auto stmt_like = [&](const char* name) {
    return g.add_symbol({name, LeafKind::kNone, kStmtInh, kStmtSyn});
  };
  const SymbolId start = stmt_like("Start");
  const SymbolId stmt = stmt_like("Stmt");
  const SymbolId decl = stmt_like("Decl");
  const SymbolId obj_init = stmt_like("ObjInit");
  const SymbolId invoke = stmt_like("Invoke");
  const SymbolId ret = stmt_like("Return");
  const SymbolId branch = stmt_like("Branch");
  const SymbolId loop = stmt_like("Loop");
  const SymbolId except = stmt_like("Except");
  const SymbolId catch_ = stmt_like("Catch");
  const SymbolId cond = stmt_like("Cond");
  const SymbolId invoke_more = g.add_symbol(
      {"InvokeMore", LeafKind::kNone, {A::kSymTab, A::kAttrIn, A::kMethodRetType, A::kExprType},
       {A::kAttrOut, A::kValid, A::kRetType}});
  const SymbolId call = g.add_symbol(
      {"Call", LeafKind::kNone, {A::kSymTab, A::kAttrIn, A::kMethodRetType, A::kExpType},
       {A::kAttrOut, A::kValid, A::kRetType, A::kExprType}});
  const SymbolId arg_list = g.add_symbol(
      {"ArgList", LeafKind::kNone, {A::kSymTab, A::kAttrIn, A::kMethodRetType, A::kTypeList},
       {A::kAttrOut, A::kValid}});
  const SymbolId api = g.add_symbol(
      {"Api", LeafKind::kApi, {A::kSymTab, A::kAttrIn, A::kMethodRetType, A::kExpType},
       {A::kName, A::kParams, A::kExprType, A::kRetType, A::kAttrOut}});
  const SymbolId type = g.add_symbol(
      {"Type", LeafKind::kType, {A::kSymTab, A::kMethodRetType, A::kExpType}, {A::kName, A::kParams}});
  const SymbolId var = g.add_symbol(
      {"Var", LeafKind::kVar, {A::kSymTab, A::kAttrIn, A::kMethodRetType, A::kExpType}, {A::kId}});
  g.set_start(start);

  // a1
  RuleBuilder(g, "a1", start, {stmt})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(L(A::kSymTabOut), C(0, A::kSymTabOut))
      .copy(L(A::kAttrOut), C(0, A::kAttrOut))
      .copy(L(A::kValid), C(0, A::kValid))
      .done();

  // a2a
  RuleBuilder(g, "a2a", stmt, {stmt, stmt})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kSymTab), C(0, A::kSymTabOut))
      .copy(L(A::kSymTabOut), C(1, A::kSymTabOut))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(L(A::kAttrOut), C(1, A::kAttrOut))
      .eq(L(A::kValid), {C(0, A::kValid), C(1, A::kValid)},
          [](EqArgs& a) -> AttrValue { return a.boolean(0) && a.boolean(1); })
      .done();

  // a2b. reading: symTabOut passes the inherited table through. The
  // literal "{}" would drop every binding made before an empty statement,
  // which a2a then feeds to the next statement.
  RuleBuilder(g, "a2b", stmt, {})
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .eq(L(A::kAttrOut), {L(A::kAttrIn)},
          [](EqArgs& a) -> AttrValue {
            Flags f = a.flags(0);
            f.itr_vec = {false, false};
            return f;
          })
      .constant(L(A::kValid), true)
      .done();

  simple_stmt(g, "a3", stmt, decl);
  simple_stmt(g, "a4", stmt, obj_init);
  simple_stmt(g, "a5", stmt, invoke);
  // reading (a6): the "Invoke" occurrences in a6 are Return.
  simple_stmt(g, "a6", stmt, ret);

  // b1
  RuleBuilder(g, "b1", decl, {type, var})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .constant(C(0, A::kExpType), none())
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kExpType), C(0, A::kName))
      .eq(L(A::kSymTabOut), {C(1, A::kId), C(0, A::kName)},
          [](EqArgs& a) -> AttrValue {
            SymTab t;
            if (!a.var(0).is_literal()) t.bind(a.var(0), *a.type(1));
            return t;
          })
      .eq(L(A::kAttrOut), {L(A::kAttrIn), C(1, A::kId)},
          [](EqArgs& a) -> AttrValue { return with_var(a.flags(0), a.var(1), false, false); })
      .constant(L(A::kValid), true)
      .done();

  // b2: Type$0 Var = new Type$1 ArgList
  RuleBuilder(g, "b2", obj_init, {type, var, type, arg_list})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .constant(C(0, A::kExpType), none())
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kExpType), C(0, A::kName))
      .copy(C(2, A::kSymTab), L(A::kSymTab))
      .copy(C(2, A::kExpType), C(0, A::kName))
      .copy(C(3, A::kSymTab), L(A::kSymTab))
      .copy(C(3, A::kAttrIn), L(A::kAttrIn))
      .copy(C(3, A::kTypeList), C(2, A::kParams))
      .eq(L(A::kSymTabOut), {C(1, A::kId), C(0, A::kName)},
          [](EqArgs& a) -> AttrValue {
            SymTab t;
            if (!a.var(0).is_literal()) t.bind(a.var(0), *a.type(1));
            return t;
          })
      .eq(L(A::kAttrOut), {C(3, A::kAttrOut), C(1, A::kId)},
          [](EqArgs& a) -> AttrValue { return with_var(a.flags(0), a.var(1), true, false); })
      // reading: "Type$0.name := Type$1.name" inside the conjunction is the
      // conjunct Type$0.name == Type$1.name.
      .eq(L(A::kValid), {C(3, A::kValid), C(0, A::kName), C(2, A::kName)},
          [](EqArgs& a) -> AttrValue {
            bool same = a.check(CheckKind::kReturnTypeAtCallSite, a.type(1) == a.type(2));
            return a.boolean(0) && same;
          })
      .done();

  // b3: Var$0 = Var$1 . Call InvokeMore, expanded as
  // [Call, InvokeMore, Var$1 (receiver), Var$0 (target)] so that both
  // variables see the types the call chain synthesizes. Pretty-printing
  // restores source order.
  RuleBuilder(g, "b3", invoke, {call, invoke_more, var, var})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .constant(C(0, A::kExpType), none())
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kExprType), C(0, A::kRetType))
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(C(2, A::kSymTab), L(A::kSymTab))
      .copy(C(2, A::kAttrIn), C(1, A::kAttrOut))
      .copy(C(2, A::kExpType), C(0, A::kExprType))
      .copy(C(3, A::kSymTab), L(A::kSymTab))
      .copy(C(3, A::kAttrIn), C(1, A::kAttrOut))
      .copy(C(3, A::kExpType), C(1, A::kRetType))
      .constant(L(A::kSymTabOut), SymTab{})
      .eq(L(A::kAttrOut), {C(1, A::kAttrOut), C(2, A::kId), C(3, A::kId)},
          [](EqArgs& a) -> AttrValue {
            Flags f = with_var(a.flags(0), a.var(1), std::nullopt, true);
            // An assignment initializes its target.
            return with_var(std::move(f), a.var(2), true, true);
          })
      .eq(L(A::kValid),
          {C(1, A::kValid), C(0, A::kValid), L(A::kSymTab), C(2, A::kId), C(3, A::kId),
           C(1, A::kRetType), C(0, A::kExprType)},
          [](EqArgs& a) -> AttrValue {
            const SymTab& st = a.symtab(2);
            const VarId& recv = a.var(3);
            const VarId& target = a.var(4);
            // A literal target discards the result.
            bool ret_ok = target.is_literal() || var_has_type(st, target, a.type(5));
            ret_ok = a.check(CheckKind::kReturnTypeAtCallSite, ret_ok);
            // A literal receiver stands for a static or internal call.
            std::optional<TypeName> recv_type = a.type(6);
            bool recv_ok = recv.is_literal() ? !recv_type : var_has_type(st, recv, recv_type);
            recv_ok = a.check(CheckKind::kObjectMethodCompat, recv_ok);
            return a.boolean(0) && a.boolean(1) && ret_ok && recv_ok;
          })
      .done();

  // b4a
  RuleBuilder(g, "b4a", invoke_more, {call, invoke_more})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(0, A::kExpType), L(A::kExprType))
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kExprType), C(0, A::kRetType))
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(L(A::kRetType), C(1, A::kRetType))
      // reading: "InvokeMoreOut$0.attrIn↑ := InvokeMoreOut$1.attrIn↑" is
      // InvokeMore$0.attrOut↑ := InvokeMore$1.attrOut↑.
      .copy(L(A::kAttrOut), C(1, A::kAttrOut))
      // reading: the chained call's receiver type must equal the type of
      // the expression it is invoked on, InvokeMore$0.exprType↓.
      .eq(L(A::kValid), {C(0, A::kValid), C(1, A::kValid), C(0, A::kExprType), L(A::kExprType)},
          [](EqArgs& a) -> AttrValue {
            auto recv = a.type(2);
            auto expr = a.type(3);
            bool ok = a.check(CheckKind::kObjectMethodCompat, recv && expr && *recv == *expr);
            return a.boolean(0) && a.boolean(1) && ok;
          })
      .done();

  // b4b
  RuleBuilder(g, "b4b", invoke_more, {})
      .copy(L(A::kRetType), L(A::kExprType))
      .eq(L(A::kAttrOut), {L(A::kAttrIn)},
          [](EqArgs& a) -> AttrValue {
            Flags f = a.flags(0);
            f.itr_vec = {false, false};
            return f;
          })
      .constant(L(A::kValid), true)
      .done();

  // b5
  RuleBuilder(g, "b5", call, {api, arg_list})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(0, A::kExpType), L(A::kExpType))
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kTypeList), C(0, A::kParams))
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(L(A::kRetType), C(0, A::kRetType))
      .copy(L(A::kExprType), C(0, A::kExprType))
      .copy(L(A::kAttrOut), C(1, A::kAttrOut))
      .copy(L(A::kValid), C(1, A::kValid))
      .done();

  // b6a
  RuleBuilder(g, "b6a", arg_list, {var, arg_list})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .eq(C(0, A::kExpType), {L(A::kTypeList)},
          [](EqArgs& a) -> AttrValue {
            const TypeList& tl = a.types(0);
            if (tl.empty()) return none();
            return tl.front();
          })
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .eq(C(1, A::kTypeList), {L(A::kTypeList)},
          [](EqArgs& a) -> AttrValue {
            const TypeList& tl = a.types(0);
            if (tl.empty()) return TypeList{};
            return TypeList(tl.begin() + 1, tl.end());
          })
      // reading: the isUsed update lands on ArgList$1.attrIn↓.
      .eq(C(1, A::kAttrIn), {L(A::kAttrIn), C(0, A::kId)},
          [](EqArgs& a) -> AttrValue { return with_var(a.flags(0), a.var(1), std::nullopt, true); })
      .copy(L(A::kAttrOut), C(1, A::kAttrOut))
      .eq(L(A::kValid), {C(1, A::kValid), L(A::kSymTab), C(0, A::kId), L(A::kTypeList)},
          [](EqArgs& a) -> AttrValue {
            const TypeList& tl = a.types(3);
            std::optional<TypeName> head;
            if (!tl.empty()) head = tl.front();
            bool ok = a.check(CheckKind::kActualParamType, var_has_type(a.symtab(1), a.var(2), head));
            return a.boolean(0) && ok;
          })
      .done();

  // b6b: a site is recorded only when arguments are missing.
  RuleBuilder(g, "b6b", arg_list, {})
      .copy(L(A::kAttrOut), L(A::kAttrIn))
      .eq(L(A::kValid), {L(A::kTypeList)},
          [](EqArgs& a) -> AttrValue {
            if (a.types(0).empty()) return true;
            return a.check(CheckKind::kActualParamType, false);
          })
      .done();

  // b7. A void method returns the literal, rendered as "return;".
  RuleBuilder(g, "b7", ret, {var})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(0, A::kExpType), L(A::kMethodRetType))
      .constant(L(A::kSymTabOut), SymTab{})
      .eq(L(A::kAttrOut), {L(A::kAttrIn), C(0, A::kId)},
          [](EqArgs& a) -> AttrValue {
            Flags f = with_var(a.flags(0), a.var(1), std::nullopt, true);
            f.ret_stmt_generated = true;
            return f;
          })
      .eq(L(A::kValid), {L(A::kMethodRetType), L(A::kSymTab), C(0, A::kId)},
          [](EqArgs& a) -> AttrValue {
            auto mrt = a.type(0);
            const VarId& v = a.var(2);
            bool ok;
            if (v.is_literal()) {
              ok = mrt && *mrt == kVoid;
            } else {
              const TypeName* t = a.symtab(1).find(v);
              ok = mrt && *mrt != kVoid && t && *t == *mrt;
            }
            return a.check(CheckKind::kReturnStmtType, ok);
          })
      .done();

  compound_stmt(g, "c1.a", stmt, branch);
  compound_stmt(g, "c1.b", stmt, loop);
  compound_stmt(g, "c1.c", stmt, except);

  // c2
  RuleBuilder(g, "c2", branch, {cond, stmt, stmt})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kSymTab), C(0, A::kSymTabOut))
      .copy(C(2, A::kSymTab), C(0, A::kSymTabOut))
      // reading: the arms start from Cond.attrOut↑; Cond.attrIn↓ is not a
      // legal input for a sibling.
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(C(2, A::kAttrIn), C(0, A::kAttrOut))
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      // reading: attrOut is the join of both arms.
      .eq(L(A::kAttrOut), {C(1, A::kAttrOut), C(2, A::kAttrOut), L(A::kSymTab)},
          [](EqArgs& a) -> AttrValue { return join_arms(a.flags(0), a.flags(1), a.symtab(2)); })
      .eq(L(A::kValid), {C(0, A::kValid), C(1, A::kValid), C(2, A::kValid)},
          [](EqArgs& a) -> AttrValue { return a.boolean(0) && a.boolean(1) && a.boolean(2); })
      .done();

  // c3. The body may run zero times; its effects are discarded.
  RuleBuilder(g, "c3", loop, {cond, stmt})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kSymTab), C(0, A::kSymTabOut))
      .copy(C(1, A::kAttrIn), C(0, A::kAttrOut))
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), L(A::kAttrIn))
      .eq(L(A::kValid), {C(0, A::kValid), C(1, A::kValid)},
          [](EqArgs& a) -> AttrValue { return a.boolean(0) && a.boolean(1); })
      .done();

  // c4
  RuleBuilder(g, "c4", except, {stmt, catch_})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kSymTab), C(0, A::kSymTabOut))
      // reading: "Stmt.attrIn↓" is an inherited input of a sibling; its
      // value is Except.attrIn↓.
      .copy(C(1, A::kAttrIn), L(A::kAttrIn))
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), L(A::kAttrIn))
      .eq(L(A::kValid), {C(0, A::kValid), C(1, A::kValid)},
          [](EqArgs& a) -> AttrValue { return a.boolean(0) && a.boolean(1); })
      .done();

  // c5a: catch(Type Var) Stmt; Catch$1. The caught variable is bound and
  // initialized for the handler body only.
  RuleBuilder(g, "c5a", catch_, {type, var, stmt, catch_})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .constant(C(0, A::kExpType), none())
      .copy(C(1, A::kSymTab), L(A::kSymTab))
      .copy(C(1, A::kAttrIn), L(A::kAttrIn))
      .copy(C(1, A::kExpType), C(0, A::kName))
      .eq(C(2, A::kSymTab), {L(A::kSymTab), C(1, A::kId), C(0, A::kName)},
          [](EqArgs& a) -> AttrValue {
            SymTab t = a.symtab(0);
            if (!a.var(1).is_literal()) t.bind(a.var(1), *a.type(2));
            return t;
          })
      .eq(C(2, A::kAttrIn), {L(A::kAttrIn), C(1, A::kId)},
          [](EqArgs& a) -> AttrValue { return with_var(a.flags(0), a.var(1), true, false); })
      .copy(C(3, A::kSymTab), L(A::kSymTab))
      // reading: as in c4, Catch$1 starts from Catch$0.attrIn↓.
      .copy(C(3, A::kAttrIn), L(A::kAttrIn))
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), C(3, A::kAttrOut))
      .eq(L(A::kValid), {C(2, A::kValid), C(3, A::kValid)},
          [](EqArgs& a) -> AttrValue { return a.boolean(0) && a.boolean(1); })
      .done();

  // c5b. reading: attrOut := attrIn rather than the empty bundle.
  RuleBuilder(g, "c5b", catch_, {})
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), L(A::kAttrIn))
      .constant(L(A::kValid), true)
      .done();

  // c6
  RuleBuilder(g, "c6", cond, {call})
      .copy(C(0, A::kSymTab), L(A::kSymTab))
      .copy(C(0, A::kAttrIn), L(A::kAttrIn))
      .constant(C(0, A::kExpType), none())
      .copy(L(A::kSymTabOut), L(A::kSymTab))
      .copy(L(A::kAttrOut), C(0, A::kAttrOut))
      .copy(L(A::kValid), C(0, A::kValid))
      .done();

  // d1/d2
  g.set_leaf_fn(api, [](const LeafPayload& p, const SemState& inh, const GrammarSpec& gs) {
    const auto* ref = std::get_if<ApiRef>(&p);
    if (!ref) throw GrammarError("Api leaf without an api payload");
    const ApiSignature* sig = gs.registry().find(ref->name);
    if (!sig) throw DataError("unknown api " + ref->name);
    SemState s;
    s.set(A::kName, sig->name);
    s.set(A::kParams, sig->param_types);
    if (sig->receiver_type) {
      s.set(A::kExprType, *sig->receiver_type);
    } else {
      s.set(A::kExprType, none());
    }
    s.set(A::kRetType, sig->return_type);
    Flags f = inh.flags(A::kAttrIn);
    if (!sig->is_internal) {
      // Registry keys may be qualified ("Iterator.next").
      const std::string method = sig->name.substr(sig->name.rfind('.') + 1);
      if (method == "hasNext") {
        f.itr_vec = {true, false};
      } else if (method == "next") {
        f.itr_vec.second = true;
      }
    }
    s.set(A::kAttrOut, std::move(f));
    return s;
  });
  // d3: params are the constructor's parameter list, empty without one.
  g.set_leaf_fn(type, [](const LeafPayload& p, const SemState&, const GrammarSpec& gs) {
    const auto* name = std::get_if<TypeName>(&p);
    if (!name) throw GrammarError("Type leaf without a type payload");
    SemState s;
    s.set(A::kName, *name);
    const ApiSignature* ctor = gs.registry().constructor(*name);
    s.set(A::kParams, ctor ? ctor->param_types : TypeList{});
    return s;
  });
  // d4
  g.set_leaf_fn(var, [](const LeafPayload& p, const SemState&, const GrammarSpec&) {
    const auto* v = std::get_if<VarId>(&p);
    if (!v) throw GrammarError("Var leaf without a VarId payload");
    SemState s;
    s.set(A::kId, *v);
    return s;
  });

  g.finalize();
  return g;
}

}  // namespace nag
