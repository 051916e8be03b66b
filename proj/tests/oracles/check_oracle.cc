#include "check_oracle.h"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>

namespace nag::testing {

namespace {

struct Decl {
  TypeName type;
  int node;  // -1: context entry or catch parameter
  std::string rule;
  bool used = false;
  bool read_before_init = false;
};

// Visible variables map to an index into the declaration list.
struct Scope {
  std::map<VarId, int> visible;
  std::map<int, bool> ready;  // initialized

  std::optional<TypeName> type_of(const VarId& v, const std::vector<Decl>& decls) const {
    auto it = visible.find(v);
    if (it == visible.end()) return std::nullopt;
    return decls[it->second].type;
  }
};

class Oracle {
 public:
  Oracle(const AstNode& root, const MethodContext& ctx, const GrammarSpec& g) : ctx_(ctx), g_(g) {
    number(root);
  }

  std::vector<CheckEvent> run(const AstNode& root) {
    Scope s;
    for (const auto& [v, t] : ctx_.formals) bind(s, v, t, -1, "", true);
    for (const auto& [v, t] : ctx_.fields) bind(s, v, t, -1, "", true);
    statement(root, s);
    for (const Decl& d : decls_) {
      if (d.node < 0) continue;
      emit(CheckKind::kUnusedVariables, d.node, d.used, d.rule);
      if (!is_primitive(d.type)) emit(CheckKind::kUninitializedObjects, d.node, !d.read_before_init, d.rule);
    }
    bool returns = false;
    for (const auto& [n, id] : ids_) returns = returns || rule_of(*n) == "b7";
    emit(CheckKind::kReturnStmtExists, 0, returns, "");
    emit(CheckKind::kParses, 0, true, "");
    std::sort(out_.begin(), out_.end(), [](const CheckEvent& a, const CheckEvent& b) {
      return std::tie(a.node, a.kind, a.pass, a.rule_id) < std::tie(b.node, b.kind, b.pass, b.rule_id);
    });
    return out_;
  }

 private:
  void number(const AstNode& n) {
    ids_[&n] = static_cast<int>(ids_.size());
    for (const auto& c : n.children) number(c);
  }

  std::string rule_of(const AstNode& n) const { return n.rule < 0 ? "" : g_.production(n.rule).rule_id; }
  static const VarId& var(const AstNode& n) { return std::get<VarId>(n.leaf); }
  static const TypeName& tname(const AstNode& n) { return std::get<TypeName>(n.leaf); }
  const ApiSignature& api(const AstNode& call_node) const {
    return *g_.registry().find(std::get<ApiRef>(call_node.children[0].leaf).name);
  }

  void emit(CheckKind k, int node, bool pass, const std::string& rule) { out_.push_back({k, node, pass, rule}); }

  void bind(Scope& s, const VarId& v, const TypeName& t, int node, const std::string& rule, bool ready) {
    if (v.is_literal()) return;
    decls_.push_back({t, node, rule});
    const int id = static_cast<int>(decls_.size()) - 1;
    s.visible[v] = id;
    s.ready[id] = ready;
  }

  // A use of a variable: declared? formal/field in the context?
  int touch(const Scope& s, const AstNode& n) {
    const VarId& v = var(n);
    if (v.is_literal()) return -1;
    const int node = ids_.at(&n);
    auto it = s.visible.find(v);
    emit(CheckKind::kUndeclaredVarAccess, node, it != s.visible.end(), "");
    if (v.kind == VarKind::kFormal) {
      bool listed = std::any_of(ctx_.formals.begin(), ctx_.formals.end(), [&](const auto& e) { return e.first == v; });
      emit(CheckKind::kFormalParamAccess, node, listed, "");
    }
    if (v.kind == VarKind::kField) {
      bool listed = std::any_of(ctx_.fields.begin(), ctx_.fields.end(), [&](const auto& e) { return e.first == v; });
      emit(CheckKind::kClassVarAccess, node, listed, "");
    }
    if (it == s.visible.end()) return -1;
    decls_[it->second].used = true;
    return it->second;
  }

  void read(const Scope& s, const AstNode& n) {
    const int id = touch(s, n);
    if (id < 0) return;
    auto it = s.ready.find(id);
    if (it == s.ready.end() || !it->second) decls_[id].read_before_init = true;
  }

  void write(Scope& s, const AstNode& n) {
    const int id = touch(s, n);
    if (id >= 0) s.ready[id] = true;
  }

  // Matches an argument list against the required parameter types.
  void arguments(const Scope& s, const AstNode& list, const TypeList& params) {
    const AstNode* cur = &list;
    size_t i = 0;
    for (; !cur->children.empty(); cur = &cur->children[1], ++i) {
      const AstNode& arg = cur->children[0];
      bool ok = false;
      if (i < params.size()) {
        if (var(arg).is_literal()) {
          ok = true;
        } else {
          auto t = s.type_of(var(arg), decls_);
          ok = t && *t == params[i];
        }
      }
      emit(CheckKind::kActualParamType, ids_.at(cur), ok, "b6a");
      read(s, arg);
    }
    if (i < params.size()) emit(CheckKind::kActualParamType, ids_.at(cur), false, "b6b");
  }

  void call(const Scope& s, const AstNode& call_node) { arguments(s, call_node.children[1], api(call_node).param_types); }

  void invoke(Scope& s, const AstNode& n) {
    const AstNode& first = n.children[0];
    call(s, first);
    TypeName result = api(first).return_type;
    for (const AstNode* more = &n.children[1]; !more->children.empty(); more = &more->children[1]) {
      const ApiSignature& next = api(more->children[0]);
      emit(CheckKind::kObjectMethodCompat, ids_.at(more), next.receiver_type && *next.receiver_type == result,
           "b4a");
      call(s, more->children[0]);
      result = next.return_type;
    }
    const AstNode& recv = n.children[2];
    const AstNode& target = n.children[3];
    // Types are judged against the scope before the statement's own effects.
    bool ret_ok = var(target).is_literal();
    if (!ret_ok) {
      auto t = s.type_of(var(target), decls_);
      ret_ok = t && *t == result;
    }
    const auto& want = api(first).receiver_type;
    bool recv_ok;
    if (var(recv).is_literal()) {
      recv_ok = !want.has_value();
    } else {
      auto t = s.type_of(var(recv), decls_);
      recv_ok = want && t && *t == *want;
    }
    const int node = ids_.at(&n);
    emit(CheckKind::kReturnTypeAtCallSite, node, ret_ok, "b3");
    emit(CheckKind::kObjectMethodCompat, node, recv_ok, "b3");
    read(s, recv);
    write(s, target);
  }

  void statement(const AstNode& n, Scope& s) {
    const std::string r = rule_of(n);
    const int node = ids_.at(&n);
    if (r == "a2b" || r == "c5b") {
      return;
    } else if (r == "b1") {
      bind(s, var(n.children[1]), tname(n.children[0]), node, r, false);
    } else if (r == "b2") {
      emit(CheckKind::kReturnTypeAtCallSite, node, tname(n.children[0]) == tname(n.children[2]), "b2");
      const ApiSignature* ctor = g_.registry().constructor(tname(n.children[2]));
      arguments(s, n.children[3], ctor ? ctor->param_types : TypeList{});
      bind(s, var(n.children[1]), tname(n.children[0]), node, r, true);
    } else if (r == "b3") {
      invoke(s, n);
    } else if (r == "b7") {
      const VarId& v = var(n.children[0]);
      const TypeName& mrt = ctx_.method_ret_type;
      bool ok;
      if (v.is_literal()) {
        ok = mrt == kVoid;
      } else {
        auto t = s.type_of(v, decls_);
        ok = mrt != kVoid && t && *t == mrt;
      }
      emit(CheckKind::kReturnStmtType, node, ok, "b7");
      read(s, n.children[0]);
    } else if (r == "c2") {
      call(s, n.children[0].children[0]);
      Scope then_s = s, else_s = s;
      statement(n.children[1], then_s);
      statement(n.children[2], else_s);
      for (auto& [id, ready] : s.ready) {
        auto a = then_s.ready.find(id), b = else_s.ready.find(id);
        ready = a != then_s.ready.end() && a->second && b != else_s.ready.end() && b->second;
      }
    } else if (r == "c3") {
      call(s, n.children[0].children[0]);
      Scope body = s;
      statement(n.children[1], body);
    } else if (r == "c4") {
      Scope body = s;
      statement(n.children[0], body);
      for (const AstNode* c = &n.children[1]; rule_of(*c) == "c5a"; c = &c->children[3]) {
        Scope h;
        h.visible = body.visible;
        h.ready = s.ready;
        bind(h, var(c->children[1]), tname(c->children[0]), -1, "", true);
        statement(c->children[2], h);
      }
    } else if (r == "c1.a" || r == "c1.b" || r == "c1.c") {
      Scope inner = s;
      statement(n.children[0], inner);
      s.ready = inner.ready;
      for (auto it = s.ready.begin(); it != s.ready.end();) {
        bool visible = false;
        for (const auto& [v, id] : s.visible) visible = visible || id == it->first;
        it = visible ? std::next(it) : s.ready.erase(it);
      }
    } else {
      for (const auto& c : n.children) statement(c, s);
    }
  }

  const MethodContext& ctx_;
  const GrammarSpec& g_;
  std::map<const AstNode*, int> ids_;
  std::vector<Decl> decls_;
  std::vector<CheckEvent> out_;
};

}  // namespace

std::vector<CheckEvent> oracle_events(const AstNode& ast, const MethodContext& ctx, const GrammarSpec& g) {
  return Oracle(ast, ctx, g).run(ast);
}

}  // namespace nag::testing
