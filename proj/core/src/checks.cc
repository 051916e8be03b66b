#include "nag/checks.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

namespace nag {

namespace {

// Scope-resolution walk for the variable-access checks. Bindings have an
// identity so a redeclared VarId does not inherit the old binding's state.
class ScopeWalker {
 public:
  ScopeWalker(const GrammarSpec& g, const MethodContext& ctx, const AstNode& root,
              std::vector<CheckEvent>& events)
      : g_(g), ctx_(ctx), events_(events) {
    auto nodes = preorder(root);
    for (size_t i = 0; i < nodes.size(); ++i) index_[nodes[i]] = static_cast<int>(i);
  }

  void run(const AstNode& root) {
    Env env;
    for (const auto& [v, t] : ctx_.formals) declare(env, v, t, -1, true);
    for (const auto& [v, t] : ctx_.fields) declare(env, v, t, -1, true);
    stmt(root, env);
    for (const Binding& b : bindings_) {
      if (b.decl_node < 0) continue;
      events_.push_back({CheckKind::kUnusedVariables, b.decl_node, b.used, b.rule});
      if (!is_primitive(b.type)) {
        events_.push_back({CheckKind::kUninitializedObjects, b.decl_node, !b.uninit_read, b.rule});
      }
    }
  }

 private:
  struct Binding {
    TypeName type;
    int decl_node;  // -1 for context entries and catch parameters
    std::string rule;
    bool used = false;
    bool uninit_read = false;
  };
  struct Env {
    std::map<VarId, int> scope;
    std::map<int, bool> init;
    bool initialized(int id) const {
      auto it = init.find(id);
      return it != init.end() && it->second;
    }
  };

  const std::string& rule(const AstNode& n) const { return g_.production(n.rule).rule_id; }

  void declare(Env& env, const VarId& v, const TypeName& t, int node, bool init,
               const std::string& r = "") {
    if (v.is_literal()) return;
    int id = static_cast<int>(bindings_.size());
    bindings_.push_back({t, node, r});
    env.scope[v] = id;
    env.init[id] = init;
  }

  // Records the access sites of one use; returns the binding or -1.
  int use(const Env& env, const AstNode& var_node) {
    const VarId& v = std::get<VarId>(var_node.leaf);
    if (v.is_literal()) return -1;
    int node = index_.at(&var_node);
    auto it = env.scope.find(v);
    events_.push_back({CheckKind::kUndeclaredVarAccess, node, it != env.scope.end(), ""});
    if (v.kind == VarKind::kFormal) {
      events_.push_back({CheckKind::kFormalParamAccess, node, ctx_.declares_formal(v), ""});
    } else if (v.kind == VarKind::kField) {
      events_.push_back({CheckKind::kClassVarAccess, node, ctx_.declares_field(v), ""});
    }
    if (it == env.scope.end()) return -1;
    bindings_[it->second].used = true;
    return it->second;
  }

  void read(const Env& env, const AstNode& var_node) {
    int id = use(env, var_node);
    if (id >= 0 && !env.initialized(id)) bindings_[id].uninit_read = true;
  }

  void assign(Env& env, const AstNode& var_node) {
    int id = use(env, var_node);
    if (id >= 0) env.init[id] = true;
  }

  void args(const Env& env, const AstNode& arg_list) {
    const AstNode* cur = &arg_list;
    while (!cur->children.empty()) {
      read(env, cur->children[0]);
      cur = &cur->children[1];
    }
  }

  void call(const Env& env, const AstNode& call_node) { args(env, call_node.children[1]); }

  void stmt(const AstNode& n, Env& env) {
    const std::string& r = rule(n);
    if (r == "a2b" || r == "c5b") return;
    if (r == "b1") {
      declare(env, std::get<VarId>(n.children[1].leaf), std::get<TypeName>(n.children[0].leaf),
              index_.at(&n), false, r);
    } else if (r == "b2") {
      args(env, n.children[3]);
      declare(env, std::get<VarId>(n.children[1].leaf), std::get<TypeName>(n.children[0].leaf),
              index_.at(&n), true, r);
    } else if (r == "b3") {
      call(env, n.children[0]);
      const AstNode* more = &n.children[1];
      while (!more->children.empty()) {
        call(env, more->children[0]);
        more = &more->children[1];
      }
      read(env, n.children[2]);
      assign(env, n.children[3]);
    } else if (r == "b7") {
      read(env, n.children[0]);
    } else if (r == "c2") {
      call(env, n.children[0].children[0]);
      Env a = env;
      Env b = env;
      stmt(n.children[1], a);
      stmt(n.children[2], b);
      for (auto& [id, init] : env.init) init = a.initialized(id) && b.initialized(id);
    } else if (r == "c3") {
      call(env, n.children[0].children[0]);
      Env body = env;
      stmt(n.children[1], body);
    } else if (r == "c4") {
      Env body = env;
      stmt(n.children[0], body);
      // Handlers see the try block's bindings but only the flags that held
      // before it.
      Env base;
      base.scope = body.scope;
      base.init = env.init;
      const AstNode* c = &n.children[1];
      while (rule(*c) == "c5a") {
        Env h = base;
        declare(h, std::get<VarId>(c->children[1].leaf), std::get<TypeName>(c->children[0].leaf),
                -1, true);
        stmt(c->children[2], h);
        c = &c->children[3];
      }
    } else {
      for (const auto& child : n.children) stmt(child, env);
    }
  }

  const GrammarSpec& g_;
  const MethodContext& ctx_;
  std::vector<CheckEvent>& events_;
  std::unordered_map<const AstNode*, int> index_;
  std::vector<Binding> bindings_;
};

bool has_return(const AstNode& n, const GrammarSpec& g) {
  if (n.rule >= 0 && g.production(n.rule).rule_id == "b7") return true;
  return std::any_of(n.children.begin(), n.children.end(),
                     [&](const AstNode& c) { return has_return(c, g); });
}

bool is_aggregate(CheckKind k) {
  return k == CheckKind::kVariableAccessAgg || k == CheckKind::kTypeErrorsAgg;
}

std::string fraction_text(const CheckStat& s) {
  auto f = s.fraction();
  if (!f) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *f);
  return buf;
}

}  // namespace

std::optional<double> CheckStat::fraction() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(passed) / total;
}

CheckReport report_from_events(std::vector<CheckEvent> events) {
  CheckReport r;
  std::sort(events.begin(), events.end(), [](const CheckEvent& a, const CheckEvent& b) {
    return std::tie(a.node, a.kind, a.pass) < std::tie(b.node, b.kind, b.pass);
  });
  for (const auto& e : events) {
    auto& s = r.stats[static_cast<int>(e.kind)];
    ++s.total;
    s.passed += e.pass ? 1 : 0;
  }
  auto sum = [&](CheckKind agg, std::initializer_list<CheckKind> parts) {
    auto& s = r.stats[static_cast<int>(agg)];
    for (CheckKind k : parts) {
      s.total += r.stats[static_cast<int>(k)].total;
      s.passed += r.stats[static_cast<int>(k)].passed;
    }
  };
  sum(CheckKind::kVariableAccessAgg,
      {CheckKind::kUndeclaredVarAccess, CheckKind::kFormalParamAccess, CheckKind::kClassVarAccess,
       CheckKind::kUninitializedObjects});
  sum(CheckKind::kTypeErrorsAgg,
      {CheckKind::kObjectMethodCompat, CheckKind::kReturnTypeAtCallSite,
       CheckKind::kActualParamType, CheckKind::kReturnStmtType});
  r.pass_all = std::all_of(events.begin(), events.end(), [](const CheckEvent& e) { return e.pass; });
  r.events = std::move(events);
  return r;
}

CheckReport run_checks(const AstNode& ast, const MethodContext& ctx, const GrammarSpec& g) {
  AnnotatedAst ann = annotate(ast, ctx, g);
  std::vector<CheckEvent> events = ann.events();
  ScopeWalker(g, ctx, ann.ast, events).run(ann.ast);
  events.push_back({CheckKind::kReturnStmtExists, 0, has_return(ast, g), ""});
  events.push_back({CheckKind::kParses, 0, true, ""});
  return report_from_events(std::move(events));
}

CheckReport run_checks_text(const std::string& text, const MethodContext& ctx,
                            const GrammarSpec& g) {
  AstNode ast;
  try {
    ast = parse_ast(text, g);
  } catch (const ParseError&) {
    return report_from_events({{CheckKind::kParses, 0, false, ""}});
  }
  return run_checks(ast, ctx, g);
}

AggregateReport aggregate_reports(const std::vector<CheckReport>& reports) {
  if (reports.empty()) throw DataError("aggregate_reports needs at least one report");
  AggregateReport a;
  a.programs = reports.size();
  for (int k = 0; k < kNumCheckKinds; ++k) {
    double sum = 0;
    int n = 0;
    for (const auto& r : reports) {
      if (auto f = r.stats[k].fraction()) {
        sum += *f;
        ++n;
      }
    }
    if (n > 0) a.mean[k] = sum / n;
  }
  size_t pass = std::count_if(reports.begin(), reports.end(),
                              [](const CheckReport& r) { return r.pass_all; });
  a.pass_all_fraction = static_cast<double>(pass) / reports.size();
  return a;
}

std::string format_report_tsv(const CheckReport& r) {
  std::ostringstream os;
  for (int k = 0; k < kNumCheckKinds; ++k) {
    const auto& s = r.stats[k];
    os << check_name(static_cast<CheckKind>(k)) << '\t' << s.passed << '\t' << s.total << '\t'
       << fraction_text(s) << '\n';
  }
  os << "passAllChecks\t" << (r.pass_all ? 1 : 0) << "\t1\t" << (r.pass_all ? "1.000000" : "0.000000")
     << '\n';
  return os.str();
}

std::string format_report_text(const CheckReport& r) {
  std::ostringstream os;
  char buf[128];
  for (int k = 0; k < kNumCheckKinds; ++k) {
    const auto& s = r.stats[k];
    CheckKind kind = static_cast<CheckKind>(k);
    std::snprintf(buf, sizeof(buf), "%s%-22s %4d / %-4d %s\n", is_aggregate(kind) ? "  " : "",
                  check_name(kind), s.passed, s.total, fraction_text(s).c_str());
    os << buf;
  }
  os << "passAllChecks          " << (r.pass_all ? "yes" : "no") << '\n';
  return os.str();
}

std::string format_aggregate_text(const AggregateReport& a) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-24s %zu\n", "programs", a.programs);
  os << buf;
  for (int k = 0; k < kNumCheckKinds; ++k) {
    if (a.mean[k]) {
      std::snprintf(buf, sizeof(buf), "%-24s %6.2f\n", check_name(static_cast<CheckKind>(k)),
                    100.0 * *a.mean[k]);
    } else {
      std::snprintf(buf, sizeof(buf), "%-24s %6s\n", check_name(static_cast<CheckKind>(k)), "n/a");
    }
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-24s %6.2f\n", "passAllChecks", 100.0 * a.pass_all_fraction);
  os << buf;
  return os.str();
}

}  // namespace nag
