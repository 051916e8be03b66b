#include <algorithm>
#include <cctype>
#include <set>

#include "nag/checks.h"
#include "nag/corpus.h"

namespace nag {

namespace {

const std::vector<TypeName> kRefTypes = {
    "File",   "FileWriter", "FileReader", "BufferedReader", "BufferedWriter", "String",
    "StringBuilder", "Scanner", "Socket", "URL", "InputStream", "OutputStream",
    "Properties", "Random", "Date", "Thread", "Pattern", "Matcher",
    "List", "Map", "Iterator", "Logger", "Timer", "Path",
};
const std::vector<TypeName> kPrimTypes = {"int", "boolean", "long", "double"};

const std::vector<std::string> kVerbs = {
    "read", "write", "close", "flush", "open", "append", "parse", "format", "load", "store",
    "connect", "send", "receive", "start", "stop", "reset", "create", "update", "find", "resolve",
    "compile", "split", "join", "copy", "merge", "lookup", "register", "encode", "decode", "scan",
};

const std::vector<std::string> kClassWords = {
    "File", "Stream", "Config", "Report", "Cache", "Session", "Buffer", "Index", "Record",
    "Message", "Task", "Job", "Table", "Query", "Token", "Route", "Event", "Channel",
};
const std::vector<std::string> kClassRoles = {
    "Manager", "Helper", "Loader", "Writer", "Parser", "Handler", "Service", "Builder", "Util",
};

std::vector<TypeName> value_types() {
  std::vector<TypeName> v = kRefTypes;
  v.insert(v.end(), kPrimTypes.begin(), kPrimTypes.end());
  return v;
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string upper_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string short_name(const std::string& key) { return key.substr(key.rfind('.') + 1); }

class Builder {
 public:
  explicit Builder(const GrammarSpec& g) : g_(g) {}

  AstNode rule(const std::string& id, std::vector<AstNode> children = {}) const {
    AstNode n;
    n.rule = g_.rule_index(id);
    n.symbol = g_.production(n.rule).lhs;
    n.children = std::move(children);
    return n;
  }
  AstNode leaf(const char* sym, LeafPayload p) const {
    AstNode n;
    n.symbol = g_.symbol_id(sym);
    n.leaf = std::move(p);
    return n;
  }
  AstNode var(const VarId& v) const { return leaf("Var", v); }
  AstNode type(const TypeName& t) const { return leaf("Type", t); }
  AstNode api(const std::string& name) const { return leaf("Api", ApiRef{name}); }

  AstNode args(const std::vector<VarId>& vs, size_t i = 0) const {
    if (i == vs.size()) return rule("b6b");
    return rule("b6a", {var(vs[i]), args(vs, i + 1)});
  }
  AstNode call(const std::string& api_name, const std::vector<VarId>& vs) const {
    return rule("b5", {api(api_name), args(vs)});
  }
  AstNode seq(std::vector<AstNode> stmts, size_t i = 0) const {
    if (i == stmts.size()) return rule("a2b");
    AstNode head = std::move(stmts[i]);
    return rule("a2a", {std::move(head), seq(std::move(stmts), i + 1)});
  }

 private:
  const GrammarSpec& g_;
};

struct Scope {
  std::vector<std::pair<VarId, TypeName>> vars;  // all initialized except fresh decls
  bool has_type(const TypeName& t) const {
    return std::any_of(vars.begin(), vars.end(), [&](const auto& e) { return e.second == t; });
  }
  const VarId* of_type(const TypeName& t) const {
    for (const auto& e : vars) {
      if (e.second == t) return &e.first;
    }
    return nullptr;
  }
  bool has_var(const VarId& v) const {
    return std::any_of(vars.begin(), vars.end(), [&](const auto& e) { return e.first == v; });
  }
};

class MethodSynth {
 public:
  MethodSynth(const GrammarSpec& g, const ApiRegistry& reg, Rng& rng, int num_locals)
      : b_(g), reg_(reg), rng_(rng), num_locals_(num_locals) {
    for (const auto& [name, sig] : reg.all()) {
      if (is_constructor_key(name) || sig.is_internal) continue;
      if (sig.receiver_type) {
        instance_.push_back(&sig);
      } else if (sig.return_type == "boolean" && sig.param_types.size() == 1) {
        conds_.push_back(&sig);
      } else {
        statics_.push_back(&sig);
      }
    }
  }

  // Returns the statements; `unused` must be empty for the body to be kept.
  std::vector<AstNode> block(Scope& scope, int n_stmts, int depth) {
    std::vector<AstNode> out;
    for (int i = 0; i < n_stmts; ++i) {
      const double u = rng_.uniform();
      bool ok = false;
      if (depth < 2 && u < 0.18) {
        ok = compound(scope, depth, out);
        // Locals of a rejected block never reach the body.
        for (auto it = unused_.begin(); it != unused_.end();) {
          it = scope.has_var(*it) ? std::next(it) : unused_.erase(it);
        }
      } else if (u < 0.38) {
        ok = obj_init(scope, out);
      }
      if (!ok) ok = invoke(scope, out);
      if (!ok) break;
    }
    // Uses for declared-but-unread locals.
    for (int tries = 0; tries < 6 && any_unused(scope); ++tries) {
      if (!invoke(scope, out, true)) break;
    }
    return out;
  }

  bool any_unused(const Scope& scope) const {
    for (const auto& v : unused_) {
      if (scope.has_var(v)) return true;
    }
    return false;
  }
  bool clean() const { return unused_.empty(); }
  std::vector<std::string>& used_apis() { return used_apis_; }

 private:
  std::optional<VarId> fresh_local(const Scope& scope) {
    std::vector<VarId> free;
    for (int i = 0; i < num_locals_; ++i) {
      VarId v{VarKind::kLocal, i};
      if (!scope.has_var(v)) free.push_back(v);
    }
    if (free.empty()) return std::nullopt;
    VarId v = free[rng_.below(free.size())];
    return v;
  }

  bool params_in_scope(const ApiSignature& s, const Scope& scope) const {
    return std::all_of(s.param_types.begin(), s.param_types.end(),
                       [&](const TypeName& t) { return scope.has_type(t); });
  }

  std::vector<VarId> arg_vars(const ApiSignature& s, const Scope& scope) {
    std::vector<VarId> out;
    for (const auto& t : s.param_types) {
      out.push_back(*scope.of_type(t));
      mark_used(out.back());
    }
    return out;
  }

  void mark_used(const VarId& v) { unused_.erase(v); }

  bool uses_unused(const ApiSignature& s, const Scope& scope) const {
    for (const auto& v : unused_) {
      if (!scope.has_var(v)) continue;
      const TypeName t = type_of(scope, v);
      if (s.receiver_type && *s.receiver_type == t) return true;
      if (std::find(s.param_types.begin(), s.param_types.end(), t) != s.param_types.end()) return true;
    }
    return false;
  }

  static TypeName type_of(const Scope& scope, const VarId& v) {
    for (const auto& e : scope.vars) {
      if (e.first == v) return e.second;
    }
    return {};
  }

  bool invoke(Scope& scope, std::vector<AstNode>& out, bool want_unused = false) {
    std::vector<const ApiSignature*> cands, preferred;
    for (const ApiSignature* s : instance_) {
      if (!scope.has_type(*s->receiver_type) || !params_in_scope(*s, scope)) continue;
      cands.push_back(s);
      if (uses_unused(*s, scope)) preferred.push_back(s);
    }
    std::vector<const ApiSignature*> statics;
    for (const ApiSignature* s : statics_) {
      if (params_in_scope(*s, scope)) statics.push_back(s);
    }
    if (want_unused && preferred.empty()) return false;
    const ApiSignature* sig = nullptr;
    if (!preferred.empty() && (want_unused || rng_.uniform() < 0.7)) {
      sig = preferred[rng_.below(preferred.size())];
    } else if (!statics.empty() && rng_.uniform() < 0.04) {
      sig = statics[rng_.below(statics.size())];
    } else if (!cands.empty()) {
      sig = cands[rng_.below(cands.size())];
    } else {
      return false;
    }

    // Receiver and arguments are read before the target is written.
    VarId recv = VarId::literal();
    if (sig->receiver_type) {
      recv = *scope.of_type(*sig->receiver_type);
      mark_used(recv);
    }
    std::vector<AstNode> calls;
    calls.push_back(b_.call(sig->name, arg_vars(*sig, scope)));
    used_apis_.push_back(sig->name);
    TypeName ret = sig->return_type;
    // Occasionally chain a second call on the result.
    if (ret != kVoid && rng_.uniform() < 0.12) {
      std::vector<const ApiSignature*> next;
      for (const ApiSignature* s : instance_) {
        if (*s->receiver_type == ret && params_in_scope(*s, scope)) next.push_back(s);
      }
      if (!next.empty()) {
        const ApiSignature* s2 = next[rng_.below(next.size())];
        calls.push_back(b_.call(s2->name, arg_vars(*s2, scope)));
        used_apis_.push_back(s2->name);
        ret = s2->return_type;
      }
    }
    AstNode more = b_.rule("b4b");
    for (size_t i = calls.size(); i-- > 1;) more = b_.rule("b4a", {std::move(calls[i]), std::move(more)});

    VarId target = VarId::literal();
    if (ret != kVoid) {
      if (const VarId* t = scope.of_type(ret)) {
        target = *t;
      } else if (auto fresh = fresh_local(scope)) {
        // Declare a local of the result type first.
        out.push_back(b_.rule("a3", {b_.rule("b1", {b_.type(ret), b_.var(*fresh)})}));
        scope.vars.emplace_back(*fresh, ret);
        target = *fresh;
      }
    }
    out.push_back(b_.rule(
        "a5", {b_.rule("b3", {std::move(calls[0]), std::move(more), b_.var(recv), b_.var(target)})}));
    return true;
  }

  bool obj_init(Scope& scope, std::vector<AstNode>& out) {
    std::vector<const ApiSignature*> cands;
    for (const auto& t : kRefTypes) {
      const ApiSignature* ctor = reg_.constructor(t);
      if (!ctor || scope.has_type(t) || !params_in_scope(*ctor, scope)) continue;
      cands.push_back(ctor);
    }
    if (cands.empty()) return false;
    auto fresh = fresh_local(scope);
    if (!fresh) return false;
    const ApiSignature* ctor = cands[rng_.below(cands.size())];
    const TypeName& t = ctor->return_type;
    auto args = arg_vars(*ctor, scope);
    out.push_back(b_.rule("a4", {b_.rule("b2", {b_.type(t), b_.var(*fresh), b_.type(t), b_.args(args)})}));
    scope.vars.emplace_back(*fresh, t);
    unused_.insert(*fresh);
    used_apis_.push_back(ctor->name);
    return true;
  }

  std::optional<AstNode> cond(const Scope& scope) {
    std::vector<const ApiSignature*> c;
    for (const ApiSignature* s : conds_) {
      if (params_in_scope(*s, scope)) c.push_back(s);
    }
    if (c.empty()) return std::nullopt;
    const ApiSignature* s = c[rng_.below(c.size())];
    used_apis_.push_back(s->name);
    return b_.rule("c6", {b_.call(s->name, arg_vars(*s, scope))});
  }

  bool compound(Scope& scope, int depth, std::vector<AstNode>& out) {
    const double u = rng_.uniform();
    if (u < 0.4) {
      // try { ... } catch (IOException e) { e.printStackTrace(); }
      if (scope.has_type("IOException")) return false;
      Scope inner = scope;
      auto body = block(inner, 1 + static_cast<int>(rng_.below(2)), depth + 1);
      if (body.empty() || any_unused(inner)) return false;
      // The handler still sees the try body's locals.
      Scope handler = scope;
      for (const auto& e : inner.vars) {
        if (!handler.has_var(e.first)) handler.vars.push_back(e);
      }
      auto ev = fresh_local(handler);
      if (!ev) return false;
      std::vector<AstNode> hbody;
      hbody.push_back(b_.rule(
          "a5", {b_.rule("b3", {b_.call("IOException.printStackTrace", {}), b_.rule("b4b"), b_.var(*ev),
                                b_.var(VarId::literal())})}));
      used_apis_.push_back("IOException.printStackTrace");
      AstNode c = b_.rule("c5a", {b_.type("IOException"), b_.var(*ev), b_.seq(std::move(hbody)), b_.rule("c5b")});
      out.push_back(b_.rule("c1.c", {b_.rule("c4", {b_.seq(std::move(body)), std::move(c)})}));
      return true;
    }
    auto c = cond(scope);
    if (!c) return false;
    if (u < 0.75) {
      Scope a = scope, b = scope;
      auto then_s = block(a, 1 + static_cast<int>(rng_.below(2)), depth + 1);
      if (then_s.empty() || any_unused(a)) return false;
      std::vector<AstNode> else_s;
      if (rng_.uniform() < 0.5) {
        else_s = block(b, 1, depth + 1);
        if (any_unused(b)) return false;
      }
      out.push_back(
          b_.rule("c1.a", {b_.rule("c2", {std::move(*c), b_.seq(std::move(then_s)), b_.seq(std::move(else_s))})}));
      return true;
    }
    Scope body_scope = scope;
    auto body = block(body_scope, 1 + static_cast<int>(rng_.below(2)), depth + 1);
    if (body.empty() || any_unused(body_scope)) return false;
    out.push_back(b_.rule("c1.b", {b_.rule("c3", {std::move(*c), b_.seq(std::move(body))})}));
    return true;
  }

  Builder b_;
  const ApiRegistry& reg_;
  Rng& rng_;
  int num_locals_;
  std::vector<const ApiSignature*> instance_, statics_, conds_;
  std::set<VarId> unused_;
  std::vector<std::string> used_apis_;
};

std::vector<TypeName> pick_types(Rng& rng, const std::vector<TypeName>& pool, size_t n,
                                 const std::set<TypeName>& avoid) {
  std::vector<TypeName> cand;
  for (const auto& t : pool) {
    if (!avoid.count(t)) cand.push_back(t);
  }
  std::shuffle(cand.begin(), cand.end(), rng);
  cand.resize(std::min(n, cand.size()));
  return cand;
}

std::vector<int> pick_slots(Rng& rng, int namespace_size, size_t n) {
  std::vector<int> s(static_cast<size_t>(namespace_size));
  for (int i = 0; i < namespace_size; ++i) s[static_cast<size_t>(i)] = i;
  std::shuffle(s.begin(), s.end(), rng);
  s.resize(std::min(n, s.size()));
  return s;
}

}  // namespace

ApiRegistry synthetic_registry() {
  ApiRegistry reg;
  Rng rng(0xC0FFEE);
  const auto values = value_types();
  auto random_params = [&](size_t max_n, const TypeName& self) {
    TypeList p;
    const size_t n = rng.below(max_n + 1);
    std::set<TypeName> seen{self};
    while (p.size() < n) {
      const TypeName& t = values[rng.below(values.size())];
      if (seen.insert(t).second) p.push_back(t);
    }
    return p;
  };
  for (const auto& t : kRefTypes) {
    ApiSignature ctor;
    ctor.name = constructor_key(t);
    ctor.return_type = t;
    ctor.param_types = random_params(2, t);
    reg.add(ctor);
    std::vector<std::string> verbs = kVerbs;
    std::shuffle(verbs.begin(), verbs.end(), rng);
    for (int i = 0; i < 6; ++i) {
      ApiSignature m;
      m.name = t + "." + verbs[static_cast<size_t>(i)] + (i % 2 ? upper_first(values[rng.below(values.size())]) : "");
      if (reg.find(m.name)) continue;
      m.receiver_type = t;
      m.param_types = random_params(2, "");
      m.return_type = rng.uniform() < 0.1 ? kVoid : values[rng.below(values.size())];
      reg.add(m);
    }
  }
  // Iterators drive the itrVec flags.
  reg.add({"Iterator.hasNext", "Iterator", "boolean", {}, false});
  reg.add({"Iterator.next", "Iterator", "String", {}, false});
  reg.add({"List.iterator", "List", "Iterator", {}, false});
  for (const char* ex : {"IOException", "Exception"}) {
    reg.add({std::string(ex) + ".printStackTrace", std::string(ex), kVoid, {}, false});
    reg.add({std::string(ex) + ".getMessage", std::string(ex), "String", {}, false});
  }
  // Static calls: boolean tests for conditions, plus a few utilities.
  const std::vector<std::pair<std::string, TypeName>> tests = {
      {"exists", "File"},      {"isEmpty", "String"}, {"isConnected", "Socket"}, {"isAlive", "Thread"},
      {"isReachable", "URL"},  {"matches", "Pattern"}, {"hasMore", "Scanner"},   {"isDirectory", "Path"},
      {"isPositive", "int"},   {"isBlank", "StringBuilder"},
  };
  for (const auto& [name, param] : tests) reg.add({name, std::nullopt, "boolean", {param}, false});
  reg.add({"println", std::nullopt, kVoid, {"String"}, false});
  reg.add({"currentTimeMillis", std::nullopt, "long", {}, false});
  reg.add({"parseInt", std::nullopt, "int", {"String"}, false});
  reg.add({"valueOf", std::nullopt, "String", {"int"}, false});
  return reg;
}

std::vector<ClassRecord> synth_corpus(const SynthSpec& spec, const GrammarSpec& g) {
  if (spec.n_classes < 0 || spec.methods_per_class < 1) throw DataError("synth_corpus: bad spec");
  const ApiRegistry& reg = g.registry();
  for (const char* needed : {"IOException.printStackTrace", "File.<init>"}) {
    if (!reg.find(needed)) throw DataError(std::string("synth_corpus: registry lacks ") + needed);
  }
  const NamespaceSizes& ns = g.namespaces();
  const auto values = value_types();
  std::vector<ClassRecord> out;
  for (int cid = 0; cid < spec.n_classes; ++cid) {
    Rng rng = Rng::derive(spec.seed, static_cast<uint64_t>(cid));
    ClassRecord c;
    c.id = cid;
    c.name = kClassWords[rng.below(kClassWords.size())] + kClassRoles[rng.below(kClassRoles.size())];
    const auto field_types = pick_types(rng, values, 1 + rng.below(3), {});
    const auto field_slots = pick_slots(rng, ns.fields, field_types.size());
    for (size_t i = 0; i < field_types.size(); ++i) {
      VarId v{VarKind::kField, field_slots[i]};
      c.fields.emplace_back(v, field_types[i]);
      c.field_names[v] = "m" + upper_first(field_types[i]);
    }
    std::set<TypeName> field_set(field_types.begin(), field_types.end());

    for (int k = 0; k < spec.methods_per_class; ++k) {
      bool kept = false;
      for (int attempt = 0; attempt < 200 && !kept; ++attempt) {
        MethodRecord m;
        m.ctx.fields = c.fields;
        for (const auto& [v, n] : c.field_names) m.ctx.display_names[v] = n;
        const auto formal_types = pick_types(rng, values, 1 + rng.below(3), field_set);
        const auto formal_slots = pick_slots(rng, ns.formals, formal_types.size());
        Scope scope;
        scope.vars = c.fields;
        for (size_t i = 0; i < formal_types.size(); ++i) {
          VarId v{VarKind::kFormal, formal_slots[i]};
          m.ctx.formals.emplace_back(v, formal_types[i]);
          m.ctx.display_names[v] = lower_first(formal_types[i]) == "int" ? "n" : lower_first(formal_types[i]);
          scope.vars.emplace_back(v, formal_types[i]);
        }
        MethodSynth ms(g, reg, rng, ns.locals);
        auto stmts = ms.block(scope, 2 + static_cast<int>(rng.below(4)), 0);
        if (stmts.empty() || !ms.clean()) continue;
        // Return: void, or the unique variable of a type in scope.
        VarId ret = VarId::literal();
        m.ctx.method_ret_type = kVoid;
        if (rng.uniform() < 0.7) {
          const auto& e = scope.vars[rng.below(scope.vars.size())];
          ret = e.first;
          m.ctx.method_ret_type = e.second;
        }
        Builder b(g);
        stmts.push_back(b.rule("a6", {b.rule("b7", {b.var(ret)})}));
        m.body = b.rule("a1", {b.seq(std::move(stmts))});
        const auto& apis = ms.used_apis();
        const std::string first = apis.empty() ? "run" : short_name(apis.front());
        m.ctx.name = lower_first(first == "<init>" ? "create" : first) +
                     (apis.empty() ? "" : upper_first(apis.front().substr(0, apis.front().find('.'))));
        if (m.ctx.name == lower_first(first)) m.ctx.name += "Value";
        if (!run_checks(m.body, m.ctx, g).pass_all) continue;

        // Evidence.
        auto add = [&](EvidenceKind kind, std::vector<std::string> toks) {
          if (!toks.empty()) m.evidence.items.push_back({kind, std::move(toks)});
        };
        add(EvidenceKind::kClassName, split_identifier(c.name));
        for (const auto& [v, t] : c.fields) add(EvidenceKind::kFieldType, {t});
        add(EvidenceKind::kMethodName, split_identifier(m.ctx.name));
        for (const auto& [v, t] : m.ctx.formals) add(EvidenceKind::kFormalType, {t});
        add(EvidenceKind::kReturnType, {m.ctx.method_ret_type});
        std::vector<std::string> doc;
        for (const auto& a : apis) {
          for (auto& tok : split_identifier(short_name(a) == "<init>" ? a.substr(0, a.find('.')) : short_name(a))) {
            doc.push_back(std::move(tok));
          }
        }
        add(EvidenceKind::kJavadoc, doc);
        c.methods.push_back(std::move(m));
        kept = true;
      }
      if (!kept) throw DataError("synth_corpus: could not build a valid body for class " + std::to_string(cid));
    }
    // Surrounding-method headers: the other methods of the class.
    for (size_t k = 0; k < c.methods.size(); ++k) {
      for (size_t o = 0; o < c.methods.size(); ++o) {
        if (o == k) continue;
        const MethodContext& om = c.methods[o].ctx;
        std::vector<std::string> toks = split_identifier(om.name);
        for (const auto& [v, t] : om.formals) toks.push_back(t);
        toks.push_back(om.method_ret_type);
        c.methods[k].evidence.items.push_back({EvidenceKind::kMethodHeader, std::move(toks)});
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace nag
