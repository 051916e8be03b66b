#include "nag/grammar.h"

#include <algorithm>
#include <array>
#include <climits>
#include <sstream>

namespace nag {

namespace {

constexpr std::array<const char*, kNumAttrs> kAttrNames = {
    "symTab", "symTabOut", "attrIn", "attrOut",  "methodRetType", "typeList", "exprType",
    "expType", "valid",    "retType", "params", "name",          "id",
};

const char* value_kind(const AttrValue& v) {
  switch (v.index()) {
    case 0: return "none";
    case 1: return "SymTab";
    case 2: return "Flags";
    case 3: return "TypeName";
    case 4: return "TypeList";
    case 5: return "bool";
    case 6: return "VarId";
  }
  return "?";
}

template <typename T>
const T& expect(const AttrValue& v, const char* what) {
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw GrammarError(std::string("attribute ") + what + " holds " + value_kind(v));
}

std::string format_flags_map(const std::map<VarId, bool>& m) {
  std::string s = "{";
  bool first = true;
  for (const auto& [v, b] : m) {
    if (!first) s += ", ";
    first = false;
    s += to_string(v) + ":" + (b ? "true" : "false");
  }
  return s + "}";
}

}  // namespace

const char* attr_name(Attr a) { return kAttrNames[static_cast<int>(a)]; }

std::optional<Attr> parse_attr_name(const std::string& s) {
  for (int i = 0; i < kNumAttrs; ++i) {
    if (s == kAttrNames[i]) return static_cast<Attr>(i);
  }
  return std::nullopt;
}

std::string format_attr_value(const AttrValue& v) {
  std::ostringstream os;
  switch (v.index()) {
    case 0: os << "none"; break;
    case 1: {
      os << "{";
      bool first = true;
      for (const auto& [var, t] : std::get<SymTab>(v).entries()) {
        if (!first) os << ", ";
        first = false;
        os << to_string(var) << "->" << t;
      }
      os << "}";
      break;
    }
    case 2: {
      const auto& f = std::get<Flags>(v);
      os << "init=" << format_flags_map(f.is_initialized) << " used=" << format_flags_map(f.is_used)
         << " ret=" << (f.ret_stmt_generated ? "true" : "false") << " itr=("
         << (f.itr_vec.first ? "true" : "false") << "," << (f.itr_vec.second ? "true" : "false")
         << ")";
      break;
    }
    case 3: os << std::get<TypeName>(v); break;
    case 4: {
      os << "[";
      const auto& l = std::get<TypeList>(v);
      for (size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
      os << "]";
      break;
    }
    case 5: os << (std::get<bool>(v) ? "true" : "false"); break;
    case 6: os << to_string(std::get<VarId>(v)); break;
  }
  return os.str();
}

const AttrValue& SemState::get(Attr a) const {
  if (!has(a)) throw GrammarError(std::string("attribute ") + attr_name(a) + " was never computed");
  return values_[static_cast<int>(a)];
}

void SemState::set(Attr a, AttrValue v) {
  values_[static_cast<int>(a)] = std::move(v);
  present_ |= static_cast<uint16_t>(1u << static_cast<int>(a));
}

const SymTab& SemState::symtab(Attr a) const { return expect<SymTab>(get(a), attr_name(a)); }
const Flags& SemState::flags(Attr a) const { return expect<Flags>(get(a), attr_name(a)); }
const TypeList& SemState::types(Attr a) const { return expect<TypeList>(get(a), attr_name(a)); }
bool SemState::boolean(Attr a) const { return expect<bool>(get(a), attr_name(a)); }
const VarId& SemState::var(Attr a) const { return expect<VarId>(get(a), attr_name(a)); }

std::optional<TypeName> SemState::type(Attr a) const {
  const AttrValue& v = get(a);
  if (std::holds_alternative<std::monostate>(v)) return std::nullopt;
  return expect<TypeName>(v, attr_name(a));
}

std::vector<Attr> SemState::attrs() const {
  std::vector<Attr> out;
  for (int i = 0; i < kNumAttrs; ++i) {
    if (has(static_cast<Attr>(i))) out.push_back(static_cast<Attr>(i));
  }
  return out;
}

bool Symbol::declares_inherited(Attr a) const {
  return std::find(inherited.begin(), inherited.end(), a) != inherited.end();
}

bool Symbol::declares_synthesized(Attr a) const {
  return std::find(synthesized.begin(), synthesized.end(), a) != synthesized.end();
}

const SymTab& EqArgs::symtab(size_t i) const { return expect<SymTab>(raw(i), "input"); }
const Flags& EqArgs::flags(size_t i) const { return expect<Flags>(raw(i), "input"); }
const TypeList& EqArgs::types(size_t i) const { return expect<TypeList>(raw(i), "input"); }
bool EqArgs::boolean(size_t i) const { return expect<bool>(raw(i), "input"); }
const VarId& EqArgs::var(size_t i) const { return expect<VarId>(raw(i), "input"); }

std::optional<TypeName> EqArgs::type(size_t i) const {
  if (std::holds_alternative<std::monostate>(raw(i))) return std::nullopt;
  return expect<TypeName>(raw(i), "input");
}

bool EqArgs::check(CheckKind kind, bool pass) {
  if (trace_) trace_->push_back({kind, node_, pass, rule_id_});
  return pass;
}

SymbolId GrammarSpec::add_symbol(Symbol s) {
  if (finalized_) throw GrammarError("grammar already finalized");
  if (symbol_by_name_.count(s.name)) throw GrammarError("duplicate symbol " + s.name);
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbol_by_name_[s.name] = id;
  symbols_.push_back(std::move(s));
  leaf_fns_.emplace_back();
  return id;
}

int GrammarSpec::add_production(Production p) {
  if (finalized_) throw GrammarError("grammar already finalized");
  if (rule_by_id_.count(p.rule_id)) throw GrammarError("duplicate ruleId " + p.rule_id);
  int id = static_cast<int>(productions_.size());
  rule_by_id_[p.rule_id] = id;
  productions_.push_back(std::move(p));
  return id;
}

void GrammarSpec::set_leaf_fn(SymbolId s, LeafFn fn) { leaf_fns_.at(s) = std::move(fn); }

std::optional<SymbolId> GrammarSpec::find_symbol(const std::string& name) const {
  auto it = symbol_by_name_.find(name);
  if (it == symbol_by_name_.end()) return std::nullopt;
  return it->second;
}

SymbolId GrammarSpec::symbol_id(const std::string& name) const {
  auto s = find_symbol(name);
  if (!s) throw GrammarError("unknown symbol " + name);
  return *s;
}

std::optional<int> GrammarSpec::find_rule(const std::string& rule_id) const {
  auto it = rule_by_id_.find(rule_id);
  if (it == rule_by_id_.end()) return std::nullopt;
  return it->second;
}

int GrammarSpec::rule_index(const std::string& rule_id) const {
  auto r = find_rule(rule_id);
  if (!r) throw GrammarError("unknown ruleId " + rule_id);
  return *r;
}

const ApiRegistry& GrammarSpec::registry() const {
  static const ApiRegistry kEmpty;
  return registry_ ? *registry_ : kEmpty;
}

std::string GrammarSpec::occurrence_name(int rule, int occ) const {
  const Production& p = productions_.at(rule);
  SymbolId s = occ == kLhs ? p.lhs : p.rhs.at(occ);
  std::string name = symbols_.at(s).name;
  // Positional tags only where the same symbol occurs more than once.
  int count = p.lhs == s ? 1 : 0;
  for (SymbolId r : p.rhs) count += r == s ? 1 : 0;
  if (count <= 1) return name;
  int tag = 0;
  if (occ != kLhs) {
    tag = p.lhs == s ? 1 : 0;
    for (int i = 0; i < occ; ++i) tag += p.rhs[i] == s ? 1 : 0;
  }
  return name + "$" + std::to_string(tag);
}

SemState GrammarSpec::eval_leaf(SymbolId s, const LeafPayload& p, const SemState& inh) const {
  const LeafFn& fn = leaf_fns_.at(s);
  if (!fn) return {};
  return fn(p, inh, *this);
}

void GrammarSpec::finalize() {
  if (finalized_) return;
  if (start_ < 0) throw GrammarError("grammar has no start symbol");
  alternatives_.assign(symbols_.size(), {});

  for (size_t pi = 0; pi < productions_.size(); ++pi) {
    Production& p = productions_[pi];
    if (p.lhs < 0 || p.lhs >= static_cast<int>(symbols_.size())) {
      throw GrammarError(p.rule_id + ": bad lhs");
    }
    if (symbols_[p.lhs].is_leaf()) throw GrammarError(p.rule_id + ": leaf symbol as lhs");
    alternatives_[p.lhs].push_back(static_cast<int>(pi));
    const Symbol& lhs = symbols_[p.lhs];

    auto occ_symbol = [&](int occ) -> const Symbol& {
      if (occ == kLhs) return lhs;
      if (occ < 0 || occ >= static_cast<int>(p.rhs.size())) {
        throw GrammarError(p.rule_id + ": occurrence " + std::to_string(occ) + " out of range");
      }
      return symbols_[p.rhs[occ]];
    };

    // methodRetType is copied down implicitly wherever no equation sets it.
    for (size_t c = 0; c < p.rhs.size(); ++c) {
      const Symbol& child = symbols_[p.rhs[c]];
      if (!child.declares_inherited(Attr::kMethodRetType) ||
          !lhs.declares_inherited(Attr::kMethodRetType)) {
        continue;
      }
      bool explicit_eq = std::any_of(p.equations.begin(), p.equations.end(), [&](const Equation& e) {
        return e.target.occ == static_cast<int>(c) && e.target.attr == Attr::kMethodRetType;
      });
      if (!explicit_eq) {
        p.equations.push_back({{static_cast<int>(c), Attr::kMethodRetType},
                               {{kLhs, Attr::kMethodRetType}},
                               [](EqArgs& a) { return a.raw(0); }});
      }
    }

    p.child_equations.assign(p.rhs.size(), {});
    p.lhs_equations.clear();
    for (size_t ei = 0; ei < p.equations.size(); ++ei) {
      const Equation& e = p.equations[ei];
      const Symbol& ts = occ_symbol(e.target.occ);
      if (e.target.occ == kLhs) {
        if (!ts.declares_synthesized(e.target.attr)) {
          throw GrammarError(p.rule_id + ": target " + occurrence_name(pi, kLhs) + "." +
                             attr_name(e.target.attr) + " is not a synthesized attribute");
        }
        p.lhs_equations.push_back(static_cast<int>(ei));
      } else {
        if (!ts.declares_inherited(e.target.attr)) {
          throw GrammarError(p.rule_id + ": target " + occurrence_name(pi, e.target.occ) + "." +
                             attr_name(e.target.attr) + " is not an inherited attribute");
        }
        p.child_equations[e.target.occ].push_back(static_cast<int>(ei));
      }
      for (const AttrRef& in : e.inputs) {
        const Symbol& is = occ_symbol(in.occ);
        if (!is.declares_inherited(in.attr) && !is.declares_synthesized(in.attr)) {
          throw GrammarError(p.rule_id + ": input " + occurrence_name(pi, in.occ) + "." +
                             attr_name(in.attr) + " is not declared");
        }
      }
      if (!e.fn) throw GrammarError(p.rule_id + ": equation without a function");
    }

    // Every output attribute is defined exactly once.
    auto count_targets = [&](int occ, Attr a) {
      return std::count_if(p.equations.begin(), p.equations.end(), [&](const Equation& e) {
        return e.target.occ == occ && e.target.attr == a;
      });
    };
    for (Attr a : lhs.synthesized) {
      if (count_targets(kLhs, a) != 1) {
        throw GrammarError(p.rule_id + ": " + occurrence_name(pi, kLhs) + "." + attr_name(a) +
                           " must be defined exactly once");
      }
    }
    for (size_t c = 0; c < p.rhs.size(); ++c) {
      for (Attr a : symbols_[p.rhs[c]].inherited) {
        if (count_targets(static_cast<int>(c), a) != 1) {
          throw GrammarError(p.rule_id + ": " + occurrence_name(pi, static_cast<int>(c)) + "." +
                             attr_name(a) + " must be defined exactly once");
        }
      }
    }
  }

  leaf_alternatives_.assign(symbols_.size(), {});
  for (size_t s = 0; s < symbols_.size(); ++s) {
    const Symbol& sym = symbols_[s];
    if (!sym.is_leaf() && alternatives_[s].empty()) {
      throw GrammarError("nonterminal " + sym.name + " has no production");
    }
    auto& alts = leaf_alternatives_[s];
    switch (sym.leaf) {
      case LeafKind::kType:
        for (const auto& t : registry().types()) alts.emplace_back(t);
        break;
      case LeafKind::kVar:
        for (const auto& v : ns_.all()) alts.emplace_back(v);
        break;
      case LeafKind::kApi:
        for (const auto& n : registry().callable_names()) alts.emplace_back(ApiRef{n});
        break;
      case LeafKind::kNone: break;
    }
  }

  // Minimum derivation heights by fixpoint.
  const int kInf = INT_MAX / 4;
  min_height_sym_.assign(symbols_.size(), kInf);
  min_height_rule_.assign(productions_.size(), kInf);
  for (size_t s = 0; s < symbols_.size(); ++s) {
    if (symbols_[s].is_leaf()) min_height_sym_[s] = 1;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t pi = 0; pi < productions_.size(); ++pi) {
      int h = 1;
      for (SymbolId r : productions_[pi].rhs) h = std::max(h, 1 + min_height_sym_[r]);
      if (h < min_height_rule_[pi]) {
        min_height_rule_[pi] = h;
        changed = true;
      }
      if (h < min_height_sym_[productions_[pi].lhs]) {
        min_height_sym_[productions_[pi].lhs] = h;
        changed = true;
      }
    }
  }

  // reach[a][b]: b derivable from a in one or more steps.
  size_t n = symbols_.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& p : productions_) {
    for (SymbolId r : p.rhs) reach[p.lhs][r] = true;
  }
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  recursive_.assign(productions_.size(), false);
  for (size_t pi = 0; pi < productions_.size(); ++pi) {
    const auto& p = productions_[pi];
    for (SymbolId r : p.rhs) {
      if (r == p.lhs || reach[r][p.lhs]) recursive_[pi] = true;
    }
  }
  finalized_ = true;
}

std::vector<Violation> check_l_attributed(const GrammarSpec& g) {
  std::vector<Violation> out;
  for (size_t pi = 0; pi < g.num_productions(); ++pi) {
    const Production& p = g.production(static_cast<int>(pi));
    const Symbol& lhs = g.symbol(p.lhs);
    for (const Equation& e : p.equations) {
      bool ok = true;
      for (const AttrRef& in : e.inputs) {
        if (in.occ == kLhs) {
          if (!lhs.declares_inherited(in.attr)) ok = false;
          continue;
        }
        const Symbol& cs = g.symbol(p.rhs.at(in.occ));
        if (!cs.declares_synthesized(in.attr)) {
          ok = false;
        } else if (e.target.occ != kLhs && in.occ >= e.target.occ) {
          ok = false;
        }
      }
      if (!ok) {
        out.push_back({p.rule_id, g.occurrence_name(static_cast<int>(pi), e.target.occ) + "." +
                                      attr_name(e.target.attr)});
      }
    }
  }
  return out;
}

std::string leaf_key(const LeafPayload& p) {
  switch (p.index()) {
    case 1: return std::get<TypeName>(p);
    case 2: return to_string(std::get<VarId>(p));
    case 3: return std::get<ApiRef>(p).name;
  }
  return "";
}

bool is_primitive(const TypeName& t) {
  static const std::array<const char*, 7> kPrims = {"int",    "boolean", "char", "long",
                                                    "double", "float",   "void"};
  return std::any_of(kPrims.begin(), kPrims.end(), [&](const char* p) { return t == p; });
}

}  // namespace nag
