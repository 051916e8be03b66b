#ifndef NAG_GRAMMAR_H_
#define NAG_GRAMMAR_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nag/registry.h"
#include "nag/types.h"

namespace nag {

enum class Attr : uint8_t {
  kSymTab = 0,
  kSymTabOut,
  kAttrIn,
  kAttrOut,
  kMethodRetType,
  kTypeList,
  kExprType,
  kExpType,
  kValid,
  kRetType,
  kParams,
  kName,
  kId,
};
inline constexpr int kNumAttrs = 13;

const char* attr_name(Attr a);
std::optional<Attr> parse_attr_name(const std::string& s);

// monostate doubles as the "none" type (e.g. exprType of an internal call).
using AttrValue = std::variant<std::monostate, SymTab, Flags, TypeName, TypeList, bool, VarId>;

std::string format_attr_value(const AttrValue& v);

// Bundle of attribute values for one node and one direction.
class SemState {
 public:
  bool has(Attr a) const { return (present_ >> static_cast<int>(a)) & 1u; }
  const AttrValue& get(Attr a) const;  // throws GrammarError when absent
  void set(Attr a, AttrValue v);

  // Typed accessors; each throws GrammarError on absence or a type mismatch.
  const SymTab& symtab(Attr a) const;
  const Flags& flags(Attr a) const;
  std::optional<TypeName> type(Attr a) const;  // nullopt for "none"
  const TypeList& types(Attr a) const;
  bool boolean(Attr a) const;
  const VarId& var(Attr a) const;

  std::vector<Attr> attrs() const;

  friend bool operator==(const SemState&, const SemState&) = default;

 private:
  std::array<AttrValue, kNumAttrs> values_{};
  uint16_t present_ = 0;
};

using SymbolId = int;

enum class LeafKind : uint8_t { kNone, kType, kVar, kApi };

struct ApiRef {
  std::string name;
  friend bool operator==(const ApiRef&, const ApiRef&) = default;
  friend auto operator<=>(const ApiRef&, const ApiRef&) = default;
};

using LeafPayload = std::variant<std::monostate, TypeName, VarId, ApiRef>;

struct Symbol {
  std::string name;
  LeafKind leaf = LeafKind::kNone;  // leaves carry a payload instead of a production
  std::vector<Attr> inherited;
  std::vector<Attr> synthesized;

  bool is_leaf() const { return leaf != LeafKind::kNone; }
  bool declares_inherited(Attr a) const;
  bool declares_synthesized(Attr a) const;
};

inline constexpr int kLhs = -1;

// An attribute occurrence: occ = kLhs or a 0-based rhs position.
struct AttrRef {
  int occ = kLhs;
  Attr attr = Attr::kValid;
  friend bool operator==(const AttrRef&, const AttrRef&) = default;
};

// Arguments handed to an equation function.
class EqArgs {
 public:
  EqArgs(const std::vector<const AttrValue*>& in, std::vector<CheckEvent>* trace,
         const std::string& rule_id, int node)
      : in_(in), trace_(trace), rule_id_(rule_id), node_(node) {}

  const AttrValue& raw(size_t i) const { return *in_.at(i); }
  const SymTab& symtab(size_t i) const;
  const Flags& flags(size_t i) const;
  std::optional<TypeName> type(size_t i) const;
  const TypeList& types(size_t i) const;
  bool boolean(size_t i) const;
  const VarId& var(size_t i) const;

  // Records a validity-conjunct site and returns pass.
  bool check(CheckKind kind, bool pass);

 private:
  const std::vector<const AttrValue*>& in_;
  std::vector<CheckEvent>* trace_;
  const std::string& rule_id_;
  int node_;
};

using EqFn = std::function<AttrValue(EqArgs&)>;

struct Equation {
  AttrRef target;
  std::vector<AttrRef> inputs;
  EqFn fn;
};

struct Production {
  std::string rule_id;
  SymbolId lhs = -1;
  std::vector<SymbolId> rhs;
  std::vector<Equation> equations;

  // Filled by GrammarSpec::finalize: equation indices per rhs child
  // (inherited targets) and for the lhs (synthesized targets).
  std::vector<std::vector<int>> child_equations;
  std::vector<int> lhs_equations;
};

class GrammarSpec;

// Computes a leaf's synthesized attributes from its payload (rules d1-d4).
using LeafFn = std::function<SemState(const LeafPayload&, const SemState& inh, const GrammarSpec&)>;

struct Violation {
  std::string rule_id;
  std::string target;  // e.g. "Stmt$1.symTab"
  friend bool operator==(const Violation&, const Violation&) = default;
};

class GrammarSpec {
 public:
  SymbolId add_symbol(Symbol s);
  int add_production(Production p);
  void set_start(SymbolId s) { start_ = s; }
  void set_leaf_fn(SymbolId s, LeafFn fn);
  void set_registry(std::shared_ptr<const ApiRegistry> reg) { registry_ = std::move(reg); }
  void set_namespaces(NamespaceSizes ns) { ns_ = ns; }

  // Adds implicit copies for methodRetType, validates declarations,
  // builds indices. Throws GrammarError on a malformed grammar.
  void finalize();

  SymbolId start() const { return start_; }
  size_t num_symbols() const { return symbols_.size(); }
  const Symbol& symbol(SymbolId s) const { return symbols_.at(s); }
  std::optional<SymbolId> find_symbol(const std::string& name) const;
  SymbolId symbol_id(const std::string& name) const;  // throws

  size_t num_productions() const { return productions_.size(); }
  const Production& production(int i) const { return productions_.at(i); }
  std::optional<int> find_rule(const std::string& rule_id) const;
  int rule_index(const std::string& rule_id) const;  // throws
  const std::vector<int>& alternatives(SymbolId s) const { return alternatives_.at(s); }

  // Enumerated payload alternatives of a leaf symbol, in a fixed order.
  const std::vector<LeafPayload>& leaf_alternatives(SymbolId s) const {
    return leaf_alternatives_.at(s);
  }
  SemState eval_leaf(SymbolId s, const LeafPayload& p, const SemState& inh) const;

  const ApiRegistry& registry() const;
  const std::shared_ptr<const ApiRegistry>& registry_ptr() const { return registry_; }
  const NamespaceSizes& namespaces() const { return ns_; }

  // Shortest derivation height from each symbol / production (a leaf is 1).
  int min_height(SymbolId s) const { return min_height_sym_.at(s); }
  int min_height_rule(int rule) const { return min_height_rule_.at(rule); }
  // True when the lhs is reachable from some rhs symbol.
  bool is_recursive(int rule) const { return recursive_.at(rule); }

  std::string occurrence_name(int rule, int occ) const;

 private:
  std::vector<Symbol> symbols_;
  std::vector<Production> productions_;
  std::vector<std::vector<int>> alternatives_;
  std::vector<std::vector<LeafPayload>> leaf_alternatives_;
  std::vector<LeafFn> leaf_fns_;
  std::map<std::string, int> rule_by_id_;
  std::map<std::string, SymbolId> symbol_by_name_;
  std::vector<int> min_height_sym_;
  std::vector<int> min_height_rule_;
  std::vector<bool> recursive_;
  std::shared_ptr<const ApiRegistry> registry_;
  NamespaceSizes ns_;
  SymbolId start_ = -1;
  bool finalized_ = false;
};

// Every equation input must be an inherited attribute of the lhs or a
// synthesized attribute of an rhs child; when the target is the inherited
// attribute of child i, that child must lie strictly left of i.
std::vector<Violation> check_l_attributed(const GrammarSpec& g);

// Canonical key of a choice at a node: the ruleId, or the leaf payload text
// ("FileWriter", "local 3", "write").
std::string leaf_key(const LeafPayload& p);

struct JavaGrammarOptions {
  NamespaceSizes namespaces;
};

// The Java-subset attribute grammar (rules a1-a6, b1-b7, c1-c6, d1-d4).
GrammarSpec java_subset_grammar(std::shared_ptr<const ApiRegistry> registry,
                                const JavaGrammarOptions& opts = {});

// Primitive TypeNames; every other type is a reference type.
bool is_primitive(const TypeName& t);

}  // namespace nag

#endif  // NAG_GRAMMAR_H_
