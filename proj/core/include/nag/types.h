#ifndef NAG_TYPES_H_
#define NAG_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nag {

// Type equality is string equality; there is no subtype lattice.
using TypeName = std::string;
using TypeList = std::vector<TypeName>;

inline constexpr const char* kVoid = "void";

enum class VarKind : uint8_t { kFormal = 0, kField = 1, kLocal = 2, kLiteral = 3 };

const char* var_kind_name(VarKind k);
std::optional<VarKind> parse_var_kind(const std::string& s);

struct VarId {
  VarKind kind = VarKind::kLocal;
  int index = 0;

  static VarId literal() { return {VarKind::kLiteral, 0}; }
  bool is_literal() const { return kind == VarKind::kLiteral; }

  friend bool operator==(const VarId&, const VarId&) = default;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

// "local 3", "formal 0", "literal 0".
std::string to_string(const VarId& v);

struct NamespaceSizes {
  int formals = 10;
  int fields = 10;
  int locals = 10;

  int size_of(VarKind k) const;
  bool contains(const VarId& v) const;
  // Every VarId the grammar can produce, in kind-major order, literal last.
  std::vector<VarId> all() const;
};

struct ApiSignature {
  std::string name;
  std::optional<TypeName> receiver_type;  // none for internal and static methods
  TypeName return_type;
  TypeList param_types;
  bool is_internal = false;
};

// Ordered map VarId -> TypeName, insertion-ordered. Rebinding an existing
// key replaces the type in place.
class SymTab {
 public:
  using Entry = std::pair<VarId, TypeName>;

  void bind(const VarId& v, const TypeName& t);
  const TypeName* find(const VarId& v) const;
  bool contains(const VarId& v) const { return find(v) != nullptr; }
  // this + delta: delta's bindings applied in order.
  SymTab plus(const SymTab& delta) const;

  const std::vector<Entry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const SymTab&, const SymTab&) = default;

 private:
  std::vector<Entry> entries_;
};

// The attrIn/attrOut flag bundle.
struct Flags {
  std::map<VarId, bool> is_initialized;
  std::map<VarId, bool> is_used;
  bool ret_stmt_generated = false;
  std::pair<bool, bool> itr_vec{false, false};

  bool initialized(const VarId& v) const;
  bool used(const VarId& v) const;

  friend bool operator==(const Flags&, const Flags&) = default;
};

enum class CheckKind : uint8_t {
  kUndeclaredVarAccess = 0,
  kFormalParamAccess,
  kClassVarAccess,
  kUninitializedObjects,
  kVariableAccessAgg,
  kObjectMethodCompat,
  kReturnTypeAtCallSite,
  kActualParamType,
  kReturnStmtType,
  kTypeErrorsAgg,
  kReturnStmtExists,
  kUnusedVariables,
  kParses,
};
inline constexpr int kNumCheckKinds = 13;

const char* check_name(CheckKind k);
std::optional<CheckKind> parse_check_name(const std::string& s);

// One validity-conjunct or checker site.
struct CheckEvent {
  CheckKind kind;
  int node = -1;  // pre-order index of the node owning the site
  bool pass = false;
  std::string rule_id;

  friend bool operator==(const CheckEvent&, const CheckEvent&) = default;
};

class NagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that fails to parse or violates a data invariant.
class DataError : public NagError {
 public:
  using NagError::NagError;
};

// A grammar encoding bug: an equation read an attribute nobody computed.
class GrammarError : public NagError {
 public:
  using NagError::NagError;
};

}  // namespace nag

#endif  // NAG_TYPES_H_
