#include "nag/types.h"

#include <array>

namespace nag {

namespace {

constexpr std::array<const char*, kNumCheckKinds> kCheckNames = {
    "undeclaredVarAccess", "formalParamAccess",    "classVarAccess",
    "uninitializedObjects", "variableAccessAgg",   "objectMethodCompat",
    "returnTypeAtCallSite", "actualParamType",     "returnStmtType",
    "typeErrorsAgg",        "returnStmtExists",    "unusedVariables",
    "parses",
};

}  // namespace

const char* var_kind_name(VarKind k) {
  switch (k) {
    case VarKind::kFormal: return "formal";
    case VarKind::kField: return "field";
    case VarKind::kLocal: return "local";
    case VarKind::kLiteral: return "literal";
  }
  return "?";
}

std::optional<VarKind> parse_var_kind(const std::string& s) {
  if (s == "formal") return VarKind::kFormal;
  if (s == "field") return VarKind::kField;
  if (s == "local") return VarKind::kLocal;
  if (s == "literal") return VarKind::kLiteral;
  return std::nullopt;
}

std::string to_string(const VarId& v) {
  return std::string(var_kind_name(v.kind)) + " " + std::to_string(v.index);
}

int NamespaceSizes::size_of(VarKind k) const {
  switch (k) {
    case VarKind::kFormal: return formals;
    case VarKind::kField: return fields;
    case VarKind::kLocal: return locals;
    case VarKind::kLiteral: return 1;
  }
  return 0;
}

bool NamespaceSizes::contains(const VarId& v) const {
  return v.index >= 0 && v.index < size_of(v.kind);
}

std::vector<VarId> NamespaceSizes::all() const {
  std::vector<VarId> out;
  for (VarKind k : {VarKind::kFormal, VarKind::kField, VarKind::kLocal}) {
    for (int i = 0; i < size_of(k); ++i) out.push_back({k, i});
  }
  out.push_back(VarId::literal());
  return out;
}

void SymTab::bind(const VarId& v, const TypeName& t) {
  for (auto& e : entries_) {
    if (e.first == v) {
      e.second = t;
      return;
    }
  }
  entries_.emplace_back(v, t);
}

const TypeName* SymTab::find(const VarId& v) const {
  for (const auto& e : entries_) {
    if (e.first == v) return &e.second;
  }
  return nullptr;
}

SymTab SymTab::plus(const SymTab& delta) const {
  SymTab out = *this;
  for (const auto& [v, t] : delta.entries_) out.bind(v, t);
  return out;
}

bool Flags::initialized(const VarId& v) const {
  auto it = is_initialized.find(v);
  return it != is_initialized.end() && it->second;
}

bool Flags::used(const VarId& v) const {
  auto it = is_used.find(v);
  return it != is_used.end() && it->second;
}

const char* check_name(CheckKind k) { return kCheckNames[static_cast<int>(k)]; }

std::optional<CheckKind> parse_check_name(const std::string& s) {
  for (int i = 0; i < kNumCheckKinds; ++i) {
    if (s == kCheckNames[i]) return static_cast<CheckKind>(i);
  }
  return std::nullopt;
}

}  // namespace nag
