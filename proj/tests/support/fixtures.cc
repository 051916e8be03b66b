#include "fixtures.h"

#include <algorithm>

#include "nag/corpus.h"

namespace nag::testing {

namespace {

ApiSignature sig(std::string name, std::optional<TypeName> recv, TypeName ret, TypeList params) {
  ApiSignature s;
  s.name = std::move(name);
  s.receiver_type = std::move(recv);
  s.return_type = std::move(ret);
  s.param_types = std::move(params);
  return s;
}

AstNode expand(const GrammarSpec& g, SymbolId sym, Rng& rng, int depth, size_t& budget) {
  AstNode n;
  n.symbol = sym;
  if (budget > 0) --budget;
  const Symbol& s = g.symbol(sym);
  if (s.is_leaf()) {
    const auto& alts = g.leaf_alternatives(sym);
    n.leaf = alts[rng.below(alts.size())];
    return n;
  }
  const auto& alts = g.alternatives(sym);
  int pick = alts[rng.below(alts.size())];
  if (budget < 12 || depth > 8) {
    int best = INT32_MAX;
    std::vector<int> lowest;
    for (int a : alts) {
      const int h = g.min_height_rule(a);
      if (h < best) {
        best = h;
        lowest.clear();
      }
      if (h == best) lowest.push_back(a);
    }
    pick = lowest[rng.below(lowest.size())];
  }
  n.rule = pick;
  for (SymbolId c : g.production(pick).rhs) n.children.push_back(expand(g, c, rng, depth + 1, budget));
  return n;
}

}  // namespace

std::shared_ptr<const ApiRegistry> writer_registry() {
  auto r = std::make_shared<ApiRegistry>();
  r->add(sig(constructor_key("FileWriter"), std::nullopt, "FileWriter", {"File"}));
  r->add(sig(constructor_key("File"), std::nullopt, "File", {"String"}));
  r->add(sig(constructor_key("IOException"), std::nullopt, "IOException", {}));
  r->add(sig("write", "FileWriter", kVoid, {"String"}));
  r->add(sig("close", "FileWriter", kVoid, {}));
  r->add(sig("printStackTrace", "IOException", kVoid, {}));
  r->add(sig("getMessage", "IOException", "String", {}));
  r->add(sig("println", std::nullopt, kVoid, {"String"}));
  r->add(sig("exists", "File", "boolean", {}));
  r->add(sig("getName", "File", "String", {}));
  r->add(sig("length", "String", "int", {}));
  r->add(sig("concat", "String", "String", {"String"}));
  r->add(sig("isEmpty", "String", "boolean", {}));
  r->add(sig("valueOf", std::nullopt, "String", {"int"}));
  return r;
}

std::shared_ptr<const GrammarSpec> writer_grammar() {
  return std::make_shared<const GrammarSpec>(java_subset_grammar(writer_registry()));
}

std::shared_ptr<const GrammarSpec> small_grammar() {
  JavaGrammarOptions opts;
  opts.namespaces = {3, 2, 3};
  return std::make_shared<const GrammarSpec>(java_subset_grammar(writer_registry(), opts));
}

std::shared_ptr<const GrammarSpec> synth_grammar() {
  static const auto g = std::make_shared<const GrammarSpec>(
      java_subset_grammar(std::make_shared<const ApiRegistry>(synthetic_registry())));
  return g;
}

MethodContext writer_context(bool with_field) {
  MethodContext ctx;
  ctx.name = "write";
  ctx.method_ret_type = kVoid;
  ctx.formals = {{{VarKind::kFormal, 0}, "File"}, {{VarKind::kFormal, 1}, "String"}};
  ctx.display_names[{VarKind::kFormal, 0}] = "f";
  ctx.display_names[{VarKind::kFormal, 1}] = "str";
  if (with_field) {
    ctx.fields = {{{VarKind::kField, 0}, "String"}};
    ctx.display_names[{VarKind::kField, 0}] = "err";
  }
  return ctx;
}

const char* const kWriterBody =
    "(Start#a1 (Stmt#a2a"
    " (Stmt#c1.c (Except#c4"
    "  (Stmt#a2a"
    "   (Stmt#a4 (ObjInit#b2 (Type FileWriter) (Var local 0) (Type FileWriter)"
    "     (ArgList#b6a (Var formal 0) (ArgList#b6b))))"
    "   (Stmt#a2a"
    "    (Stmt#a5 (Invoke#b3 (Call#b5 (Api write) (ArgList#b6a (Var formal 1) (ArgList#b6b)))"
    "      (InvokeMore#b4b) (Var local 0) (Var literal 0)))"
    "    (Stmt#a2b)))"
    "  (Catch#c5a (Type IOException) (Var local 0)"
    "   (Stmt#a2a"
    "    (Stmt#a5 (Invoke#b3 (Call#b5 (Api printStackTrace) (ArgList#b6b))"
    "      (InvokeMore#b4b) (Var local 0) (Var literal 0)))"
    "    (Stmt#a2a"
    "     (Stmt#a5 (Invoke#b3 (Call#b5 (Api println) (ArgList#b6a (Var literal 0) (ArgList#b6b)))"
    "       (InvokeMore#b4b) (Var literal 0) (Var literal 0)))"
    "     (Stmt#a2b)))"
    "   (Catch#c5b))))"
    " (Stmt#a2a (Stmt#a6 (Return#b7 (Var literal 0))) (Stmt#a2b))))";

AstNode random_ast(const GrammarSpec& g, Rng& rng, size_t max_nodes) {
  for (;;) {
    size_t budget = max_nodes;
    AstNode n = expand(g, g.start(), rng, 1, budget);
    if (node_count(n) <= max_nodes) return n;
  }
}

MethodContext random_context(const GrammarSpec& g, Rng& rng) {
  std::vector<TypeName> types;
  for (const auto& t : g.registry().types()) {
    if (t != kVoid) types.push_back(t);
  }
  auto pick_type = [&] { return types[rng.below(types.size())]; };
  MethodContext ctx;
  ctx.name = "m";
  const auto& ns = g.namespaces();
  for (int i = 0; i < ns.formals; ++i) {
    if (rng.uniform() < 0.6) ctx.formals.push_back({{VarKind::kFormal, i}, pick_type()});
  }
  for (int i = 0; i < ns.fields; ++i) {
    if (rng.uniform() < 0.5) ctx.fields.push_back({{VarKind::kField, i}, pick_type()});
  }
  ctx.method_ret_type = rng.uniform() < 0.4 ? TypeName(kVoid) : pick_type();
  return ctx;
}

}  // namespace nag::testing
