#include "nag/fidelity.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace nag {

namespace {

using Paths = std::set<CallSeq>;

class SeqWalker {
 public:
  SeqWalker(const GrammarSpec& g, size_t cap) : g_(g), cap_(cap) {}

  Paths walk(const AstNode& n) {
    const Symbol& s = g_.symbol(n.symbol);
    if (s.is_leaf()) {
      if (s.leaf == LeafKind::kApi) return {{std::get<ApiRef>(n.leaf).name}};
      return {{}};
    }
    const std::string& r = g_.production(n.rule).rule_id;
    if (r == "b2") return {{constructor_key(std::get<TypeName>(n.children[2].leaf))}};
    if (r == "c2") return product(walk(n.children[0]), unite(walk(n.children[1]), walk(n.children[2])));
    if (r == "c3") return product(walk(n.children[0]), unite({{}}, walk(n.children[1])));
    if (r == "c4") {
      const Paths body = walk(n.children[0]);
      Paths out = body;
      for (const AstNode* c = &n.children[1]; !c->children.empty(); c = &c->children[3]) {
        out = unite(out, product(body, walk(c->children[2])));
      }
      return out;
    }
    Paths acc{{}};
    for (const auto& c : n.children) acc = product(acc, walk(c));
    return acc;
  }

 private:
  Paths product(const Paths& a, const Paths& b) {
    if (a.size() * b.size() > cap_) overflow(a.size() * b.size());
    Paths out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        CallSeq s = x;
        s.insert(s.end(), y.begin(), y.end());
        out.insert(std::move(s));
      }
    }
    return out;
  }
  Paths unite(Paths a, const Paths& b) {
    a.insert(b.begin(), b.end());
    if (a.size() > cap_) overflow(a.size());
    return a;
  }
  [[noreturn]] void overflow(size_t n) const {
    throw DataError("api_call_sequences: " + std::to_string(n) + " paths exceed the cap of " + std::to_string(cap_));
  }

  const GrammarSpec& g_;
  size_t cap_;
};

void collect_calls(const AstNode& n, const GrammarSpec& g, std::set<std::string>& out) {
  const Symbol& s = g.symbol(n.symbol);
  if (s.leaf == LeafKind::kApi) out.insert(std::get<ApiRef>(n.leaf).name);
  if (n.rule >= 0 && g.production(n.rule).rule_id == "b2") {
    out.insert(constructor_key(std::get<TypeName>(n.children[2].leaf)));
  }
  for (const auto& c : n.children) collect_calls(c, g, out);
}

std::string label(const AstNode& n, const GrammarSpec& g) {
  const Symbol& s = g.symbol(n.symbol);
  switch (s.leaf) {
    case LeafKind::kVar: {
      static const char* kinds[] = {"formal", "field", "local", "literal"};
      return s.name + ":" + kinds[static_cast<int>(std::get<VarId>(n.leaf).kind)];
    }
    case LeafKind::kType: return s.name + ":" + std::get<TypeName>(n.leaf);
    case LeafKind::kApi: return s.name + ":" + std::get<ApiRef>(n.leaf).name;
    case LeafKind::kNone: break;
  }
  return s.name + "#" + g.production(n.rule).rule_id;
}

void collect_paths(const AstNode& n, const GrammarSpec& g, LabelPath& cur, std::set<LabelPath>& out,
                   size_t cap) {
  cur.push_back(label(n, g));
  if (n.children.empty()) {
    out.insert(cur);
    if (out.size() > cap) {
      throw DataError("program_paths: more than " + std::to_string(cap) + " paths");
    }
  }
  for (const auto& c : n.children) collect_paths(c, g, cur, out, cap);
  cur.pop_back();
}

void renumber(AstNode& n, std::map<int, int>& m) {
  if (auto* v = std::get_if<VarId>(&n.leaf); v && v->kind == VarKind::kLocal) {
    auto it = m.find(v->index);
    if (it == m.end()) it = m.emplace(v->index, static_cast<int>(m.size())).first;
    v->index = it->second;
  }
  for (auto& c : n.children) renumber(c, m);
}

}  // namespace

std::set<std::string> api_call_set(const AstNode& ast, const GrammarSpec& g) {
  std::set<std::string> out;
  collect_calls(ast, g, out);
  return out;
}

std::set<CallSeq> api_call_sequences(const AstNode& ast, const GrammarSpec& g, size_t cap) {
  return SeqWalker(g, cap).walk(ast);
}

std::set<LabelPath> program_paths(const AstNode& ast, const GrammarSpec& g, size_t cap) {
  std::set<LabelPath> out;
  LabelPath cur;
  collect_paths(ast, g, cur, out, cap);
  return out;
}

AstNode canonicalize_locals(const AstNode& ast) {
  AstNode out = ast;
  std::map<int, int> m;
  renumber(out, m);
  return out;
}

bool ast_exact_match(const AstNode& a, const AstNode& b) { return canonicalize_locals(a) == canonicalize_locals(b); }

FidelityReport fidelity_report(const std::vector<AstNode>& candidates, const AstNode& reference,
                               const GrammarSpec& g, size_t cap) {
  if (candidates.empty()) throw DataError("fidelity_report: no candidates");
  const auto ref_set = api_call_set(reference, g);
  const auto ref_seq = api_call_sequences(reference, g, cap);
  const auto ref_paths = program_paths(reference, g, cap);
  const AstNode ref_canon = canonicalize_locals(reference);
  FidelityReport r;
  for (const auto& c : candidates) {
    r.api_call_set = std::max(r.api_call_set, jaccard(api_call_set(c, g), ref_set));
    r.api_call_sequences = std::max(r.api_call_sequences, jaccard(api_call_sequences(c, g, cap), ref_seq));
    r.program_paths = std::max(r.program_paths, jaccard(program_paths(c, g, cap), ref_paths));
    if (canonicalize_locals(c) == ref_canon) r.ast_exact_match = 1.0;
  }
  return r;
}

FidelityReport mean_report(const std::vector<FidelityReport>& reports) {
  FidelityReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.api_call_set += r.api_call_set;
    m.api_call_sequences += r.api_call_sequences;
    m.program_paths += r.program_paths;
    m.ast_exact_match += r.ast_exact_match;
  }
  const double n = static_cast<double>(reports.size());
  m.api_call_set /= n;
  m.api_call_sequences /= n;
  m.program_paths /= n;
  m.ast_exact_match /= n;
  return m;
}

std::string format_fidelity_text(const FidelityReport& r, size_t programs) {
  std::ostringstream os;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-20s %zu\n", "programs", programs);
  os << buf;
  const std::pair<const char*, double> rows[] = {
      {"apiCallSet", r.api_call_set},
      {"apiCallSequences", r.api_call_sequences},
      {"programPaths", r.program_paths},
      {"astExactMatch", r.ast_exact_match},
  };
  for (const auto& [name, v] : rows) {
    std::snprintf(buf, sizeof(buf), "%-20s %6.2f\n", name, 100.0 * v);
    os << buf;
  }
  return os.str();
}

}  // namespace nag
