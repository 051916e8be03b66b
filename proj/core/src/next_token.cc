#include <cstdio>
#include <sstream>

#include "nag/model.h"

namespace nag {

namespace {

void walk(const AstNode& n, const GrammarSpec& g, const std::string& parent_rule, int position, int ordinal,
          const AnnotatedAst& a, size_t& pre, const std::shared_ptr<std::vector<std::string>>& seq,
          const std::shared_ptr<const EvidenceSet>& evidence, std::vector<TrainingExample>& out) {
  TrainingExample ex;
  ex.sequence = seq;
  ex.index = pre;
  ex.symbol = n.symbol;
  ex.target = n.rule >= 0 ? g.production(n.rule).rule_id : leaf_key(n.leaf);
  ex.parent_rule = parent_rule;
  ex.position = position;
  ex.stmt_ordinal = ordinal;
  ex.inherited = a.nodes.at(pre).inh;
  ex.evidence = evidence;
  seq->push_back(ex.target);
  out.push_back(std::move(ex));
  ++pre;
  if (n.rule < 0) return;
  const std::string& rid = g.production(n.rule).rule_id;
  for (size_t i = 0; i < n.children.size(); ++i) {
    const SymbolId child = n.children[i].symbol;
    walk(n.children[i], g, rid, static_cast<int>(i), child_stmt_ordinal(g, child, rid, static_cast<int>(i), ordinal),
         a, pre, seq, evidence, out);
  }
}

}  // namespace

std::vector<TrainingExample> examples_from_annotated(const AnnotatedAst& a, const GrammarSpec& g,
                                                     std::shared_ptr<const EvidenceSet> evidence) {
  std::vector<TrainingExample> out;
  auto seq = std::make_shared<std::vector<std::string>>();
  size_t pre = 0;
  walk(a.ast, g, "", 0, child_stmt_ordinal(g, a.ast.symbol, "", 0, -1), a, pre, seq, evidence, out);
  return out;
}

std::vector<std::string> site_categories(const GrammarSpec& g, SymbolId sym, const std::string& parent_rule,
                                         int position) {
  std::vector<std::string> out;
  const Symbol& s = g.symbol(sym);
  if (!s.is_leaf()) return out;
  out.push_back("allTerminals");
  switch (s.leaf) {
    case LeafKind::kApi: out.push_back("apiCalls"); break;
    case LeafKind::kType:
      out.push_back(parent_rule == "b2" && position == 2 ? "objectInit" : "types");
      break;
    case LeafKind::kVar:
      if ((parent_rule == "b3" && (position == 2 || position == 3)) || (parent_rule == "b6a" && position == 0) ||
          (parent_rule == "b7" && position == 0)) {
        out.push_back("variableAccess");
      }
      break;
    case LeafKind::kNone: break;
  }
  return out;
}

NextTokenReport next_token_eval(const ConditionalModel& m, const GrammarSpec& g,
                                const std::vector<AnnotatedMethod>& corpus, uint64_t seed) {
  NextTokenReport r;
  for (const char* c : {"apiCalls", "objectInit", "types", "variableAccess", "allTerminals"}) r.categories[c];
  Rng rng(seed);
  const Vocabulary vocab = Vocabulary::from_grammar(g);
  const AlternativeTable& alts = m.alternatives();
  for (const auto& method : corpus) {
    if (!method.ast) continue;
    std::shared_ptr<const EvidenceSet> ev;
    if (method.evidence) ev = std::shared_ptr<const EvidenceSet>(method.evidence, [](const EvidenceSet*) {});
    std::vector<double> z;
    if (m.uses_latent()) {
      const auto& lm = static_cast<const LatentModel&>(m);
      z = posterior(encode_evidence(ev ? *ev : EvidenceSet{}, lm.encoder()), lm.encoder()).mean;
    }
    for (const auto& ex : examples_from_annotated(*method.ast, g, ev)) {
      const auto f = encode_context(ex.site(), ex.inherited, vocab, m.use_attributes());
      const auto p = m.predict(f, m.uses_latent() ? &z : nullptr);
      double best = -1;
      std::vector<size_t> ties;
      for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] > best) {
          best = p[i];
          ties.assign(1, i);
        } else if (p[i] == best) {
          ties.push_back(i);
        }
      }
      const size_t pick = ties.size() == 1 ? ties[0] : ties[rng.below(ties.size())];
      const bool ok = alts.keys(ex.symbol)[pick] == ex.target;
      auto count = [&](AccuracyCell& c) {
        c.total += 1;
        c.correct += ok ? 1 : 0;
      };
      count(r.per_symbol[g.symbol(ex.symbol).name]);
      for (const auto& c : site_categories(g, ex.symbol, ex.parent_rule, ex.position)) count(r.categories[c]);
    }
  }
  return r;
}

std::string format_next_token_report(const NextTokenReport& r) {
  std::ostringstream out;
  char buf[64];
  for (const auto& [name, c] : r.categories) {
    std::snprintf(buf, sizeof(buf), "%.4f", c.accuracy());
    out << "category\t" << name << '\t' << c.correct << '\t' << c.total << '\t' << buf << '\n';
  }
  for (const auto& [name, c] : r.per_symbol) {
    std::snprintf(buf, sizeof(buf), "%.4f", c.accuracy());
    out << "symbol\t" << name << '\t' << c.correct << '\t' << c.total << '\t' << buf << '\n';
  }
  return out.str();
}

}  // namespace nag
