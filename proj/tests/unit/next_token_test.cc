#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.h"
#include "nag/corpus.h"
#include "nag/model.h"

namespace nag {
namespace {

struct Corpus {
  std::shared_ptr<const GrammarSpec> g = testing::synth_grammar();
  std::vector<ClassRecord> records;
  std::vector<AnnotatedAst> annotated;
  std::vector<AnnotatedMethod> held_out;

  explicit Corpus(int classes = 40) : records(synth_corpus({classes, 3, 21}, *g)) {
    for (const auto& c : records) {
      if (!is_held_out(c.id)) continue;
      for (const auto& m : c.methods) annotated.push_back(annotate(m.body, m.ctx, *g));
    }
    size_t i = 0;
    for (const auto& c : records) {
      if (!is_held_out(c.id)) continue;
      for (const auto& m : c.methods) held_out.push_back({&annotated[i++], &m.evidence});
    }
  }
};

TEST(SiteCategories, Positions) {
  auto g = testing::writer_grammar();
  const SymbolId var = g->symbol_id("Var"), type = g->symbol_id("Type"), api = g->symbol_id("Api");
  EXPECT_EQ(site_categories(*g, var, "b6a", 0), (std::vector<std::string>{"allTerminals", "variableAccess"}));
  EXPECT_EQ(site_categories(*g, var, "b1", 1), (std::vector<std::string>{"allTerminals"}));
  EXPECT_EQ(site_categories(*g, type, "b2", 2), (std::vector<std::string>{"allTerminals", "objectInit"}));
  EXPECT_EQ(site_categories(*g, type, "b2", 0), (std::vector<std::string>{"allTerminals", "types"}));
  EXPECT_EQ(site_categories(*g, api, "b5", 0), (std::vector<std::string>{"allTerminals", "apiCalls"}));
  EXPECT_TRUE(site_categories(*g, g->symbol_id("Stmt"), "a2a", 0).empty());
}

TEST(NextToken, SingleAlternativeSymbolsAreAlwaysRight) {
  Corpus c;
  CountModel untrained(AlternativeTable(*c.g), {});
  const auto r = next_token_eval(untrained, *c.g, c.held_out, 1);
  for (const char* s : {"Start", "Return", "Call", "Cond"}) {
    auto it = r.per_symbol.find(s);
    if (it == r.per_symbol.end()) continue;
    EXPECT_EQ(it->second.correct, it->second.total) << s;
  }
  EXPECT_GT(r.per_symbol.at("Start").total, 0);
}

TEST(NextToken, UntrainedModelIsAtChance) {
  Corpus c;
  CountModel untrained(AlternativeTable(*c.g), {});
  const auto r = next_token_eval(untrained, *c.g, c.held_out, 7);
  const AccuracyCell& v = r.categories.at("variableAccess");
  ASSERT_GT(v.total, 100);
  const double k = static_cast<double>(c.g->leaf_alternatives(c.g->symbol_id("Var")).size());
  const double p = 1.0 / k;
  const double sigma = std::sqrt(p * (1 - p) / v.total);
  EXPECT_NEAR(v.accuracy(), p, 3 * sigma);
}

TEST(NextToken, AttributesBeatBlindOnVariableAccess) {
  // Match-set keys need enough classes to cover the held-out scopes.
  Corpus c(1000);
  const auto train = extract_corpus(c.records, *c.g, Split::kTrain);
  const auto att = train_count(train, *c.g, {0.1, true});
  const auto blind = train_count(train, *c.g, {0.1, false});
  const auto ra = next_token_eval(*att, *c.g, c.held_out, 3);
  const auto rb = next_token_eval(*blind, *c.g, c.held_out, 3);
  EXPECT_GE(ra.categories.at("variableAccess").accuracy(), rb.categories.at("variableAccess").accuracy());
  EXPECT_GT(ra.categories.at("variableAccess").accuracy(), 0.9);
}

TEST(NextToken, ReportFormatListsCategories) {
  Corpus c;
  CountModel untrained(AlternativeTable(*c.g), {});
  const std::string s = format_next_token_report(next_token_eval(untrained, *c.g, c.held_out, 1));
  for (const char* cat : {"apiCalls", "objectInit", "types", "variableAccess", "allTerminals"}) {
    EXPECT_NE(s.find(cat), std::string::npos) << cat;
  }
}

TEST(Examples, OnePerNodeInPreorder) {
  auto g = testing::writer_grammar();
  const AstNode ast = parse_ast(testing::kWriterBody, *g);
  const AnnotatedAst a = annotate(ast, testing::writer_context(false), *g);
  const auto ex = examples_from_annotated(a, *g, nullptr);
  ASSERT_EQ(ex.size(), node_count(ast));
  EXPECT_EQ(g->symbol(ex[0].symbol).name, "Start");
  EXPECT_EQ(ex[0].target, "a1");
  EXPECT_EQ(ex[0].parent_rule, "");
  EXPECT_EQ(ex[0].inherited, initial_attributes(testing::writer_context(false)));
  const auto order = preorder(ast);
  for (size_t i = 0; i < ex.size(); ++i) {
    EXPECT_EQ(ex[i].index, i);
    EXPECT_EQ(ex[i].symbol, order[i]->symbol);
    EXPECT_EQ((*ex[i].sequence)[i], ex[i].target);
  }
}

}  // namespace
}  // namespace nag
