#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.h"
#include "nag/checks.h"
#include "nag/corpus.h"

namespace nag {
namespace {

TEST(Synth, EveryBodyPassesAllChecks) {
  auto g = testing::synth_grammar();
  const auto records = synth_corpus({60, 3, 5}, *g);
  ASSERT_EQ(records.size(), 60u);
  for (const auto& c : records) {
    ASSERT_EQ(c.methods.size(), 3u);
    for (const auto& m : c.methods) {
      const CheckReport r = run_checks(m.body, m.ctx, *g);
      EXPECT_TRUE(r.pass_all) << serialize_ast(m.body, *g) << "\n" << format_report_tsv(r);
      EXPECT_TRUE(annotate(m.body, m.ctx, *g).valid());
    }
  }
}

TEST(Synth, SingleClass) {
  auto g = testing::synth_grammar();
  const auto records = synth_corpus({1, 1, 9}, *g);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(annotate(records[0].methods[0].body, records[0].methods[0].ctx, *g).valid());
}

TEST(Synth, DeterministicPerSeed) {
  auto g = testing::synth_grammar();
  const auto a = synth_corpus({10, 2, 3}, *g);
  const auto b = synth_corpus({10, 2, 3}, *g);
  const auto c = synth_corpus({10, 2, 4}, *g);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t k = 0; k < a[i].methods.size(); ++k) {
      EXPECT_EQ(a[i].methods[k].body, b[i].methods[k].body);
      EXPECT_EQ(a[i].methods[k].evidence, b[i].methods[k].evidence);
      differs = differs || !(a[i].methods[k].body == c[i].methods[k].body);
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Split, HeldOutDisjointFromTrain) {
  auto g = testing::synth_grammar();
  const auto records = synth_corpus({25, 2, 3}, *g);
  const size_t all = extract_corpus(records, *g, Split::kAll).size();
  const size_t train = extract_corpus(records, *g, Split::kTrain).size();
  const size_t held = extract_corpus(records, *g, Split::kHeldOut).size();
  EXPECT_EQ(train + held, all);
  EXPECT_GT(held, 0u);
  EXPECT_TRUE(is_held_out(0));
  EXPECT_TRUE(is_held_out(20));
  EXPECT_FALSE(is_held_out(7));
}

TEST(DropEvidence, Bounds) {
  EvidenceSet x;
  for (int i = 0; i < 10000; ++i) x.items.push_back({EvidenceKind::kJavadoc, {"w" + std::to_string(i)}});
  EXPECT_EQ(drop_evidence(x, 1.0, 3), x);
  EXPECT_TRUE(drop_evidence(x, 0.0, 3).empty());
  const double kept = static_cast<double>(drop_evidence(x, 0.25, 3).items.size()) / 10000.0;
  EXPECT_NEAR(kept, 0.25, 0.02);
  EXPECT_EQ(drop_evidence(x, 0.5, 8), drop_evidence(x, 0.5, 8));
  EXPECT_THROW(drop_evidence(x, 1.5, 1), DataError);
}

TEST(Corpus, WriteReadRoundTrip) {
  auto g = testing::synth_grammar();
  const auto records = synth_corpus({12, 2, 6}, *g);
  const std::string dir = ::testing::TempDir() + "nag_corpus_rt";
  std::filesystem::remove_all(dir);
  write_corpus(dir, g->registry(), records, *g);
  const ApiRegistry reg = read_corpus_registry(dir);
  EXPECT_EQ(reg.size(), g->registry().size());
  const auto back = read_corpus(dir, *g);
  ASSERT_EQ(back.size(), records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, records[i].id);
    EXPECT_EQ(back[i].fields, records[i].fields);
    ASSERT_EQ(back[i].methods.size(), records[i].methods.size());
    for (size_t k = 0; k < back[i].methods.size(); ++k) {
      EXPECT_EQ(back[i].methods[k].body, records[i].methods[k].body);
      EXPECT_EQ(back[i].methods[k].evidence, records[i].methods[k].evidence);
      EXPECT_EQ(back[i].methods[k].ctx.formals, records[i].methods[k].ctx.formals);
      EXPECT_EQ(back[i].methods[k].ctx.method_ret_type, records[i].methods[k].ctx.method_ret_type);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Context, RejectsMalformedLines) {
  std::istringstream no_class("method\t0\tm\tvoid\n");
  EXPECT_THROW(read_context(no_class), DataError);
  std::istringstream bad("class\t1\tA\nbogus\tline\n");
  EXPECT_THROW(read_context(bad), DataError);
  std::istringstream order("class\t1\tA\nmethod\t1\tm\tvoid\n");
  EXPECT_THROW(read_context(order), DataError);
}

TEST(MergeInternal, ConflictingSignatureRejected) {
  ApiRegistry base;
  ClassRecord c;
  ApiSignature s;
  s.name = "helper";
  s.return_type = "int";
  s.is_internal = true;
  c.internal_methods = {s};
  ClassRecord d = c;
  d.internal_methods[0].return_type = "String";
  EXPECT_EQ(merge_internal(base, {c, c}).size(), 1u);
  EXPECT_THROW(merge_internal(base, {c, d}), DataError);
}

TEST(ExamplesTsv, OneLinePerExample) {
  auto g = testing::synth_grammar();
  const auto records = synth_corpus({1, 1, 2}, *g);
  const auto ex = extract_examples(records[0], 0, *g);
  std::ostringstream out;
  write_examples_tsv(out, records[0].id, 0, ex, *g);
  const std::string s = out.str();
  EXPECT_EQ(static_cast<size_t>(std::count(s.begin(), s.end(), '\n')), ex.size());
  EXPECT_EQ(s.substr(0, s.find('\n')).find("0\t0\t0\tStart\ta1\t-\t0\t\t"), 0u) << s.substr(0, 80);
}

}  // namespace
}  // namespace nag
