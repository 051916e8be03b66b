#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"

namespace nag::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nag");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = ::testing::TempDir() + "nag_cli_test";
    fs::remove_all(root_);
    const Result r = run_cli({"--seed", "5", "--output", root_ + "/corpus", "synth", "--classes", "20", "--methods", "2"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const Result t = run_cli({"--output", root_, "train", "--corpus", corpus(), "--model", "m.count"});
    ASSERT_EQ(t.code, kOk) << t.err;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string corpus() { return root_ + "/corpus"; }
  static std::string model() { return root_ + "/m.count"; }

  static std::string root_;
};

std::string CliTest::root_;

TEST_F(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
}

TEST_F(CliTest, GenerateWithoutModelIsUsageError) {
  const Result r = run_cli({"generate", "--evidence", "e", "--context", "c"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("--model"), std::string::npos) << r.err;
}

TEST_F(CliTest, CheckPrintsTsvForCorpusBody) {
  const std::string cls = corpus() + "/classes/1";
  const Result r = run_cli({"check", cls + "/body_0.ast", "--context", cls + "/context.txt"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("undeclaredVarAccess\t"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("parses\t1\t1\t"), std::string::npos) << r.out;
}

TEST_F(CliTest, CheckTextFormatAndDump) {
  const std::string cls = corpus() + "/classes/1";
  const Result r =
      run_cli({"--format", "text", "check", cls + "/body_1.ast", "--context", cls + "/context.txt", "--dump-attrs"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("symTab"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsDataError) {
  const std::string cls = corpus() + "/classes/1";
  EXPECT_EQ(run_cli({"check", root_ + "/nope.ast", "--context", cls + "/context.txt"}).code, kData);
  EXPECT_EQ(run_cli({"eval-next-token", "--model", root_ + "/nope.model", "--corpus", corpus()}).code, kData);
}

TEST_F(CliTest, MalformedAstReportsParseFailure) {
  const std::string cls = corpus() + "/classes/1";
  const std::string bad = root_ + "/bad.ast";
  std::ofstream(bad) << "(Start#a1 (Stmt#a2b)";
  const Result r = run_cli({"check", bad, "--context", cls + "/context.txt", "--method", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("parses\t0\t1\t"), std::string::npos) << r.out;
}

TEST_F(CliTest, EvalNextTokenReportsCategories) {
  const Result r = run_cli({"eval-next-token", "--model", model(), "--corpus", corpus()});
  ASSERT_EQ(r.code, kOk) << r.err;
  for (const char* c : {"apiCalls", "objectInit", "types", "variableAccess", "allTerminals"}) {
    EXPECT_NE(r.out.find(c), std::string::npos) << c;
  }
}

TEST_F(CliTest, ExtractWritesOneLinePerExample) {
  const Result r = run_cli({"extract", "--corpus", corpus(), "--split", "heldout"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("0\t0\t0\tStart\ta1", 0), 0u) << r.out.substr(0, 60);
}

TEST_F(CliTest, GenerateWritesCandidates) {
  const std::string cls = corpus() + "/classes/10";
  const std::string out = root_ + "/gen";
  const Result r = run_cli({"--output", out, "generate", "--evidence", cls + "/evidence.txt", "--context",
                            cls + "/context.txt", "--model", model(), "--corpus", corpus(), "--beam", "3", "--mask"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("## candidate 0 logProb"), std::string::npos);
  EXPECT_TRUE(fs::exists(out + "/candidate_0.ast"));
  const Result again = run_cli({"--output", out, "generate", "--evidence", cls + "/evidence.txt", "--context",
                                cls + "/context.txt", "--model", model(), "--corpus", corpus(), "--beam", "3", "--mask"});
  EXPECT_EQ(again.out, r.out);
}

TEST_F(CliTest, RelativeInputModelIsNotMovedUnderOutput) {
  const std::string cls = corpus() + "/classes/10";
  const std::string rel = fs::relative(model(), fs::current_path()).string();
  const Result r = run_cli({"--output", root_ + "/elsewhere", "generate", "--evidence", cls + "/evidence.txt",
                            "--context", cls + "/context.txt", "--model", rel, "--corpus", corpus(), "--beam", "1"});
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST_F(CliTest, GenerateAbortExitsThree) {
  // At depth 3 only Stmt#a2b fits; a bias of -1e6 gives it probability zero, leaving no expansion.
  const Result t = run_cli({"--output", root_, "train", "--corpus", corpus(), "--model", "dead.latent", "--kind",
                            "latent", "--steps", "0", "--dim", "2"});
  ASSERT_EQ(t.code, kOk) << t.err;
  const std::string path = root_ + "/dead.latent";
  std::ifstream in(path);
  std::stringstream edited;
  std::string line;
  bool next_is_values = false;
  bool patched = false;
  while (std::getline(in, line)) {
    if (next_is_values) {
      // Biases come first: Start#a1, then Stmt#a2a, Stmt#a2b.
      std::istringstream vals(line);
      std::string a, b, c, rest;
      vals >> a >> b >> c;
      std::getline(vals, rest);
      line = a + " " + b + " -1e6" + rest;
      next_is_values = false;
      patched = true;
    }
    if (line.rfind("parameters\t", 0) == 0) next_is_values = true;
    edited << line << '\n';
  }
  in.close();
  ASSERT_TRUE(patched);
  std::ofstream(path) << edited.str();
  const std::string cls = corpus() + "/classes/10";
  const Result r = run_cli({"generate", "--evidence", cls + "/evidence.txt", "--context", cls + "/context.txt",
                            "--model", path, "--corpus", corpus(), "--max-depth", "3", "--beam", "2"});
  EXPECT_EQ(r.code, kAborted) << r.out << r.err;
}

TEST_F(CliTest, FidelityAgainstSelfIsPerfect) {
  const std::string cls = corpus() + "/classes/1";
  const std::string cand = root_ + "/cands";
  fs::create_directories(cand);
  fs::copy_file(cls + "/body_0.ast", cand + "/c0.ast", fs::copy_options::overwrite_existing);
  const Result r = run_cli({"--format", "text", "fidelity", "--reference", cls + "/body_0.ast", "--candidates", cand});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("astExactMatch        100.00"), std::string::npos) << r.out;
}

TEST_F(CliTest, ConfigFileSuppliesOptionsAndRejectsUnknownKeys) {
  const std::string good = root_ + "/good.ini";
  std::ofstream(good) << "seed = 9\n[eval-next-token]\nmodel = " << model() << "\ncorpus = " << corpus() << "\n";
  const Result r = run_cli({"--config", good, "eval-next-token"});
  EXPECT_EQ(r.code, kOk) << r.err;
  const std::string bad = root_ + "/bad.ini";
  std::ofstream(bad) << "sede = 9\n";
  EXPECT_EQ(run_cli({"--config", bad, "eval-next-token", "--model", model(), "--corpus", corpus()}).code, kUsage);
}

TEST_F(CliTest, SmokeIsDeterministicAndMaskedVariableAccessIsPerfect) {
  SmokeOptions o;
  o.seed = 3;
  o.beam_width = 4;
  o.mask_mode = MaskMode::kHard;
  const std::string a = pipeline_smoke(corpus(), o);
  o.jobs = 3;
  const std::string b = pipeline_smoke(corpus(), o);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("variableAccessAgg"), std::string::npos) << a;
  const auto line = a.substr(a.find("variableAccessAgg"));
  EXPECT_NE(line.substr(0, line.find('\n')).find("100.00"), std::string::npos) << a;
}

TEST_F(CliTest, SmokeNamesFailingStage) {
  try {
    pipeline_smoke(root_ + "/missing", {});
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("stage "), std::string::npos) << e.what();
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

}  // namespace
}  // namespace nag::cli
