#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "check_oracle.h"
#include "fixtures.h"
#include "nag/checks.h"
#include "nag/corpus.h"
#include "nag/fidelity.h"
#include "nag/generator.h"

namespace nag {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<CheckEvent> sorted_events(std::vector<CheckEvent> v) {
  std::sort(v.begin(), v.end(), [](const CheckEvent& a, const CheckEvent& b) {
    return std::tie(a.node, a.kind, a.pass, a.rule_id) < std::tie(b.node, b.kind, b.pass, b.rule_id);
  });
  return v;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

// 1
Outcome writer_symtab() {
  auto g = testing::writer_grammar();
  const AnnotatedAst a = annotate(parse_ast(testing::kWriterBody, *g), testing::writer_context(false), *g);
  const auto order = preorder(a.ast);
  size_t first = 0;
  while (first < order.size() && (order[first]->rule < 0 || g->production(order[first]->rule).rule_id != "a4")) {
    ++first;
  }
  if (first == order.size()) return {false, "no ObjInit statement"};
  SymTab want;
  want.bind({VarKind::kFormal, 0}, "File");
  want.bind({VarKind::kFormal, 1}, "String");
  want.bind({VarKind::kLocal, 0}, "FileWriter");
  const SymTab& got = a.nodes[first].syn.symtab(Attr::kSymTabOut);
  return {got == want, "symTabOut " + format_attr_value(got)};
}

// Hand-written cases aimed at scoping, flag and typing corners.
std::vector<std::pair<std::string, MethodContext>> adversarial_cases() {
  const auto call = [](const std::string& api, const std::string& args, const std::string& recv,
                       const std::string& target) {
    return "(Stmt#a5 (Invoke#b3 (Call#b5 (Api " + api + ") " + args + ") (InvokeMore#b4b) (Var " + recv + ") (Var " +
           target + ")))";
  };
  const auto arg = [](const std::string& v) { return "(ArgList#b6a (Var " + v + ") (ArgList#b6b))"; };
  const std::string none = "(ArgList#b6b)";
  const auto seq = [](const std::string& a, const std::string& b) { return "(Stmt#a2a " + a + " " + b + ")"; };
  const auto body = [](const std::string& s) { return "(Start#a1 " + s + ")"; };
  const std::string eps = "(Stmt#a2b)";
  const auto decl = [](const std::string& t, const std::string& v) {
    return "(Stmt#a3 (Decl#b1 (Type " + t + ") (Var " + v + ")))";
  };
  const auto init = [](const std::string& t0, const std::string& v, const std::string& t1, const std::string& args) {
    return "(Stmt#a4 (ObjInit#b2 (Type " + t0 + ") (Var " + v + ") (Type " + t1 + ") " + args + "))";
  };
  const auto ret = [](const std::string& v) { return "(Stmt#a6 (Return#b7 (Var " + v + ")))"; };
  const auto cond = [](const std::string& api) { return "(Cond#c6 (Call#b5 (Api " + api + ") (ArgList#b6b)))"; };
  const auto branch = [&](const std::string& c, const std::string& a, const std::string& b) {
    return "(Stmt#c1.a (Branch#c2 " + c + " " + a + " " + b + "))";
  };
  const auto loop = [&](const std::string& c, const std::string& b) { return "(Stmt#c1.b (Loop#c3 " + c + " " + b + "))"; };
  const auto try_catch = [&](const std::string& t, const std::string& ty, const std::string& v, const std::string& h) {
    return "(Stmt#c1.c (Except#c4 " + t + " (Catch#c5a (Type " + ty + ") (Var " + v + ") " + h + " (Catch#c5b))))";
  };

  const MethodContext v = testing::writer_context(true);
  MethodContext s = testing::writer_context(true);
  s.method_ret_type = "String";
  MethodContext empty;
  empty.method_ret_type = kVoid;

  std::vector<std::pair<std::string, MethodContext>> out;
  // The writer body itself.
  out.push_back({testing::kWriterBody, v});
  // Local declared but never initialized, then used as a receiver.
  out.push_back({body(seq(decl("FileWriter", "local 0"), seq(call("close", none, "local 0", "literal 0"), seq(ret("literal 0"), eps)))), v});
  // Try-block binding used after the try.
  out.push_back({body(seq(try_catch(init("FileWriter", "local 0", "FileWriter", arg("formal 0")), "IOException", "local 1", eps),
                          seq(call("close", none, "local 0", "literal 0"), eps))), v});
  // Catch variable reuses the try-local index.
  out.push_back({body(try_catch(init("FileWriter", "local 0", "FileWriter", arg("formal 0")), "IOException", "local 0",
                                call("printStackTrace", none, "local 0", "literal 0"))), v});
  // Handler reads a try binding whose initialization it cannot rely on.
  out.push_back({body(seq(decl("FileWriter", "local 0"), try_catch(init("FileWriter", "local 0", "FileWriter", arg("formal 0")),
                                                                     "IOException", "local 1", call("close", none, "local 0", "literal 0")))), v});
  // Initialized on one branch arm only.
  out.push_back({body(seq(decl("FileWriter", "local 0"),
                          seq(branch(cond("exists"), init("FileWriter", "local 0", "FileWriter", arg("formal 0")), eps),
                              seq(call("close", none, "local 0", "literal 0"), eps)))), v});
  // Initialized on both arms.
  out.push_back({body(seq(decl("FileWriter", "local 0"),
                          seq(branch(cond("exists"), init("FileWriter", "local 0", "FileWriter", arg("formal 0")),
                                     init("FileWriter", "local 0", "FileWriter", arg("formal 0"))),
                              seq(call("close", none, "local 0", "literal 0"), eps)))), v});
  // Loop body initialization does not survive the loop.
  out.push_back({body(seq(decl("FileWriter", "local 0"),
                          seq(loop(cond("exists"), init("FileWriter", "local 0", "FileWriter", arg("formal 0"))),
                              seq(call("close", none, "local 0", "literal 0"), eps)))), v});
  // Formal and field indices beyond the context.
  out.push_back({body(seq(call("println", arg("formal 5"), "literal 0", "literal 0"),
                          seq(call("println", arg("field 3"), "literal 0", "literal 0"), eps))), v});
  // Argument of the wrong type, and a missing argument.
  out.push_back({body(seq(call("write", arg("formal 0"), "formal 0", "literal 0"), seq(call("concat", none, "formal 1", "literal 0"), eps))), v});
  // Method called on the wrong receiver type.
  out.push_back({body(seq(call("close", none, "formal 1", "literal 0"), eps)), v});
  // Constructor type mismatch and an extra argument.
  out.push_back({body(seq(init("FileWriter", "local 0", "File", arg("formal 1")),
                          seq(init("IOException", "local 1", "IOException", arg("formal 1")), eps))), v});
  // Result assigned to a target of the wrong type.
  out.push_back({body(seq(decl("int", "local 0"), seq(call("getName", none, "formal 0", "local 0"), seq(ret("local 0"), eps)))), s});
  // Return of the right type; return of the literal in a non-void method.
  out.push_back({body(seq(call("getName", none, "formal 0", "formal 1"), seq(ret("formal 1"), seq(ret("literal 0"), eps)))), s});
  // Non-void method without any return.
  out.push_back({body(seq(call("println", arg("field 0"), "literal 0", "literal 0"), eps)), s});
  // Return placed only inside a branch arm.
  out.push_back({body(branch(cond("exists"), ret("formal 1"), eps)), s});
  // Chained call: b4a after a String-returning call.
  out.push_back({body("(Stmt#a5 (Invoke#b3 (Call#b5 (Api getName) (ArgList#b6b)) (InvokeMore#b4a (Call#b5 (Api concat) " +
                      arg("formal 1") + ") (InvokeMore#b4a (Call#b5 (Api close) (ArgList#b6b)) (InvokeMore#b4b))) "
                      "(Var formal 0) (Var formal 1)))"), s});
  // Redeclaring a local index shadows the earlier type.
  out.push_back({body(seq(init("File", "local 0", "File", arg("formal 1")),
                          seq(decl("String", "local 0"), seq(call("exists", none, "local 0", "literal 0"), eps)))), v});
  // Unused declarations and a literal receiver for an instance method.
  out.push_back({body(seq(decl("String", "local 1"), seq(call("write", arg("literal 0"), "literal 0", "literal 0"), eps))), v});
  // Empty context: everything undeclared.
  out.push_back({body(seq(call("write", arg("local 2"), "local 1", "local 0"), seq(ret("local 1"), eps))), empty});
  return out;
}

// 2
Outcome oracle_equivalence() {
  auto small = testing::small_grammar();
  auto writer = testing::writer_grammar();
  Rng rng(2718);
  size_t events = 0;
  for (int i = 0; i < 200; ++i) {
    const AstNode ast = testing::random_ast(*small, rng, 40);
    const MethodContext ctx = testing::random_context(*small, rng);
    const auto got = sorted_events(run_checks(ast, ctx, *small).events);
    const auto want = sorted_events(testing::oracle_events(ast, ctx, *small));
    if (got != want) return {false, "random tree " + std::to_string(i) + " disagrees: " + serialize_ast(ast, *small)};
    events += got.size();
  }
  const auto cases = adversarial_cases();
  for (size_t i = 0; i < cases.size(); ++i) {
    const AstNode ast = parse_ast(cases[i].first, *writer);
    const auto got = sorted_events(run_checks(ast, cases[i].second, *writer).events);
    const auto want = sorted_events(testing::oracle_events(ast, cases[i].second, *writer));
    if (got != want) return {false, "adversarial case " + std::to_string(i) + " disagrees"};
    events += got.size();
  }
  return {true, "200 random + " + std::to_string(cases.size()) + " adversarial trees, " + std::to_string(events) +
                    " events agree"};
}

struct SynthSetup {
  std::shared_ptr<const GrammarSpec> g = testing::synth_grammar();
  std::vector<ClassRecord> records;
  std::vector<const MethodRecord*> held_out;

  explicit SynthSetup(SynthSpec spec) : records(synth_corpus(spec, *g)) {
    for (const auto& c : records) {
      if (!is_held_out(c.id)) continue;
      for (const auto& m : c.methods) held_out.push_back(&m);
    }
  }
};

// 3
// Beam-1 masked generations on 100 held-out contexts. The count model's Api
// choice ignores scope, so its greedy bodies rarely pass arguments; a trained
// latent model also runs so every check has sites.
Outcome masked_soundness() {
  SynthSetup s({340, 3, 3});
  if (s.held_out.size() < 100) return {false, "only " + std::to_string(s.held_out.size()) + " held-out contexts"};
  const auto train = extract_corpus(s.records, *s.g, Split::kTrain);
  LatentHyper h;
  h.steps = 6000;
  const std::unique_ptr<ConditionalModel> models[] = {train_count(train, *s.g), train_latent(train, *s.g, h)};
  const char* names[] = {"count", "latent"};
  const CheckKind kinds[] = {CheckKind::kUndeclaredVarAccess, CheckKind::kActualParamType, CheckKind::kReturnStmtType};
  GenConfig cfg;
  cfg.beam_width = 1;
  cfg.mask_mode = MaskMode::kHard;
  bool ok = true;
  bool exercised[3] = {false, false, false};
  std::string detail;
  for (int mi = 0; mi < 2; ++mi) {
    std::vector<CheckReport> reports;
    for (size_t i = 0; i < 100; ++i) {
      const MethodRecord& m = *s.held_out[i];
      cfg.seed = i;
      const auto out = beam_search(*s.g, *models[mi], m.ctx, m.evidence, cfg);
      reports.push_back(run_checks(out[0].tree.ast, m.ctx, *s.g));
    }
    const AggregateReport agg = aggregate_reports(reports);
    detail += std::string(names[mi]) + ":";
    for (int k = 0; k < 3; ++k) {
      const auto& mean = agg.mean[static_cast<int>(kinds[k])];
      if (mean) {
        exercised[k] = true;
        if (*mean != 1.0) ok = false;
      }
      detail += std::string(" ") + check_name(kinds[k]) + "=" + (mean ? fmt("%.2f%%", 100 * *mean) : "n/a");
    }
    detail += "; ";
  }
  for (bool e : exercised) ok = ok && e;
  return {ok, detail + "100 generations per model"};
}

// 4
Outcome attribute_gap() {
  SynthSetup s({1700, 3, 4});
  size_t methods = 0;
  for (const auto& c : s.records) methods += c.methods.size();
  if (methods < 5000) return {false, "corpus has only " + std::to_string(methods) + " methods"};
  const auto train = extract_corpus(s.records, *s.g, Split::kTrain);
  const auto att = train_count(train, *s.g, {0.1, true});
  const auto blind = train_count(train, *s.g, {0.1, false});
  std::vector<AnnotatedAst> annotated;
  annotated.reserve(s.held_out.size());
  std::vector<AnnotatedMethod> corpus;
  for (const MethodRecord* m : s.held_out) annotated.push_back(annotate(m->body, m->ctx, *s.g));
  for (size_t i = 0; i < s.held_out.size(); ++i) corpus.push_back({&annotated[i], &s.held_out[i]->evidence});
  const double a = next_token_eval(*att, *s.g, corpus, 1).categories.at("variableAccess").accuracy();
  const double b = next_token_eval(*blind, *s.g, corpus, 1).categories.at("variableAccess").accuracy();
  const double chance = 1.0 / static_cast<double>(s.g->leaf_alternatives(s.g->symbol_id("Var")).size());
  const bool ok = a >= 0.95 && b <= chance + 0.10;
  return {ok, std::to_string(methods) + " methods; attributes " + fmt("%.2f%%", 100 * a) + ", blind " +
                  fmt("%.2f%%", 100 * b) + ", chance " + fmt("%.2f%%", 100 * chance)};
}

// 5
Outcome posterior_exactness() {
  Rng rng(5);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    EncoderParams p;
    p.dim = 1 + static_cast<int>(rng.below(16));
    for (auto& s2 : p.sigma2) s2 = 0.05 + 4.0 * rng.uniform();
    std::vector<EncodedItem> items(rng.below(20));
    for (auto& e : items) {
      e.kind = static_cast<int>(rng.below(kNumEvidenceKinds));
      e.vec.resize(p.dim);
      for (auto& x : e.vec) x = rng.normal();
    }
    long double denom = 1.0L;
    std::vector<long double> num(p.dim, 0.0L);
    for (const auto& e : items) {
      const long double w = 1.0L / p.sigma2[e.kind];
      denom += w;
      for (int d = 0; d < p.dim; ++d) num[d] += w * e.vec[d];
    }
    const LatentPosterior post = posterior(items, p);
    worst = std::max(worst, std::abs(post.variance - static_cast<double>(1.0L / denom)));
    for (int d = 0; d < p.dim; ++d) worst = std::max(worst, std::abs(post.mean[d] - static_cast<double>(num[d] / denom)));
  }
  EncoderParams p;
  p.dim = 8;
  const LatentPosterior prior = posterior({}, p);
  const bool prior_ok = prior.variance == 1.0 && std::all_of(prior.mean.begin(), prior.mean.end(), [](double x) { return x == 0.0; });
  bool decreasing = true;
  std::vector<EncodedItem> items;
  double prev = prior.variance;
  for (int i = 0; i < 50; ++i) {
    EncodedItem e;
    e.kind = i % kNumEvidenceKinds;
    e.vec.assign(8, 1.0);
    items.push_back(e);
    const double v = posterior(items, p).variance;
    decreasing = decreasing && v < prev;
    prev = v;
  }
  return {worst <= 1e-9 && prior_ok && decreasing,
          "max abs error " + fmt("%.3g", worst) + (prior_ok ? ", prior ok" : ", prior wrong") +
              (decreasing ? ", variance decreasing" : ", variance not decreasing")};
}

// 6
Outcome gradient_check() {
  SynthSetup s({4, 2, 8});
  const auto examples = extract_corpus(s.records, *s.g, Split::kAll);
  std::vector<const TrainingExample*> batch;
  for (const auto& ex : examples) {
    const std::string& name = s.g->symbol(ex.symbol).name;
    if ((name == "Var" || name == "Stmt" || name == "Api") && ex.evidence && !ex.evidence->empty()) {
      batch.push_back(&ex);
    }
    if (batch.size() == 5) break;
  }
  LatentHyper h;
  h.dim = 4;
  h.steps = 0;
  auto m = train_latent(examples, *s.g, h);
  Rng rng(66);
  std::vector<double> theta = m->parameters();
  for (auto& t : theta) t = 0.3 * rng.normal();
  m->set_parameters(theta);
  const auto noise = draw_noise(batch.size(), 2, h.dim, rng);
  const Vocabulary vocab = Vocabulary::from_grammar(*s.g);
  std::vector<double> grad;
  m->objective(batch, vocab, noise, &grad);
  const auto prepared = m->prepare(batch, vocab);
  const double step = 1e-5;
  double worst = 0;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    m->set_parameter(i, keep + step);
    const double up = m->objective(prepared, noise, nullptr);
    m->set_parameter(i, keep - step);
    const double down = m->objective(prepared, noise, nullptr);
    m->set_parameter(i, keep);
    const double fd = (up - down) / (2 * step);
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
    worst = std::max(worst, std::abs(fd - grad[i]) / scale);
  }
  return {batch.size() == 5 && worst < 1e-4,
          std::to_string(theta.size()) + " parameters, max relative error " + fmt("%.3g", worst)};
}

// 7
Outcome round_trips() {
  auto g = testing::small_grammar();
  Rng rng(77);
  GenConfig cfg;
  cfg.max_depth = 64;
  cfg.max_seq_stmts = 1000;
  for (int i = 0; i < 100; ++i) {
    const AstNode ast = testing::random_ast(*g, rng, 40);
    const MethodContext ctx = testing::random_context(*g, rng);
    std::vector<std::string> keys;
    for (const auto& ex : examples_from_annotated(annotate(ast, ctx, *g), *g, nullptr)) keys.push_back(ex.target);
    ForcedChoiceModel forced(AlternativeTable(*g), keys);
    if (!(generate(*g, forced, ctx, {}, cfg).tree.ast == ast)) return {false, "forced replay differs on tree " + std::to_string(i)};
    const std::string text = serialize_ast(ast, *g);
    if (!(parse_ast(text, *g) == ast) || serialize_ast(parse_ast(text, *g), *g) != text) {
      return {false, "serialize/parse differs on tree " + std::to_string(i)};
    }
  }
  SynthSetup s({20, 3, 7});
  const auto examples = extract_corpus(s.records, *s.g, Split::kAll);
  const auto m = train_count(examples, *s.g);
  const std::string path = (std::filesystem::temp_directory_path() / "nag_acceptance.model").string();
  m->save(path);
  const auto back = load_model(path, *s.g);
  std::filesystem::remove(path);
  const Vocabulary vocab = Vocabulary::from_grammar(*s.g);
  for (const auto& ex : examples) {
    const auto f = encode_context(ex.site(), ex.inherited, vocab);
    const auto a = m->predict(f, nullptr);
    const auto b = back->predict(f, nullptr);
    if (a.size() != b.size() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) != 0) {
      return {false, "reloaded count model predicts differently"};
    }
  }
  return {true, "100 replays, 100 text round-trips, " + std::to_string(examples.size()) + " identical predictions"};
}

// 8
Outcome fidelity_properties() {
  JavaGrammarOptions o;
  o.namespaces = {2, 1, 4};
  const GrammarSpec g = java_subset_grammar(testing::writer_registry(), o);
  Rng rng(88);
  auto permute = [](AstNode n, const std::vector<int>& perm) {
    std::function<void(AstNode&)> go = [&](AstNode& x) {
      if (auto* v = std::get_if<VarId>(&x.leaf); v && v->kind == VarKind::kLocal) v->index = perm[v->index];
      for (auto& c : x.children) go(c);
    };
    go(n);
    return n;
  };
  auto same = [](const FidelityReport& a, const FidelityReport& b) {
    return a.api_call_set == b.api_call_set && a.api_call_sequences == b.api_call_sequences &&
           a.program_paths == b.program_paths && a.ast_exact_match == b.ast_exact_match;
  };
  std::vector<int> perm{0, 1, 2, 3};
  for (int i = 0; i < 100; ++i) {
    const AstNode ref = testing::random_ast(g, rng, 30);
    const AstNode cand = testing::random_ast(g, rng, 30);
    if (!same(fidelity_report({ref}, ref, g), {1, 1, 1, 1})) return {false, "self-comparison below 1"};
    std::shuffle(perm.begin(), perm.end(), rng);
    if (!same(fidelity_report({permute(ref, perm)}, ref, g), {1, 1, 1, 1})) return {false, "renamed reference not matched"};
    if (!same(fidelity_report({permute(cand, perm)}, ref, g), fidelity_report({cand}, ref, g))) {
      return {false, "renaming changed a metric"};
    }
    std::vector<AstNode> cands;
    FidelityReport prev;
    for (int k = 0; k < 4; ++k) {
      cands.push_back(testing::random_ast(g, rng, 30));
      const FidelityReport r = fidelity_report(cands, ref, g);
      if (r.api_call_set < prev.api_call_set || r.api_call_sequences < prev.api_call_sequences ||
          r.program_paths < prev.program_paths || r.ast_exact_match < prev.ast_exact_match) {
        return {false, "best-of-k decreased"};
      }
      prev = r;
    }
  }
  const double j = jaccard(std::set<std::string>{"A", "B"}, std::set<std::string>{"B", "C"});
  return {j == 1.0 / 3.0, "Jaccard({A,B},{B,C}) = " + fmt("%.6f", j) + "; 100 trees checked"};
}

// 9
Outcome grammar_sanity() {
  const auto violations = check_l_attributed(*testing::writer_grammar());
  if (!violations.empty()) return {false, "l-attributed violation in " + violations[0].rule_id + ": " + violations[0].target};
  SynthSetup s({200, 3, 9});
  const auto model = train_count(extract_corpus(s.records, *s.g, Split::kTrain), *s.g);
  GenConfig cfg;
  cfg.beam_width = 1;
  int runs = 0;
  for (size_t i = 0; i < 50; ++i) {
    const MethodRecord& m = *s.held_out[i % s.held_out.size()];
    cfg.seed = i;
    const auto beam = beam_search(*s.g, *model, m.ctx, m.evidence, cfg);
    const auto gr = greedy(*s.g, *model, m.ctx, m.evidence, cfg);
    if (beam.size() != 1 || beam[0].choices != gr.choices || beam[0].log_prob != gr.log_prob) {
      return {false, "beam width 1 differs from greedy on run " + std::to_string(i)};
    }
    const auto a = generate(*s.g, *model, m.ctx, m.evidence, cfg);
    const auto b = generate(*s.g, *model, m.ctx, m.evidence, cfg);
    if (serialize_ast(a.tree.ast, *s.g) != serialize_ast(b.tree.ast, *s.g) || a.log_prob != b.log_prob) {
      return {false, "generate not deterministic on run " + std::to_string(i)};
    }
    ++runs;
  }
  return {true, "no violations; " + std::to_string(runs) + " beam/greedy and determinism runs agree"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nag

int main() {
  using namespace nag;
  const std::vector<Criterion> criteria = {
      {1, "worked example symTabOut", 1, writer_symtab},
      {2, "checker/oracle equivalence", 10, oracle_equivalence},
      {3, "masked generation soundness", 30, masked_soundness},
      {4, "attribute vs blind gap", 300, attribute_gap},
      {5, "posterior exactness", 1, posterior_exactness},
      {6, "latent gradient check", 10, gradient_check},
      {7, "round-trips", 10, round_trips},
      {8, "fidelity metric properties", 1, fidelity_properties},
      {9, "grammar sanity", 30, grammar_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool ok = o.pass && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.3f s, limit %.0f s%s]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
