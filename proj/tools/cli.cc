#include "cli.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nag/checks.h"
#include "nag/fidelity.h"

namespace nag::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const GenerationAborted& e) {
    throw GenerationAborted(std::string("stage ") + name + ": " + e.what(), e.partial());
  } catch (const std::exception& e) {
    throw DataError(std::string("stage ") + name + ": " + e.what());
  }
}

ClassRecord read_context_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_context(in);
}

std::shared_ptr<const GrammarSpec> grammar_over(const ApiRegistry& base, const std::vector<ClassRecord>& classes,
                                                std::shared_ptr<const ApiRegistry>* reg_out) {
  auto reg = std::make_shared<const ApiRegistry>(merge_internal(base, classes));
  if (reg_out) *reg_out = reg;
  return std::make_shared<const GrammarSpec>(java_subset_grammar(reg));
}

// Method index from a "body_<k>.ast" file name; 0 otherwise.
size_t method_from_name(const std::string& path) {
  const std::string stem = fs::path(path).stem().string();
  if (stem.rfind("body_", 0) != 0) return 0;
  try {
    return static_cast<size_t>(std::stoul(stem.substr(5)));
  } catch (const std::exception&) {
    return 0;
  }
}

EvidenceSet apply_drop(const EvidenceSet& x, double drop, uint64_t seed) {
  if (drop == 0.0) return x;
  return drop_evidence(x, 1.0 - drop, seed);
}

uint64_t method_seed(uint64_t seed, int class_id, size_t method) {
  return Rng::derive(seed, static_cast<uint64_t>(class_id) * 1009u + method).next();
}

std::vector<fs::path> ast_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ast") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

PrettyOptions pretty_options(const MethodContext& ctx) {
  PrettyOptions p;
  p.var_names = ctx.display_names;
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void RunConfig::resolve(bool model_is_output) {
  registry = absolute(registry);
  corpus = absolute(corpus);
  output = absolute(output);
  if (!model.empty()) {
    fs::path m(model);
    if (model_is_output && m.is_relative() && !output.empty()) m = fs::path(output) / m;
    model = absolute(m.string());
  }
}

std::string find_registry(const std::string& near) {
  fs::path dir = fs::absolute(near).parent_path();
  for (int i = 0; i <= 3 && !dir.empty(); ++i) {
    const fs::path cand = dir / "registry.tsv";
    if (fs::exists(cand)) return cand.string();
    if (dir == dir.parent_path()) break;
    dir = dir.parent_path();
  }
  throw DataError("no registry.tsv found above " + near + "; pass --registry");
}

Workspace load_workspace(const std::string& corpus_dir) {
  const fs::path root = fs::path(corpus_dir) / "classes";
  if (!fs::is_directory(root)) throw DataError("corpus has no classes/ directory: " + corpus_dir);
  std::vector<ClassRecord> contexts;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) contexts.push_back(read_context_file((e.path() / "context.txt").string()));
  }
  Workspace ws;
  ws.grammar = grammar_over(read_corpus_registry(corpus_dir), contexts, &ws.registry);
  ws.records = read_corpus(corpus_dir, *ws.grammar);
  return ws;
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::string pipeline_smoke(const std::string& corpus_dir, const SmokeOptions& opts) {
  const Workspace ws = stage("load", [&] { return load_workspace(corpus_dir); });
  const GrammarSpec& g = *ws.grammar;
  const auto examples = stage("extract", [&] { return extract_corpus(ws.records, g, Split::kTrain); });
  const auto model = stage("train", [&] { return train_count(examples, g); });
  std::vector<std::pair<const ClassRecord*, size_t>> sites;
  for (const auto& c : ws.records) {
    if (!is_held_out(c.id)) continue;
    for (size_t k = 0; k < c.methods.size(); ++k) sites.emplace_back(&c, k);
  }
  if (sites.empty()) throw DataError("stage generate: corpus has no held-out methods");

  struct Outcome {
    bool aborted = false;
    size_t fallbacks = 0;
    CheckReport checks;
    FidelityReport fidelity;
  };
  std::vector<Outcome> out(sites.size());
  GenConfig cfg;
  cfg.seed = opts.seed;
  cfg.beam_width = opts.beam_width;
  cfg.mask_mode = opts.mask_mode;
  cfg.z_mode = ZMode::kPosteriorMean;
  cfg.validate();
  parallel_for(sites.size(), opts.jobs, [&](size_t i) {
    const MethodRecord& m = sites[i].first->methods[sites[i].second];
    std::vector<GenResult> beam;
    try {
      beam = stage("generate", [&] { return beam_search(g, *model, m.ctx, m.evidence, cfg); });
    } catch (const GenerationAborted&) {
      out[i].aborted = true;
      return;
    }
    for (const auto& r : beam) out[i].fallbacks += r.fallbacks.size();
    out[i].checks = stage("check", [&] { return run_checks(beam.front().tree.ast, m.ctx, g); });
    out[i].fidelity = stage("fidelity", [&] {
      std::vector<AstNode> cands;
      for (const auto& r : beam) cands.push_back(r.tree.ast);
      return fidelity_report(cands, m.body, g);
    });
  });

  std::vector<CheckReport> checks;
  std::vector<FidelityReport> fids;
  size_t aborted = 0, fallbacks = 0;
  for (const auto& o : out) {
    fallbacks += o.fallbacks;
    if (o.aborted) {
      ++aborted;
      continue;
    }
    checks.push_back(o.checks);
    fids.push_back(o.fidelity);
  }
  if (checks.empty()) throw DataError("stage check: every generation aborted");
  std::ostringstream os;
  os << "heldOutMethods\t" << sites.size() << "\n";
  os << "aborted\t" << aborted << "\n";
  os << "maskFallbacks\t" << fallbacks << "\n";
  os << "[checks]\n" << format_aggregate_text(aggregate_reports(checks));
  os << "[fidelity]\n" << format_fidelity_text(mean_report(fids), fids.size());
  return os.str();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural attribute grammar toolkit", "nag"};
  app.set_config("--config", "", "key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  std::string format = "tsv";
  app.add_option("--seed", rc.seed, "Seed for all randomness")->envname("NAG_SEED");
  app.add_option("--output", rc.output, "Directory (or file for extract) receiving written artifacts");
  app.add_option("--jobs", rc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "tsv"}));
  app.add_option("--drop-evidence", rc.evidence_drop, "Probability of dropping each evidence item")
      ->check(CLI::Range(0.0, 1.0));

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus to --output");
  SynthSpec spec;
  synth->add_option("--classes", spec.n_classes, "Number of classes")->check(CLI::PositiveNumber);
  synth->add_option("--methods", spec.methods_per_class, "Methods per class")->check(CLI::PositiveNumber);

  // extract
  auto* extract = app.add_subcommand("extract", "Dump training examples as TSV");
  std::string split = "all";
  extract->add_option("--corpus", rc.corpus, "Corpus directory")->required();
  extract->add_option("--split", split, "Class split")->check(CLI::IsMember({"all", "train", "heldout"}));

  // train
  auto* train = app.add_subcommand("train", "Train a conditional model on the training split");
  std::string kind = "count";
  bool blind = false;
  train->add_option("--corpus", rc.corpus, "Corpus directory")->required();
  train->add_option("--model", rc.model, "Model file to write")->required();
  train->add_option("--kind", kind, "Model kind")->check(CLI::IsMember({"count", "latent"}));
  train->add_flag("--no-attributes", blind, "Attribute-blind ablation");
  train->add_option("--alpha", rc.count.alpha, "Count-model Laplace alpha")->check(CLI::PositiveNumber);
  train->add_option("--dim", rc.latent.dim, "Latent dimension")->check(CLI::PositiveNumber);
  train->add_option("--steps", rc.latent.steps, "SGD steps")->check(CLI::NonNegativeNumber);
  train->add_option("--lr", rc.latent.lr, "Learning rate")->check(CLI::PositiveNumber);
  train->add_option("--batch", rc.latent.batch, "Batch size")->check(CLI::PositiveNumber);
  train->add_option("--mc-samples", rc.latent.mc_samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate method bodies for one context");
  std::string evidence_path, context_path;
  size_t method = 0;
  int top = 0;
  bool mask = false, sample = false;
  generate->add_option("--evidence", evidence_path, "Evidence file")->required();
  generate->add_option("--context", context_path, "context.txt of the class")->required();
  generate->add_option("--model", rc.model, "Model file")->required();
  generate->add_option("--registry", rc.registry, "registry.tsv (default: found above --context)");
  generate->add_option("--corpus", rc.corpus, "Corpus the model was trained on (fixes the grammar)");
  generate->add_option("--method", method, "Method index within the context");
  generate->add_option("--beam", rc.gen.beam_width, "Beam width")->check(CLI::PositiveNumber);
  generate->add_option("--top", top, "Candidates to print (default: all)")->check(CLI::NonNegativeNumber);
  generate->add_option("--max-depth", rc.gen.max_depth, "Depth cap")->check(CLI::PositiveNumber);
  generate->add_option("--temperature", rc.gen.temperature, "Sampling temperature")->check(CLI::PositiveNumber);
  generate->add_flag("--mask", mask, "Hard validity mask");
  generate->add_flag("--sample", sample, "Sample one body instead of beam search");

  // check
  auto* check = app.add_subcommand("check", "Static checks of one serialized AST");
  std::string ast_path;
  bool dump_attrs = false;
  check->add_option("ast", ast_path, "Serialized AST")->required();
  check->add_option("--context", context_path, "context.txt of the class")->required();
  check->add_option("--registry", rc.registry, "registry.tsv (default: found above --context)");
  check->add_option("--method", method, "Method index (default: from body_<k>.ast)");
  check->add_flag("--dump-attrs", dump_attrs, "Print every node's attributes");

  // fidelity
  auto* fidelity = app.add_subcommand("fidelity", "Fidelity of candidates against references");
  std::string reference, candidates;
  fidelity->add_option("--reference", reference, "Reference .ast file or directory of them")->required();
  fidelity->add_option("--candidates", candidates, "Directory of candidate .ast files")->required();
  fidelity->add_option("--registry", rc.registry, "registry.tsv (default: found above --reference)");

  // eval-next-token
  auto* evalnt = app.add_subcommand("eval-next-token", "Per-category next-token accuracy");
  split = "heldout";
  evalnt->add_option("--model", rc.model, "Model file")->required();
  evalnt->add_option("--corpus", rc.corpus, "Corpus directory")->required();
  evalnt->add_option("--split", split, "Class split")->check(CLI::IsMember({"all", "train", "heldout"}));

  // smoke
  auto* smoke = app.add_subcommand("smoke", "Extract, train, generate and score on a corpus");
  smoke->add_option("--corpus", rc.corpus, "Corpus directory")->required();
  smoke->add_option("--beam", rc.gen.beam_width, "Beam width")->check(CLI::PositiveNumber);
  smoke->add_flag("--mask", mask, "Hard validity mask");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "nag: " << e.what() << "\n";
    return kUsage;
  }

  rc.format = format == "text" ? ReportFormat::kText : ReportFormat::kTsv;
  rc.gen.seed = rc.seed;
  rc.gen.mask_mode = mask ? MaskMode::kHard : MaskMode::kOff;
  rc.count.use_attributes = rc.latent.use_attributes = !blind;
  rc.latent.seed = rc.seed;
  rc.resolve(train->parsed());
  context_path = absolute(context_path);
  evidence_path = absolute(evidence_path);
  ast_path = absolute(ast_path);
  reference = absolute(reference);
  candidates = absolute(candidates);

  try {
    if (*synth) {
      if (rc.output.empty()) throw CLI::RequiredError("--output");
      spec.seed = rc.seed;
      const ApiRegistry reg = synthetic_registry();
      const GrammarSpec g = java_subset_grammar(std::make_shared<const ApiRegistry>(reg));
      const auto records = synth_corpus(spec, g);
      write_corpus(rc.output, reg, records, g);
      size_t methods = 0;
      for (const auto& c : records) methods += c.methods.size();
      out << "classes\t" << records.size() << "\nmethods\t" << methods << "\n";
    } else if (*extract) {
      const Workspace ws = load_workspace(rc.corpus);
      std::ostringstream os;
      for (const auto& c : ws.records) {
        if (split == "train" && is_held_out(c.id)) continue;
        if (split == "heldout" && !is_held_out(c.id)) continue;
        for (size_t k = 0; k < c.methods.size(); ++k) {
          write_examples_tsv(os, c.id, k, extract_examples(c, k, *ws.grammar), *ws.grammar);
        }
      }
      if (rc.output.empty()) {
        out << os.str();
      } else {
        write_file(rc.output, os.str());
      }
    } else if (*train) {
      Workspace ws = load_workspace(rc.corpus);
      for (auto& c : ws.records) {
        for (size_t k = 0; k < c.methods.size(); ++k) {
          c.methods[k].evidence = apply_drop(c.methods[k].evidence, rc.evidence_drop, method_seed(rc.seed, c.id, k));
        }
      }
      const auto examples = extract_corpus(ws.records, *ws.grammar, Split::kTrain);
      if (examples.empty()) throw DataError("training split is empty");
      std::unique_ptr<ConditionalModel> m;
      if (kind == "count") {
        m = train_count(examples, *ws.grammar, rc.count);
      } else {
        m = train_latent(examples, *ws.grammar, rc.latent);
      }
      if (fs::path(rc.model).has_parent_path()) fs::create_directories(fs::path(rc.model).parent_path());
      m->save(rc.model);
      out << "examples\t" << examples.size() << "\nmodel\t" << rc.model << "\n";
    } else if (*generate) {
      rc.gen.validate();
      ClassRecord cls = read_context_file(context_path);
      if (method >= cls.methods.size()) throw DataError("context has no method " + std::to_string(method));
      std::shared_ptr<const GrammarSpec> g;
      if (!rc.corpus.empty()) {
        g = load_workspace(rc.corpus).grammar;
      } else {
        const std::string reg = rc.registry.empty() ? find_registry(context_path) : rc.registry;
        g = grammar_over(ApiRegistry::load(reg), {cls}, nullptr);
      }
      std::ifstream ev_in(evidence_path);
      if (!ev_in) throw DataError("cannot open " + evidence_path);
      const auto records = read_evidence_records(ev_in);
      EvidenceSet ev;
      if (records.size() > 1) {
        if (method >= records.size()) throw DataError("evidence file has no record " + std::to_string(method));
        ev = records[method];
      } else if (!records.empty()) {
        ev = records[0];
      }
      ev = apply_drop(ev, rc.evidence_drop, rc.seed);
      const auto model = load_model(rc.model, *g);
      const MethodContext& ctx = cls.methods[method].ctx;
      std::vector<GenResult> results;
      if (sample) {
        results.push_back(nag::generate(*g, *model, ctx, ev, rc.gen));
      } else {
        results = beam_search(*g, *model, ctx, ev, rc.gen);
      }
      const size_t shown = top > 0 ? std::min<size_t>(top, results.size()) : results.size();
      const PrettyOptions pretty = pretty_options(ctx);
      for (size_t i = 0; i < shown; ++i) {
        const std::string ser = serialize_ast(results[i].tree.ast, *g);
        out << "## candidate " << i << " logProb " << fmt(results[i].log_prob) << "\n";
        out << ser << "\n";
        out << pretty_print(results[i].tree.ast, *g, pretty) << "\n";
        if (!rc.output.empty()) {
          write_file(fs::path(rc.output) / ("candidate_" + std::to_string(i) + ".ast"), ser + "\n");
        }
      }
    } else if (*check) {
      ClassRecord cls = read_context_file(context_path);
      if (check->count("--method") == 0) method = method_from_name(ast_path);
      if (method >= cls.methods.size()) throw DataError("context has no method " + std::to_string(method));
      const std::string reg = rc.registry.empty() ? find_registry(context_path) : rc.registry;
      const auto g = grammar_over(ApiRegistry::load(reg), {cls}, nullptr);
      const MethodContext& ctx = cls.methods[method].ctx;
      const std::string text = read_file(ast_path);
      if (dump_attrs) {
        try {
          out << dump_annotations(annotate(parse_ast(text, *g), ctx, *g), *g);
        } catch (const ParseError&) {
        }
      }
      const CheckReport r = run_checks_text(text, ctx, *g);
      out << (rc.format == ReportFormat::kText ? format_report_text(r) : format_report_tsv(r));
    } else if (*fidelity) {
      const std::string reg = rc.registry.empty() ? find_registry(reference) : rc.registry;
      const auto g = std::make_shared<const GrammarSpec>(
          java_subset_grammar(std::make_shared<const ApiRegistry>(ApiRegistry::load(reg))));
      std::vector<std::pair<fs::path, fs::path>> pairs;  // reference file, candidate dir
      if (fs::is_directory(reference)) {
        for (const auto& f : ast_files(reference)) pairs.emplace_back(f, fs::path(candidates) / f.stem());
      } else {
        pairs.emplace_back(reference, candidates);
      }
      std::vector<FidelityReport> reports(pairs.size());
      parallel_for(pairs.size(), rc.jobs, [&](size_t i) {
        const AstNode ref = parse_ast(read_file(pairs[i].first.string()), *g);
        std::vector<AstNode> cands;
        for (const auto& f : ast_files(pairs[i].second)) cands.push_back(parse_ast(read_file(f.string()), *g));
        if (cands.empty()) throw DataError("no candidates in " + pairs[i].second.string());
        reports[i] = fidelity_report(cands, ref, *g);
      });
      out << format_fidelity_text(mean_report(reports), reports.size());
    } else if (*evalnt) {
      const Workspace ws = load_workspace(rc.corpus);
      const auto model = load_model(rc.model, *ws.grammar);
      std::vector<AnnotatedAst> annotated;
      std::vector<EvidenceSet> evidence;
      for (const auto& c : ws.records) {
        if (split == "train" && is_held_out(c.id)) continue;
        if (split == "heldout" && !is_held_out(c.id)) continue;
        for (size_t k = 0; k < c.methods.size(); ++k) {
          annotated.push_back(annotate(c.methods[k].body, c.methods[k].ctx, *ws.grammar));
          evidence.push_back(apply_drop(c.methods[k].evidence, rc.evidence_drop, method_seed(rc.seed, c.id, k)));
        }
      }
      std::vector<AnnotatedMethod> corpus;
      for (size_t i = 0; i < annotated.size(); ++i) corpus.push_back({&annotated[i], &evidence[i]});
      out << format_next_token_report(next_token_eval(*model, *ws.grammar, corpus, rc.seed));
    } else if (*smoke) {
      SmokeOptions so;
      so.seed = rc.seed;
      so.beam_width = rc.gen.beam_width;
      so.mask_mode = rc.gen.mask_mode;
      so.jobs = rc.jobs;
      const std::string summary = pipeline_smoke(rc.corpus, so);
      out << summary;
      if (!rc.output.empty()) write_file(fs::path(rc.output) / "smoke.txt", summary);
    }
  } catch (const CLI::ParseError& e) {
    err << "nag: " << e.what() << "\n";
    return kUsage;
  } catch (const GenerationAborted& e) {
    err << "nag: " << e.what() << " (" << e.partial().size() << " choices made)\n";
    return kAborted;
  } catch (const std::exception& e) {
    err << "nag: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace nag::cli
