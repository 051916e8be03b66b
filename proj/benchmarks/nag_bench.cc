#include <benchmark/benchmark.h>

#include <memory>

#include "nag/checks.h"
#include "nag/corpus.h"
#include "nag/generator.h"

namespace {

struct Fixture {
  std::shared_ptr<const nag::GrammarSpec> g;
  std::vector<nag::ClassRecord> records;
  std::unique_ptr<nag::CountModel> model;

  Fixture() {
    g = std::make_shared<const nag::GrammarSpec>(
        nag::java_subset_grammar(std::make_shared<const nag::ApiRegistry>(nag::synthetic_registry())));
    records = nag::synth_corpus({100, 3, 1}, *g);
    model = nag::train_count(nag::extract_corpus(records, *g, nag::Split::kTrain), *g);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Annotate(benchmark::State& state) {
  const auto& f = fixture();
  const auto& m = f.records[1].methods[0];
  for (auto _ : state) benchmark::DoNotOptimize(nag::annotate(m.body, m.ctx, *f.g));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(nag::node_count(m.body)));
}
BENCHMARK(BM_Annotate);

void BM_RunChecks(benchmark::State& state) {
  const auto& f = fixture();
  const auto& m = f.records[1].methods[0];
  for (auto _ : state) benchmark::DoNotOptimize(nag::run_checks(m.body, m.ctx, *f.g));
}
BENCHMARK(BM_RunChecks);

void BM_CountPredict(benchmark::State& state) {
  const auto& f = fixture();
  const auto ex = nag::extract_examples(f.records[1], 0, *f.g);
  const nag::Vocabulary vocab = nag::Vocabulary::from_grammar(*f.g);
  std::vector<nag::ContextFeatures> feats;
  for (const auto& e : ex) feats.push_back(nag::encode_context(e.site(), e.inherited, vocab));
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.model->predict(feats[i], nullptr));
    i = (i + 1) % feats.size();
  }
}
BENCHMARK(BM_CountPredict);

void BM_BeamSearch(benchmark::State& state) {
  const auto& f = fixture();
  const auto& m = f.records[10].methods[0];
  nag::GenConfig cfg;
  cfg.beam_width = static_cast<int>(state.range(0));
  cfg.mask_mode = nag::MaskMode::kHard;
  for (auto _ : state) benchmark::DoNotOptimize(nag::beam_search(*f.g, *f.model, m.ctx, m.evidence, cfg));
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
