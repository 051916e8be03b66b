#ifndef NAG_TOOLS_CLI_H_
#define NAG_TOOLS_CLI_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nag/corpus.h"
#include "nag/generator.h"
#include "nag/model.h"

namespace nag::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kAborted = 3 };

enum class ReportFormat { kText, kTsv };

struct RunConfig {
  std::string registry;
  std::string corpus;
  std::string model;
  std::string output;
  GenConfig gen;
  CountOptions count;
  LatentHyper latent;
  double evidence_drop = 0.0;
  ReportFormat format = ReportFormat::kTsv;
  int jobs = 1;
  uint64_t seed = 0;

  // Makes every non-empty path absolute; a relative model path lands under
  // output when output is set.
  // A written model (train) lands under output; a read model is taken as given.
  void resolve(bool model_is_output);
};

// Registry of a corpus extended with the internal methods of all its
// classes, and the grammar over it.
struct Workspace {
  std::shared_ptr<const ApiRegistry> registry;
  std::shared_ptr<const GrammarSpec> grammar;
  std::vector<ClassRecord> records;
};

Workspace load_workspace(const std::string& corpus_dir);

// Looks for registry.tsv in the directories above `near` (at most 3 levels).
std::string find_registry(const std::string& near);

struct SmokeOptions {
  uint64_t seed = 0;
  int beam_width = 10;
  MaskMode mask_mode = MaskMode::kOff;
  int jobs = 1;
};

// extract -> train(count) -> beam search over held-out contexts -> check +
// fidelity. Checks score the top candidate; fidelity takes the best of the
// beam. A failing stage throws with the stage name in the message.
std::string pipeline_smoke(const std::string& corpus_dir, const SmokeOptions& opts);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nag::cli

#endif  // NAG_TOOLS_CLI_H_
