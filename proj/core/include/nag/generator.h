#ifndef NAG_GENERATOR_H_
#define NAG_GENERATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nag/derivation.h"
#include "nag/model.h"

namespace nag {

enum class MaskMode { kOff, kHard };
enum class ZMode { kSampled, kPosteriorMean };

struct GenConfig {
  uint64_t seed = 0;
  int max_depth = 32;
  int max_seq_stmts = 24;
  int beam_width = 10;
  double temperature = 1.0;
  MaskMode mask_mode = MaskMode::kOff;
  ZMode z_mode = ZMode::kSampled;

  void validate() const;  // throws DataError
};

struct MaskFallback {
  size_t step;
  std::string symbol;
};

class GenerationAborted : public NagError {
 public:
  GenerationAborted(const std::string& msg, std::vector<std::string> partial)
      : NagError(msg), partial_(std::move(partial)) {}
  // Choices made before the abort, in pre-order.
  const std::vector<std::string>& partial() const { return partial_; }

 private:
  std::vector<std::string> partial_;
};

struct GenResult {
  AnnotatedAst tree;
  double log_prob = 0;
  std::vector<std::string> choices;
  std::vector<MaskFallback> fallbacks;
};

// Zeroes alternatives whose single-step validity conjunct is already false
// given the inherited attributes at the site, then renormalizes. When all
// would be zeroed the input comes back unchanged and *fell_back is set.
std::vector<double> apply_mask(const GrammarSpec& g, const std::vector<double>& dist, const PendingSite& site,
                               bool* fell_back = nullptr);

// Sampling: one pass, choices drawn from the model.
GenResult generate(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                   const EvidenceSet& evidence, const GenConfig& cfg);

// Argmax at every step, ties to the lexicographically smallest key.
GenResult greedy(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                 const EvidenceSet& evidence, const GenConfig& cfg);

// Top beam_width complete derivations, best first. z = posterior mean.
std::vector<GenResult> beam_search(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                                   const EvidenceSet& evidence, const GenConfig& cfg);

// Plays back a fixed choice sequence: predict() puts all mass on the next
// element, one element per call. Meant for a single generate() run.
class ForcedChoiceModel : public ConditionalModel {
 public:
  ForcedChoiceModel(AlternativeTable alts, std::vector<std::string> choices)
      : alts_(std::move(alts)), choices_(std::move(choices)) {}

  std::vector<double> predict(const ContextFeatures& f, const std::vector<double>* z) const override;
  bool use_attributes() const override { return false; }
  const AlternativeTable& alternatives() const override { return alts_; }
  void save(const std::string& path) const override;

 private:
  AlternativeTable alts_;
  std::vector<std::string> choices_;
  mutable size_t next_ = 0;
};

// Rebuilds an annotated AST from its pre-order choice keys.
AnnotatedAst replay(const GrammarSpec& g, const SemState& root_inh, const std::vector<std::string>& choices);

}  // namespace nag

#endif  // NAG_GENERATOR_H_
