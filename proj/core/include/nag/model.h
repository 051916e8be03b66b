#ifndef NAG_MODEL_H_
#define NAG_MODEL_H_

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "nag/eval.h"
#include "nag/evidence.h"
#include "nag/features.h"

namespace nag {

// One expansion site of a training body: the pre-order choices before it,
// the observed choice, and the inherited attributes at the site.
struct TrainingExample {
  std::shared_ptr<const std::vector<std::string>> sequence;  // all choice keys, pre-order
  size_t index = 0;  // prefix = sequence[0, index); target = sequence[index]
  SymbolId symbol = -1;
  std::string target;
  std::string parent_rule;
  int position = 0;
  int stmt_ordinal = -1;
  SemState inherited;
  std::shared_ptr<const EvidenceSet> evidence;

  ExpansionSite site() const;
};

// One example per AST node in pre-order (leaf symbols included: each is a
// choice between its payload alternatives).
std::vector<TrainingExample> examples_from_annotated(const AnnotatedAst& a, const GrammarSpec& g,
                                                     std::shared_ptr<const EvidenceSet> evidence);

class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  // Distribution aligned with alternatives().keys(f.symbol). z is ignored
  // by models without a latent pathway.
  virtual std::vector<double> predict(const ContextFeatures& f, const std::vector<double>* z) const = 0;
  virtual bool uses_latent() const { return false; }
  virtual bool use_attributes() const = 0;
  virtual const AlternativeTable& alternatives() const = 0;
  virtual void save(const std::string& path) const = 0;
};

struct CountOptions {
  double alpha = 0.1;
  bool use_attributes = true;
};

// Interpolated backoff over three context levels, most specific first:
//   (sym, parentRule, position, expectedType, matchSet)
//   (sym, expectedType)
//   (sym)
// Each level is a Laplace estimate (c + alpha) / (N + k alpha), mixed as
// p_l = lambda_l lap_l + (1 - lambda_l) p_{l+1} with lambda_l = N_l / (N_l + 1)
// and the last level unmixed.
class CountModel : public ConditionalModel {
 public:
  static constexpr int kLevels = 3;

  CountModel(AlternativeTable alts, CountOptions opts);

  void observe(const ContextFeatures& f, const std::string& choice);
  std::vector<double> predict(const ContextFeatures& f, const std::vector<double>* z) const override;
  bool use_attributes() const override { return opts_.use_attributes; }
  const AlternativeTable& alternatives() const override { return alts_; }
  double alpha() const { return opts_.alpha; }
  void set_alpha(double a) { opts_.alpha = a; }
  void save(const std::string& path) const override;
  void write(std::ostream& out) const;
  static std::unique_ptr<CountModel> read(std::istream& in, const AlternativeTable& alts);

  static std::string context_key(int level, const ContextFeatures& f, const std::string& sym_name);

 private:
  struct Entry {
    std::vector<double> counts;
    double total = 0;
  };

  AlternativeTable alts_;
  CountOptions opts_;
  std::array<std::unordered_map<std::string, Entry>, kLevels> tables_;
};

std::unique_ptr<CountModel> train_count(const std::vector<TrainingExample>& examples,
                                        const GrammarSpec& g, const CountOptions& opts = {});

struct LatentHyper {
  int dim = 32;
  double lr = 0.5;
  int steps = 200;
  int mc_samples = 1;
  int batch = 32;
  uint64_t seed = 1;
  bool use_attributes = true;
};

// Linear-softmax over sparse context features plus the latent z:
//   logit_a = b_a + sum_{phi active} W[a][phi] + U_a . z
// with the posterior's encoder maps and variances as further parameters.
class LatentModel : public ConditionalModel {
 public:
  LatentModel(AlternativeTable alts, std::vector<std::string> features, int dim, bool use_attributes);

  std::vector<double> predict(const ContextFeatures& f, const std::vector<double>* z) const override;
  bool uses_latent() const override { return true; }
  bool use_attributes() const override { return use_attributes_; }
  const AlternativeTable& alternatives() const override { return alts_; }
  void save(const std::string& path) const override;
  void write(std::ostream& out) const;
  static std::unique_ptr<LatentModel> read(std::istream& in, const AlternativeTable& alts);

  EncoderParams& encoder() { return encoder_; }
  const EncoderParams& encoder() const { return encoder_; }
  int dim() const { return dim_; }

  // Parameter vector view: [biases | W | U | encoder maps | log sigma^2].
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& theta);
  // Sets entry i of the parameters() layout.
  void set_parameter(size_t i, double value);
  size_t num_parameters() const;

  // Indices of active features for a context, in the model's dictionary.
  std::vector<int> active_features(const ContextFeatures& f) const;

  struct Noise {
    std::vector<std::vector<double>> v;  // per example: mc_samples * dim
  };

  // Monte-Carlo Jensen objective: sum_i (1/S) sum_s log P(target_i | ..., z_is),
  // z_is = mean_i + sqrt(var_i) V_is. Fills grad (same layout as
  // parameters()) when non-null.
  double objective(const std::vector<const TrainingExample*>& batch, const Vocabulary& vocab,
                   const Noise& noise, std::vector<double>* grad) const;

  // The parameter-independent part of an objective term: active features,
  // target index and per-kind sums of hashed evidence bags.
  struct Prepared {
    SymbolId symbol = -1;
    int target = -1;
    std::vector<int> active;
    std::array<std::vector<double>, kNumEvidenceKinds> bag_sum;
    std::array<double, kNumEvidenceKinds> count{};
  };
  std::vector<Prepared> prepare(const std::vector<const TrainingExample*>& batch, const Vocabulary& vocab) const;
  double objective(const std::vector<Prepared>& batch, const Noise& noise, std::vector<double>* grad) const;

  const std::vector<double>& loss_trace() const { return loss_trace_; }
  std::vector<double>& mutable_loss_trace() { return loss_trace_; }

 private:
  size_t offset_bias(SymbolId s) const { return bias_off_[s]; }
  size_t offset_w(SymbolId s) const { return w_off_[s]; }
  size_t offset_u(SymbolId s) const { return u_off_[s]; }
  void layout();
  std::vector<double> distribution(SymbolId s, const std::vector<int>& active, const std::vector<double>& z) const;

  AlternativeTable alts_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, int> feature_index_;
  int dim_;
  bool use_attributes_;
  std::vector<double> theta_;  // biases, W, U
  std::vector<size_t> bias_off_, w_off_, u_off_;
  EncoderParams encoder_;
  std::vector<double> loss_trace_;
};

// Sparse feature strings of a context (shared by training and prediction).
std::vector<std::string> feature_strings(const ContextFeatures& f);

std::unique_ptr<LatentModel> train_latent(const std::vector<TrainingExample>& examples,
                                          const GrammarSpec& g, const LatentHyper& hyper);

// Fresh noise for a batch, drawn from rng.
LatentModel::Noise draw_noise(size_t batch, int mc_samples, int dim, Rng& rng);

// Loads either model kind, checking that its alternatives match g.
std::unique_ptr<ConditionalModel> load_model(const std::string& path, const GrammarSpec& g);

// Per-site evaluation on annotated bodies.
struct AccuracyCell {
  int correct = 0;
  int total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct NextTokenReport {
  std::map<std::string, AccuracyCell> categories;  // apiCalls, objectInit, types, variableAccess, allTerminals
  std::map<std::string, AccuracyCell> per_symbol;
};

struct AnnotatedMethod {
  const AnnotatedAst* ast = nullptr;
  const EvidenceSet* evidence = nullptr;
};

// Site category names; empty when the site belongs to none.
std::vector<std::string> site_categories(const GrammarSpec& g, SymbolId sym,
                                         const std::string& parent_rule, int position);

NextTokenReport next_token_eval(const ConditionalModel& m, const GrammarSpec& g,
                                const std::vector<AnnotatedMethod>& corpus, uint64_t seed);

std::string format_next_token_report(const NextTokenReport& r);

}  // namespace nag

#endif  // NAG_MODEL_H_
