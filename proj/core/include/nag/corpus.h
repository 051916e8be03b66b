#ifndef NAG_CORPUS_H_
#define NAG_CORPUS_H_

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nag/eval.h"
#include "nag/evidence.h"
#include "nag/model.h"

namespace nag {

struct MethodRecord {
  MethodContext ctx;  // fields are copied from the class
  EvidenceSet evidence;
  AstNode body;
};

struct ClassRecord {
  int id = 0;
  std::string name;
  std::vector<std::pair<VarId, TypeName>> fields;
  std::map<VarId, std::string> field_names;
  std::vector<ApiSignature> internal_methods;
  std::vector<MethodRecord> methods;
};

// Held-out classes: id % 10 == 0.
bool is_held_out(int class_id);

// Registry extended with every internal method of the records. A name
// already present must carry the same signature.
ApiRegistry merge_internal(const ApiRegistry& base, const std::vector<ClassRecord>& records);

// Layout: <dir>/registry.tsv, <dir>/classes/<id>/{context.txt, evidence.txt, body_<k>.ast}.
void write_corpus(const std::string& dir, const ApiRegistry& registry, const std::vector<ClassRecord>& records,
                  const GrammarSpec& g);
ApiRegistry read_corpus_registry(const std::string& dir);
std::vector<ClassRecord> read_corpus(const std::string& dir, const GrammarSpec& g);

// context.txt alone (one class, its methods' contexts, no bodies).
void write_context(std::ostream& out, const ClassRecord& c);
ClassRecord read_context(std::istream& in);

// One example per node of the method body, pre-order.
std::vector<TrainingExample> extract_examples(const ClassRecord& record, size_t method, const GrammarSpec& g);

// Examples of every method of the selected split.
enum class Split { kAll, kTrain, kHeldOut };
std::vector<TrainingExample> extract_corpus(const std::vector<ClassRecord>& records, const GrammarSpec& g,
                                            Split split);

// Tab-separated, one example per line:
//   classId  method  index  symbol  target  parentRule|-  position  prefix  inherited
// prefix is the space-separated choice keys before the target; inherited is
// "attr=value" pairs joined by " ; ".
void write_examples_tsv(std::ostream& out, int class_id, size_t method, const std::vector<TrainingExample>& ex,
                        const GrammarSpec& g);

// Keeps each item independently with probability p.
EvidenceSet drop_evidence(const EvidenceSet& x, double p, uint64_t seed);

// Mini-JDK style registry the synthetic corpus draws from.
ApiRegistry synthetic_registry();

struct SynthSpec {
  int n_classes = 20;
  int methods_per_class = 3;
  uint64_t seed = 1;
};

// Bodies are built so that each argument, receiver, assignment target and
// return variable is the unique in-scope variable of the type the site
// expects. Every body passes all checks.
std::vector<ClassRecord> synth_corpus(const SynthSpec& spec, const GrammarSpec& g);

}  // namespace nag

#endif  // NAG_CORPUS_H_
