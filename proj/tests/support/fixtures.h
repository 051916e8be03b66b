#ifndef NAG_TESTS_FIXTURES_H_
#define NAG_TESTS_FIXTURES_H_

#include <memory>
#include <string>

#include "nag/ast.h"
#include "nag/eval.h"
#include "nag/grammar.h"
#include "nag/rng.h"

namespace nag::testing {

// The writer example class: FileWriter, File, String, IOException and a few more
// calls so random programs have something to type-check against.
std::shared_ptr<const ApiRegistry> writer_registry();
std::shared_ptr<const GrammarSpec> writer_grammar();
// Same registry with 3 formals, 2 fields and 3 locals, so random programs
// hit declared variables often.
std::shared_ptr<const GrammarSpec> small_grammar();

// The synthetic corpus registry and its grammar.
std::shared_ptr<const GrammarSpec> synth_grammar();

// write(File f, String str), optionally with the class field "String err".
MethodContext writer_context(bool with_field);

// The writer example body.
extern const char* const kWriterBody;

// Random derivation of the grammar with at most max_nodes nodes. Leaves are
// drawn uniformly, so most trees are semantically wrong somewhere.
AstNode random_ast(const GrammarSpec& g, Rng& rng, size_t max_nodes);

// A few formals and fields with types from the registry.
MethodContext random_context(const GrammarSpec& g, Rng& rng);

}  // namespace nag::testing

#endif  // NAG_TESTS_FIXTURES_H_
