#ifndef NAG_REGISTRY_H_
#define NAG_REGISTRY_H_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nag/types.h"

namespace nag {

// Constructors are registered under "<Type>.<init>".
std::string constructor_key(const TypeName& t);
bool is_constructor_key(const std::string& name);

// API signature registry keyed by unique name. Line format (TSV):
//   name  receiverType|-  returnType  p1,p2,...|-  internal|external
class ApiRegistry {
 public:
  void add(const ApiSignature& sig);
  void add_type(const TypeName& t) { extra_types_.insert(t); }
  const ApiSignature* find(const std::string& name) const;
  const ApiSignature* constructor(const TypeName& t) const;

  // Non-constructor entries, sorted by name.
  std::vector<std::string> callable_names() const;
  // Every type mentioned anywhere plus types added explicitly, sorted.
  std::vector<TypeName> types() const;
  size_t size() const { return sigs_.size(); }
  const std::map<std::string, ApiSignature>& all() const { return sigs_; }

  static ApiRegistry parse_tsv(std::istream& in);
  static ApiRegistry load(const std::string& path);
  void write_tsv(std::ostream& out) const;

 private:
  std::map<std::string, ApiSignature> sigs_;
  std::set<TypeName> extra_types_;
};

}  // namespace nag

#endif  // NAG_REGISTRY_H_
