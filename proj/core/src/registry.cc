#include "nag/registry.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nag {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string constructor_key(const TypeName& t) { return t + ".<init>"; }

bool is_constructor_key(const std::string& name) {
  static const std::string kSuffix = ".<init>";
  return name.size() > kSuffix.size() &&
         name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0;
}

void ApiRegistry::add(const ApiSignature& sig) {
  if (sig.name.empty()) throw DataError("api signature with empty name");
  if (sig.is_internal && sig.receiver_type) {
    throw DataError("internal method " + sig.name + " has a receiver type");
  }
  if (!sigs_.emplace(sig.name, sig).second) {
    throw DataError("duplicate api signature " + sig.name);
  }
}

const ApiSignature* ApiRegistry::find(const std::string& name) const {
  auto it = sigs_.find(name);
  return it == sigs_.end() ? nullptr : &it->second;
}

const ApiSignature* ApiRegistry::constructor(const TypeName& t) const {
  return find(constructor_key(t));
}

std::vector<std::string> ApiRegistry::callable_names() const {
  std::vector<std::string> out;
  for (const auto& [name, sig] : sigs_) {
    if (!is_constructor_key(name)) out.push_back(name);
  }
  return out;
}

std::vector<TypeName> ApiRegistry::types() const {
  std::set<TypeName> ts = extra_types_;
  for (const auto& [name, sig] : sigs_) {
    if (sig.receiver_type) ts.insert(*sig.receiver_type);
    ts.insert(sig.return_type);
    for (const auto& p : sig.param_types) ts.insert(p);
  }
  return {ts.begin(), ts.end()};
}

ApiRegistry ApiRegistry::parse_tsv(std::istream& in) {
  ApiRegistry reg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 5) {
      throw DataError("registry line " + std::to_string(lineno) + ": expected 5 columns, got " +
                      std::to_string(cols.size()));
    }
    ApiSignature sig;
    sig.name = cols[0];
    if (cols[1] != "-") sig.receiver_type = cols[1];
    sig.return_type = cols[2];
    if (cols[3] != "-" && !cols[3].empty()) sig.param_types = split(cols[3], ',');
    if (cols[4] == "internal") {
      sig.is_internal = true;
    } else if (cols[4] != "external") {
      throw DataError("registry line " + std::to_string(lineno) + ": bad kind '" + cols[4] + "'");
    }
    if (sig.return_type.empty()) {
      throw DataError("registry line " + std::to_string(lineno) + ": empty return type");
    }
    try {
      reg.add(sig);
    } catch (const DataError& e) {
      throw DataError("registry line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return reg;
}

ApiRegistry ApiRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open registry " + path);
  return parse_tsv(in);
}

void ApiRegistry::write_tsv(std::ostream& out) const {
  for (const auto& [name, sig] : sigs_) {
    out << name << '\t' << (sig.receiver_type ? *sig.receiver_type : "-") << '\t'
        << sig.return_type << '\t';
    if (sig.param_types.empty()) {
      out << '-';
    } else {
      for (size_t i = 0; i < sig.param_types.size(); ++i) {
        if (i) out << ',';
        out << sig.param_types[i];
      }
    }
    out << '\t' << (sig.is_internal ? "internal" : "external") << '\n';
  }
}

}  // namespace nag
