#include "nag/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nag {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

TypeList parse_types(const std::string& s) {
  TypeList out;
  if (s == "-" || s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string join_types(const TypeList& t) {
  if (t.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + t[i];
  return s;
}

int parse_index(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": bad index '" + s + "'");
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_signature(const ApiSignature& a, const ApiSignature& b) {
  return a.name == b.name && a.receiver_type == b.receiver_type && a.return_type == b.return_type &&
         a.param_types == b.param_types && a.is_internal == b.is_internal;
}

}  // namespace

bool is_held_out(int class_id) { return class_id % 10 == 0; }

ApiRegistry merge_internal(const ApiRegistry& base, const std::vector<ClassRecord>& records) {
  ApiRegistry out = base;
  for (const auto& c : records) {
    for (const auto& sig : c.internal_methods) {
      if (const ApiSignature* have = out.find(sig.name)) {
        if (!same_signature(*have, sig)) {
          throw DataError("internal method " + sig.name + " of class " + std::to_string(c.id) +
                          " conflicts with an existing signature");
        }
        continue;
      }
      out.add(sig);
    }
  }
  return out;
}

void write_context(std::ostream& out, const ClassRecord& c) {
  out << "class\t" << c.id << '\t' << c.name << '\n';
  for (const auto& [v, t] : c.fields) {
    auto it = c.field_names.find(v);
    out << "field\t" << v.index << '\t' << t << '\t' << (it == c.field_names.end() ? "" : it->second) << '\n';
  }
  for (const auto& sig : c.internal_methods) {
    out << "internal\t" << sig.name << '\t' << sig.return_type << '\t' << join_types(sig.param_types) << '\n';
  }
  for (size_t k = 0; k < c.methods.size(); ++k) {
    const MethodContext& m = c.methods[k].ctx;
    out << "method\t" << k << '\t' << m.name << '\t' << m.method_ret_type << '\n';
    for (const auto& [v, t] : m.formals) {
      auto it = m.display_names.find(v);
      out << "formal\t" << v.index << '\t' << t << '\t' << (it == m.display_names.end() ? "" : it->second)
          << '\n';
    }
  }
}

ClassRecord read_context(std::istream& in) {
  ClassRecord c;
  std::string line;
  int lineno = 0;
  bool have_class = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split_tabs(line);
    const std::string where = "context line " + std::to_string(lineno);
    const std::string& tag = cols[0];
    if (tag == "class" && cols.size() >= 2) {
      c.id = parse_index(cols[1], where);
      c.name = cols.size() > 2 ? cols[2] : "";
      have_class = true;
    } else if (tag == "field" && cols.size() >= 3) {
      VarId v{VarKind::kField, parse_index(cols[1], where)};
      c.fields.emplace_back(v, cols[2]);
      if (cols.size() > 3 && !cols[3].empty()) c.field_names[v] = cols[3];
    } else if (tag == "internal" && cols.size() == 4) {
      ApiSignature sig;
      sig.name = cols[1];
      sig.return_type = cols[2];
      sig.param_types = parse_types(cols[3]);
      sig.is_internal = true;
      c.internal_methods.push_back(sig);
    } else if (tag == "method" && cols.size() == 4) {
      if (parse_index(cols[1], where) != static_cast<int>(c.methods.size())) {
        throw DataError(where + ": methods must be numbered 0, 1, ... in order");
      }
      MethodRecord m;
      m.ctx.name = cols[2];
      m.ctx.method_ret_type = cols[3];
      c.methods.push_back(std::move(m));
    } else if (tag == "formal" && cols.size() >= 3) {
      if (c.methods.empty()) throw DataError(where + ": formal before any method");
      VarId v{VarKind::kFormal, parse_index(cols[1], where)};
      auto& m = c.methods.back().ctx;
      m.formals.emplace_back(v, cols[2]);
      if (cols.size() > 3 && !cols[3].empty()) m.display_names[v] = cols[3];
    } else {
      throw DataError(where + ": unrecognized line");
    }
  }
  if (!have_class) throw DataError("context has no class line");
  for (auto& m : c.methods) {
    m.ctx.fields = c.fields;
    m.ctx.internal_methods = c.internal_methods;
    for (const auto& [v, n] : c.field_names) m.ctx.display_names[v] = n;
  }
  return c;
}

void write_corpus(const std::string& dir, const ApiRegistry& registry, const std::vector<ClassRecord>& records,
                  const GrammarSpec& g) {
  fs::create_directories(fs::path(dir) / "classes");
  {
    std::ofstream reg(fs::path(dir) / "registry.tsv");
    if (!reg) throw DataError("cannot write " + dir + "/registry.tsv");
    registry.write_tsv(reg);
  }
  for (const auto& c : records) {
    const fs::path cdir = fs::path(dir) / "classes" / std::to_string(c.id);
    fs::create_directories(cdir);
    std::ofstream ctx(cdir / "context.txt");
    write_context(ctx, c);
    std::ofstream ev(cdir / "evidence.txt");
    for (size_t k = 0; k < c.methods.size(); ++k) {
      ev << "method\t" << k << '\n';
      write_evidence(ev, c.methods[k].evidence);
    }
    for (size_t k = 0; k < c.methods.size(); ++k) {
      std::ofstream body(cdir / ("body_" + std::to_string(k) + ".ast"));
      body << serialize_ast(c.methods[k].body, g) << '\n';
    }
    if (!ctx || !ev) throw DataError("cannot write class " + cdir.string());
  }
}

ApiRegistry read_corpus_registry(const std::string& dir) {
  return ApiRegistry::load((fs::path(dir) / "registry.tsv").string());
}

std::vector<ClassRecord> read_corpus(const std::string& dir, const GrammarSpec& g) {
  const fs::path root = fs::path(dir) / "classes";
  if (!fs::is_directory(root)) throw DataError("corpus has no classes/ directory: " + dir);
  std::vector<std::pair<int, fs::path>> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    dirs.emplace_back(parse_index(e.path().filename().string(), "class directory"), e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<ClassRecord> out;
  for (const auto& [id, p] : dirs) {
    std::ifstream ctx(p / "context.txt");
    if (!ctx) throw DataError("missing " + (p / "context.txt").string());
    ClassRecord c = read_context(ctx);
    if (c.id != id) throw DataError("class id in " + (p / "context.txt").string() + " does not match its directory");
    std::vector<EvidenceSet> ev;
    if (fs::exists(p / "evidence.txt")) {
      std::ifstream es(p / "evidence.txt");
      ev = read_evidence_records(es);
    }
    if (!ev.empty() && ev.size() != c.methods.size()) {
      throw DataError((p / "evidence.txt").string() + ": one record per method expected");
    }
    for (size_t k = 0; k < c.methods.size(); ++k) {
      if (!ev.empty()) c.methods[k].evidence = ev[k];
      const fs::path body = p / ("body_" + std::to_string(k) + ".ast");
      try {
        c.methods[k].body = parse_ast(read_file(body), g);
      } catch (const DataError& e) {
        throw DataError(body.string() + ": " + e.what());
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<TrainingExample> extract_examples(const ClassRecord& record, size_t method, const GrammarSpec& g) {
  const MethodRecord& m = record.methods.at(method);
  AnnotatedAst a = annotate(m.body, m.ctx, g);
  return examples_from_annotated(a, g, std::make_shared<const EvidenceSet>(m.evidence));
}

std::vector<TrainingExample> extract_corpus(const std::vector<ClassRecord>& records, const GrammarSpec& g,
                                            Split split) {
  std::vector<TrainingExample> out;
  for (const auto& c : records) {
    if (split == Split::kTrain && is_held_out(c.id)) continue;
    if (split == Split::kHeldOut && !is_held_out(c.id)) continue;
    for (size_t k = 0; k < c.methods.size(); ++k) {
      auto ex = extract_examples(c, k, g);
      out.insert(out.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
    }
  }
  return out;
}

void write_examples_tsv(std::ostream& out, int class_id, size_t method, const std::vector<TrainingExample>& ex,
                        const GrammarSpec& g) {
  for (const auto& e : ex) {
    out << class_id << '\t' << method << '\t' << e.index << '\t' << g.symbol(e.symbol).name << '\t' << e.target
        << '\t' << (e.parent_rule.empty() ? "-" : e.parent_rule) << '\t' << e.position << '\t';
    for (size_t i = 0; i < e.index; ++i) out << (i ? " " : "") << (*e.sequence)[i];
    out << '\t';
    bool first = true;
    for (Attr a : e.inherited.attrs()) {
      out << (first ? "" : " ; ") << attr_name(a) << '=' << format_attr_value(e.inherited.get(a));
      first = false;
    }
    out << '\n';
  }
}

EvidenceSet drop_evidence(const EvidenceSet& x, double p, uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("drop_evidence: probability must be in [0, 1]");
  Rng rng(seed);
  EvidenceSet out;
  for (const auto& item : x.items) {
    if (rng.uniform() < p) out.items.push_back(item);
  }
  return out;
}

}  // namespace nag
