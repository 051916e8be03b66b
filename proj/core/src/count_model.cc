#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nag/model.h"

namespace nag {

namespace {

constexpr int kMaxOrdinal = 12;

std::string join_vars(const std::vector<VarId>& vs) {
  std::string s;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ',';
    s += to_string(vs[i]);
  }
  return s.empty() ? "-" : s;
}

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

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExpansionSite TrainingExample::site() const {
  ExpansionSite s;
  s.symbol = symbol;
  s.parent_rule = parent_rule;
  s.position = position;
  s.stmt_ordinal = stmt_ordinal;
  if (sequence && index > 0) s.prev_choice = (*sequence)[index - 1];
  return s;
}

CountModel::CountModel(AlternativeTable alts, CountOptions opts)
    : alts_(std::move(alts)), opts_(opts) {}

std::string CountModel::context_key(int level, const ContextFeatures& f, const std::string& sym) {
  const std::string exp = f.expected_type ? *f.expected_type : "-";
  switch (level) {
    case 0: {
      std::string k = sym + "|" + f.parent_rule + "|" + std::to_string(f.position) + "|" + exp + "|" +
                      join_vars(f.match_set);
      // Statement sites also see their place in the block and whether a return came before.
      if (f.stmt_ordinal >= 0) {
        k += "|#" + std::to_string(std::min(f.stmt_ordinal, kMaxOrdinal)) + (f.ret_stmt_generated ? "r" : "");
      }
      return k;
    }
    case 1: return sym + "|" + exp;
    default: return sym;
  }
}

void CountModel::observe(const ContextFeatures& f, const std::string& choice) {
  if (f.symbol < 0 || f.symbol >= static_cast<int>(alts_.num_symbols())) {
    throw DataError("unknown symbol in training example");
  }
  int idx = alts_.index_of(f.symbol, choice);
  if (idx < 0) {
    throw DataError("choice '" + choice + "' is not an alternative of " + alts_.symbol_name(f.symbol));
  }
  const size_t k = alts_.keys(f.symbol).size();
  for (int l = 0; l < kLevels; ++l) {
    Entry& e = tables_[l][context_key(l, f, alts_.symbol_name(f.symbol))];
    if (e.counts.empty()) e.counts.assign(k, 0.0);
    e.counts[idx] += 1.0;
    e.total += 1.0;
  }
}

std::vector<double> CountModel::predict(const ContextFeatures& f, const std::vector<double>*) const {
  if (f.symbol < 0 || f.symbol >= static_cast<int>(alts_.num_symbols())) {
    throw DataError("predict: unknown symbol");
  }
  const size_t k = alts_.keys(f.symbol).size();
  if (k == 0) throw DataError("predict: symbol " + alts_.symbol_name(f.symbol) + " has no alternatives");
  const double a = opts_.alpha;
  const std::string& sym = alts_.symbol_name(f.symbol);
  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  for (int l = kLevels - 1; l >= 0; --l) {
    auto it = tables_[l].find(context_key(l, f, sym));
    if (it == tables_[l].end() || it->second.total <= 0) continue;
    const Entry& e = it->second;
    const double denom = e.total + static_cast<double>(k) * a;
    const double lambda = l == kLevels - 1 ? 1.0 : e.total / (e.total + 1.0);
    for (size_t i = 0; i < k; ++i) {
      const double lap = (e.counts[i] + a) / denom;
      p[i] = lambda * lap + (1.0 - lambda) * p[i];
    }
  }
  return p;
}

void CountModel::write(std::ostream& out) const {
  out << "nag-count-model\t1\n";
  out << "alpha\t" << fmt_double(opts_.alpha) << '\n';
  out << "use_attributes\t" << (opts_.use_attributes ? 1 : 0) << '\n';
  out << "hash_seed\t" << kHashSeed << '\n';
  for (size_t s = 0; s < alts_.num_symbols(); ++s) {
    out << "symbol\t" << alts_.symbol_name(static_cast<SymbolId>(s)) << '\t'
        << alts_.keys(static_cast<SymbolId>(s)).size();
    for (const auto& key : alts_.keys(static_cast<SymbolId>(s))) out << '\t' << key;
    out << '\n';
  }
  for (int l = 0; l < kLevels; ++l) {
    std::vector<const std::pair<const std::string, Entry>*> rows;
    for (const auto& kv : tables_[l]) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](auto* x, auto* y) { return x->first < y->first; });
    for (const auto* kv : rows) {
      // The symbol name is the context key's first field.
      const std::string sym = kv->first.substr(0, kv->first.find('|'));
      SymbolId sid = -1;
      for (size_t s = 0; s < alts_.num_symbols(); ++s) {
        if (alts_.symbol_name(static_cast<SymbolId>(s)) == sym) sid = static_cast<SymbolId>(s);
      }
      const auto& keys = alts_.keys(sid);
      for (size_t i = 0; i < keys.size(); ++i) {
        if (kv->second.counts[i] == 0) continue;
        out << l << '\t' << kv->first << '\t' << keys[i] << '\t' << fmt_double(kv->second.counts[i])
            << '\n';
      }
    }
  }
}

void CountModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path);
  write(out);
}

std::unique_ptr<CountModel> CountModel::read(std::istream& in, const AlternativeTable& alts) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("nag-count-model\t", 0) != 0) {
    throw DataError("not a count model file");
  }
  CountOptions opts;
  size_t symbols_seen = 0;
  std::unique_ptr<CountModel> m;
  auto ensure_model = [&] {
    if (!m) m = std::make_unique<CountModel>(alts, opts);
  };
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    const std::string where = "model line " + std::to_string(lineno);
    if (cols[0] == "alpha" && cols.size() == 2) {
      opts.alpha = std::stod(cols[1]);
    } else if (cols[0] == "use_attributes" && cols.size() == 2) {
      opts.use_attributes = cols[1] == "1";
    } else if (cols[0] == "hash_seed") {
      continue;
    } else if (cols[0] == "symbol") {
      if (cols.size() < 3 || symbols_seen >= alts.num_symbols()) throw DataError(where + ": bad symbol line");
      SymbolId s = static_cast<SymbolId>(symbols_seen++);
      std::vector<std::string> keys(cols.begin() + 3, cols.end());
      if (cols[1] != alts.symbol_name(s) || keys != alts.keys(s)) {
        throw DataError(where + ": model alternatives for " + cols[1] + " do not match the grammar");
      }
    } else if (cols.size() == 4 && cols[0].size() == 1 && cols[0][0] >= '0' && cols[0][0] < '0' + kLevels) {
      ensure_model();
      const int level = cols[0][0] - '0';
      const std::string sym = cols[1].substr(0, cols[1].find('|'));
      SymbolId sid = -1;
      for (size_t s = 0; s < alts.num_symbols(); ++s) {
        if (alts.symbol_name(static_cast<SymbolId>(s)) == sym) sid = static_cast<SymbolId>(s);
      }
      if (sid < 0) throw DataError(where + ": unknown symbol " + sym);
      int idx = alts.index_of(sid, cols[2]);
      if (idx < 0) throw DataError(where + ": unknown alternative " + cols[2]);
      Entry& e = m->tables_[level][cols[1]];
      if (e.counts.empty()) e.counts.assign(alts.keys(sid).size(), 0.0);
      double c = std::stod(cols[3]);
      e.counts[idx] += c;
    } else {
      throw DataError(where + ": unrecognized line");
    }
  }
  if (symbols_seen != alts.num_symbols()) throw DataError("model symbol table does not match the grammar");
  ensure_model();
  m->opts_ = opts;
  // Totals in alternative order, as during training where counts are integers.
  for (auto& t : m->tables_) {
    for (auto& [key, e] : t) {
      e.total = 0;
      for (double c : e.counts) e.total += c;
    }
  }
  return m;
}

std::unique_ptr<CountModel> train_count(const std::vector<TrainingExample>& examples,
                                        const GrammarSpec& g, const CountOptions& opts) {
  auto m = std::make_unique<CountModel>(AlternativeTable(g), opts);
  Vocabulary vocab = Vocabulary::from_grammar(g);
  for (const auto& ex : examples) {
    m->observe(encode_context(ex.site(), ex.inherited, vocab, opts.use_attributes), ex.target);
  }
  return m;
}

std::unique_ptr<ConditionalModel> load_model(const std::string& path, const GrammarSpec& g) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path);
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  AlternativeTable alts(g);
  if (first.rfind("nag-count-model\t", 0) == 0) return CountModel::read(in, alts);
  if (first.rfind("nag-latent-model\t", 0) == 0) return LatentModel::read(in, alts);
  throw DataError("unrecognized model file " + path);
}

}  // namespace nag
