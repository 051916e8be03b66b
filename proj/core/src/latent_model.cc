#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "nag/model.h"

namespace nag {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> softmax(std::vector<double> logits) {
  double mx = -INFINITY;
  for (double l : logits) mx = std::max(mx, l);
  double sum = 0;
  for (double& l : logits) {
    l = std::exp(l - mx);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

void read_values(std::istream& in, std::vector<double>& out, size_t n, const char* what) {
  out.resize(n);
  for (size_t i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) throw DataError(std::string("latent model: truncated ") + what);
    out[i] = std::stod(tok);
  }
}

}  // namespace

std::vector<std::string> feature_strings(const ContextFeatures& f) {
  std::vector<std::string> out;
  const std::string pp = f.parent_rule + ":" + std::to_string(f.position);
  out.push_back("p=" + pp);
  out.push_back("prev=" + f.prev_choice);
  if (f.stmt_ordinal >= 0) out.push_back("ord=" + pp + ":" + std::to_string(std::min(f.stmt_ordinal, 12)));
  if (!f.attributes) return out;
  if (f.stmt_ordinal >= 0 && f.ret_stmt_generated) out.push_back("ordret=" + pp);
  const std::string exp = f.expected_type ? *f.expected_type : "-";
  out.push_back("e=" + exp);
  out.push_back("pe=" + pp + ":" + exp);
  for (const auto& v : f.match_set) out.push_back("m=" + to_string(v));
  out.push_back("nm=" + std::to_string(std::min<size_t>(f.match_set.size(), 3)));
  for (const auto& [r, c] : f.symtab_cells) out.push_back("st=" + std::to_string(r) + ":" + std::to_string(c));
  for (const auto& v : f.initialized) out.push_back("init=" + to_string(v));
  for (const auto& v : f.used) out.push_back("used=" + to_string(v));
  out.push_back(std::string("ret=") + (f.ret_stmt_generated ? "1" : "0"));
  out.push_back(std::string("itr=") + (f.itr_vec.first ? "1" : "0") + (f.itr_vec.second ? "1" : "0"));
  out.push_back("mrt=" + (f.method_ret_type ? *f.method_ret_type : std::string("-")));
  return out;
}

LatentModel::LatentModel(AlternativeTable alts, std::vector<std::string> features, int dim,
                         bool use_attributes)
    : alts_(std::move(alts)), feature_names_(std::move(features)), dim_(dim), use_attributes_(use_attributes) {
  if (dim_ <= 0) throw DataError("latent model: dim must be positive");
  for (size_t i = 0; i < feature_names_.size(); ++i) feature_index_[feature_names_[i]] = static_cast<int>(i);
  encoder_.dim = dim_;
  const size_t d = static_cast<size_t>(dim_);
  for (auto& m : encoder_.maps) {
    m.assign(d * d, 0.0);
    for (size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
  }
  layout();
}

void LatentModel::layout() {
  const size_t n = alts_.num_symbols();
  const size_t F = feature_names_.size();
  const size_t d = static_cast<size_t>(dim_);
  bias_off_.resize(n);
  w_off_.resize(n);
  u_off_.resize(n);
  size_t off = 0;
  for (size_t s = 0; s < n; ++s) {
    bias_off_[s] = off;
    off += alts_.keys(static_cast<SymbolId>(s)).size();
  }
  for (size_t s = 0; s < n; ++s) {
    w_off_[s] = off;
    off += alts_.keys(static_cast<SymbolId>(s)).size() * F;
  }
  for (size_t s = 0; s < n; ++s) {
    u_off_[s] = off;
    off += alts_.keys(static_cast<SymbolId>(s)).size() * d;
  }
  theta_.assign(off, 0.0);
}

size_t LatentModel::num_parameters() const {
  const size_t d = static_cast<size_t>(dim_);
  return theta_.size() + kNumEvidenceKinds * d * d + kNumEvidenceKinds;
}

std::vector<double> LatentModel::parameters() const {
  std::vector<double> out = theta_;
  out.reserve(num_parameters());
  for (const auto& m : encoder_.maps) out.insert(out.end(), m.begin(), m.end());
  for (double s2 : encoder_.sigma2) out.push_back(std::log(s2));
  return out;
}

void LatentModel::set_parameters(const std::vector<double>& theta) {
  if (theta.size() != num_parameters()) throw DataError("latent model: parameter vector size mismatch");
  const size_t d = static_cast<size_t>(dim_);
  std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(theta_.size()), theta_.begin());
  size_t off = theta_.size();
  for (auto& m : encoder_.maps) {
    m.assign(theta.begin() + static_cast<std::ptrdiff_t>(off),
             theta.begin() + static_cast<std::ptrdiff_t>(off + d * d));
    off += d * d;
  }
  for (auto& s2 : encoder_.sigma2) s2 = std::exp(theta[off++]);
}

void LatentModel::set_parameter(size_t i, double value) {
  if (i >= num_parameters()) throw DataError("latent model: parameter index out of range");
  if (i < theta_.size()) {
    theta_[i] = value;
    return;
  }
  i -= theta_.size();
  const size_t dd = static_cast<size_t>(dim_) * static_cast<size_t>(dim_);
  if (i < encoder_.maps.size() * dd) {
    encoder_.maps[i / dd][i % dd] = value;
    return;
  }
  encoder_.sigma2[i - encoder_.maps.size() * dd] = std::exp(value);
}

std::vector<int> LatentModel::active_features(const ContextFeatures& f) const {
  std::vector<int> out;
  for (const auto& s : feature_strings(f)) {
    auto it = feature_index_.find(s);
    if (it != feature_index_.end()) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> LatentModel::distribution(SymbolId s, const std::vector<int>& active,
                                              const std::vector<double>& z) const {
  const size_t k = alts_.keys(s).size();
  const size_t F = feature_names_.size();
  const size_t d = static_cast<size_t>(dim_);
  std::vector<double> logits(k);
  for (size_t a = 0; a < k; ++a) {
    double l = theta_[offset_bias(s) + a];
    const double* w = &theta_[offset_w(s) + a * F];
    for (int phi : active) l += w[phi];
    const double* u = &theta_[offset_u(s) + a * d];
    for (size_t i = 0; i < d; ++i) l += u[i] * z[i];
    logits[a] = l;
  }
  return softmax(std::move(logits));
}

std::vector<double> LatentModel::predict(const ContextFeatures& f, const std::vector<double>* z) const {
  if (f.symbol < 0 || f.symbol >= static_cast<int>(alts_.num_symbols())) {
    throw DataError("predict: unknown symbol");
  }
  if (!z || z->size() != static_cast<size_t>(dim_)) throw DataError("latent model: predict needs z of size dim");
  if (alts_.keys(f.symbol).empty()) {
    throw DataError("predict: symbol " + alts_.symbol_name(f.symbol) + " has no alternatives");
  }
  return distribution(f.symbol, active_features(f), *z);
}

std::vector<LatentModel::Prepared> LatentModel::prepare(const std::vector<const TrainingExample*>& batch,
                                                        const Vocabulary& vocab) const {
  const size_t d = static_cast<size_t>(dim_);
  std::vector<Prepared> out;
  out.reserve(batch.size());
  for (const TrainingExample* ex : batch) {
    const ContextFeatures f = encode_context(ex->site(), ex->inherited, vocab, use_attributes_);
    Prepared p;
    p.symbol = f.symbol;
    p.target = alts_.index_of(f.symbol, ex->target);
    if (p.target < 0) throw DataError("latent objective: target '" + ex->target + "' is not an alternative");
    p.active = active_features(f);
    for (auto& h : p.bag_sum) h.assign(d, 0.0);
    if (ex->evidence) {
      for (const auto& item : ex->evidence->items) {
        const int j = static_cast<int>(item.kind);
        const auto bag = hashed_bag(item.tokens, dim_, encoder_.hash_seed);
        p.count[j] += 1;
        for (size_t r = 0; r < d; ++r) p.bag_sum[j][r] += bag[r];
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

double LatentModel::objective(const std::vector<const TrainingExample*>& batch, const Vocabulary& vocab,
                              const Noise& noise, std::vector<double>* grad) const {
  return objective(prepare(batch, vocab), noise, grad);
}

double LatentModel::objective(const std::vector<Prepared>& batch, const Noise& noise,
                              std::vector<double>* grad) const {
  if (noise.v.size() != batch.size()) throw DataError("latent objective: noise/batch size mismatch");
  for (double s2 : encoder_.sigma2) {
    if (!(s2 > 0.0)) throw DataError("posterior: sigma^2 must be positive");
  }
  const size_t F = feature_names_.size();
  const size_t d = static_cast<size_t>(dim_);
  const size_t theta_n = theta_.size();
  if (grad) grad->assign(num_parameters(), 0.0);
  double total = 0;

  for (size_t i = 0; i < batch.size(); ++i) {
    const Prepared& ex = batch[i];
    const size_t k = alts_.keys(ex.symbol).size();
    const int target = ex.target;
    const int S = static_cast<int>(noise.v[i].size() / d);
    if (S <= 0 || noise.v[i].size() != static_cast<size_t>(S) * d) {
      throw DataError("latent objective: noise has wrong shape");
    }
    const auto& H = ex.bag_sum;
    const auto& n = ex.count;

    // G_j = A_j H_j (identity when the map is empty); the posterior from the sums.
    std::array<std::vector<double>, kNumEvidenceKinds> G;
    double D = 1.0;
    std::vector<double> mean(d, 0.0);
    for (int j = 0; j < kNumEvidenceKinds; ++j) {
      const auto& m = encoder_.maps[j];
      if (m.empty()) {
        G[j] = H[j];
      } else {
        G[j].assign(d, 0.0);
        for (size_t r = 0; r < d; ++r) {
          double acc = 0;
          for (size_t c = 0; c < d; ++c) acc += m[r * d + c] * H[j][c];
          G[j][r] = acc;
        }
      }
      const double sj = 1.0 / encoder_.sigma2[j];
      D += n[j] * sj;
      for (size_t r = 0; r < d; ++r) mean[r] += sj * G[j][r];
    }
    for (double& x : mean) x /= D;
    const double sd = std::sqrt(1.0 / D);

    std::vector<double> g_mean(d, 0.0);                  // sum over samples of dL/dz
    std::array<double, kNumEvidenceKinds> g_s{};         // dL/ds_j from the sd term
    std::vector<double> z(d);
    for (int s = 0; s < S; ++s) {
      const double* V = &noise.v[i][static_cast<size_t>(s) * d];
      for (size_t r = 0; r < d; ++r) z[r] = mean[r] + sd * V[r];
      std::vector<double> p = distribution(ex.symbol, ex.active, z);
      total += std::log(p[target]) / S;
      if (!grad) continue;
      std::vector<double> gz(d, 0.0);
      for (size_t a = 0; a < k; ++a) {
        const double coef = ((static_cast<int>(a) == target ? 1.0 : 0.0) - p[a]) / S;
        if (coef == 0) continue;
        (*grad)[offset_bias(ex.symbol) + a] += coef;
        double* gw = &(*grad)[offset_w(ex.symbol) + a * F];
        for (int phi : ex.active) gw[phi] += coef;
        double* gu = &(*grad)[offset_u(ex.symbol) + a * d];
        const double* u = &theta_[offset_u(ex.symbol) + a * d];
        for (size_t r = 0; r < d; ++r) {
          gu[r] += coef * z[r];
          gz[r] += coef * u[r];
        }
      }
      double gv = 0;
      for (size_t r = 0; r < d; ++r) {
        g_mean[r] += gz[r];
        gv += gz[r] * V[r];
      }
      // d sd / d s_j = -1/2 n_j D^{-3/2}
      for (int j = 0; j < kNumEvidenceKinds; ++j) g_s[j] += -0.5 * n[j] * std::pow(D, -1.5) * gv;
    }
    if (!grad) continue;
    for (int j = 0; j < kNumEvidenceKinds; ++j) {
      if (n[j] == 0) continue;
      const double sj = 1.0 / encoder_.sigma2[j];
      // dL/dA_j = (s_j / D) g H_j^T
      double* gA = &(*grad)[theta_n + static_cast<size_t>(j) * d * d];
      for (size_t r = 0; r < d; ++r) {
        const double gr = sj / D * g_mean[r];
        if (gr == 0) continue;
        for (size_t c = 0; c < d; ++c) gA[r * d + c] += gr * H[j][c];
      }
      // d mean / d s_j = (G_j - mean n_j) / D
      double dm = 0;
      for (size_t r = 0; r < d; ++r) dm += g_mean[r] * (G[j][r] - mean[r] * n[j]) / D;
      const double dsj = dm + g_s[j];
      // rho_j = log sigma_j^2, s_j = exp(-rho_j)
      (*grad)[theta_n + kNumEvidenceKinds * d * d + static_cast<size_t>(j)] += -sj * dsj;
    }
  }
  return total;
}

LatentModel::Noise draw_noise(size_t batch, int mc_samples, int dim, Rng& rng) {
  LatentModel::Noise noise;
  noise.v.resize(batch);
  for (auto& v : noise.v) {
    v.resize(static_cast<size_t>(mc_samples) * static_cast<size_t>(dim));
    for (double& x : v) x = rng.normal();
  }
  return noise;
}

std::unique_ptr<LatentModel> train_latent(const std::vector<TrainingExample>& examples,
                                          const GrammarSpec& g, const LatentHyper& hyper) {
  if (examples.empty()) throw DataError("train_latent: no training examples");
  if (hyper.batch <= 0 || hyper.mc_samples <= 0 || hyper.steps < 0) {
    throw DataError("train_latent: batch, mc_samples must be positive and steps >= 0");
  }
  Vocabulary vocab = Vocabulary::from_grammar(g);
  std::set<std::string> dict;
  for (const auto& ex : examples) {
    for (auto& s : feature_strings(encode_context(ex.site(), ex.inherited, vocab, hyper.use_attributes))) {
      dict.insert(std::move(s));
    }
  }
  auto m = std::make_unique<LatentModel>(AlternativeTable(g), std::vector<std::string>(dict.begin(), dict.end()),
                                         hyper.dim, hyper.use_attributes);
  Rng rng(hyper.seed);
  std::vector<double> theta = m->parameters();
  std::vector<double> grad;
  const size_t bs = std::min<size_t>(static_cast<size_t>(hyper.batch), examples.size());
  std::vector<const TrainingExample*> batch(bs);
  for (int step = 0; step < hyper.steps; ++step) {
    for (auto& b : batch) b = &examples[rng.below(examples.size())];
    auto noise = draw_noise(bs, hyper.mc_samples, hyper.dim, rng);
    const double obj = m->objective(batch, vocab, noise, &grad);
    if (!std::isfinite(obj)) {
      throw DataError("train_latent: non-finite objective at step " + std::to_string(step) + " (lr " +
                      fmt_double(hyper.lr) + ", last loss " +
                      (m->loss_trace().empty() ? std::string("n/a") : fmt_double(m->loss_trace().back())) + ")");
    }
    for (size_t i = 0; i < theta.size(); ++i) theta[i] += hyper.lr * grad[i] / static_cast<double>(bs);
    m->set_parameters(theta);
    m->mutable_loss_trace().push_back(-obj / static_cast<double>(bs));
  }
  return m;
}

void LatentModel::write(std::ostream& out) const {
  out << "nag-latent-model\t1\n";
  out << "dim\t" << dim_ << '\n';
  out << "use_attributes\t" << (use_attributes_ ? 1 : 0) << '\n';
  out << "hash_seed\t" << encoder_.hash_seed << '\n';
  for (size_t s = 0; s < alts_.num_symbols(); ++s) {
    out << "symbol\t" << alts_.symbol_name(static_cast<SymbolId>(s)) << '\t'
        << alts_.keys(static_cast<SymbolId>(s)).size();
    for (const auto& key : alts_.keys(static_cast<SymbolId>(s))) out << '\t' << key;
    out << '\n';
  }
  for (const auto& f : feature_names_) out << "feature\t" << f << '\n';
  const auto theta = parameters();
  out << "parameters\t" << theta.size() << '\n';
  for (size_t i = 0; i < theta.size(); ++i) out << fmt_double(theta[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  out << '\n';
  out << "loss_trace\t" << loss_trace_.size() << '\n';
  for (double l : loss_trace_) out << fmt_double(l) << '\n';
}

void LatentModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path);
  write(out);
}

std::unique_ptr<LatentModel> LatentModel::read(std::istream& in, const AlternativeTable& alts) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("nag-latent-model\t", 0) != 0) {
    throw DataError("not a latent model file");
  }
  int dim = 0;
  bool use_attr = true;
  uint64_t hash_seed = kHashSeed;
  size_t symbols_seen = 0;
  std::vector<std::string> features;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    const std::string head = line.substr(0, tab);
    const std::string rest = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (head == "dim") {
      dim = std::stoi(rest);
    } else if (head == "use_attributes") {
      use_attr = rest == "1";
    } else if (head == "hash_seed") {
      hash_seed = std::stoull(rest);
    } else if (head == "symbol") {
      if (symbols_seen >= alts.num_symbols()) throw DataError("latent model: too many symbols");
      std::vector<std::string> cols;
      std::string cur;
      for (char c : rest) {
        if (c == '\t') {
          cols.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      cols.push_back(cur);
      SymbolId s = static_cast<SymbolId>(symbols_seen++);
      std::vector<std::string> keys(cols.begin() + 2, cols.end());
      if (cols[0] != alts.symbol_name(s) || keys != alts.keys(s)) {
        throw DataError("latent model: alternatives for " + cols[0] + " do not match the grammar");
      }
    } else if (head == "feature") {
      features.push_back(rest);
    } else if (head == "parameters") {
      if (symbols_seen != alts.num_symbols()) throw DataError("latent model symbol table does not match the grammar");
      auto m = std::make_unique<LatentModel>(alts, std::move(features), dim, use_attr);
      m->encoder_.hash_seed = hash_seed;
      const size_t n = std::stoull(rest);
      if (n != m->num_parameters()) throw DataError("latent model: parameter count mismatch");
      std::vector<double> theta;
      read_values(in, theta, n, "parameters");
      m->set_parameters(theta);
      std::string tag;
      size_t nl = 0;
      if (in >> tag >> nl && tag == "loss_trace") read_values(in, m->loss_trace_, nl, "loss trace");
      return m;
    } else {
      throw DataError("latent model: unrecognized line '" + head + "'");
    }
  }
  throw DataError("latent model: missing parameters");
}

}  // namespace nag
