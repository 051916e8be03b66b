#include "nag/generator.h"

#include <algorithm>
#include <cmath>
#include <memory>

namespace nag {

namespace {

bool readable(const SymTab& st, const Flags& fl, const VarId& v, const std::optional<TypeName>& t) {
  if (v.is_literal() || !t) return false;
  const TypeName* have = st.find(v);
  return have && *have == *t && fl.initialized(v);
}

bool any_readable(const SymTab& st, const Flags& fl, const TypeName& t) {
  for (const auto& [v, vt] : st.entries()) {
    if (vt == t && !v.is_literal() && fl.initialized(v)) return true;
  }
  return false;
}

struct Site {
  const SymTab* st;
  const Flags* fl;
  std::optional<TypeName> exp;
  std::optional<TypeName> mrt;
};

std::vector<bool> var_mask(const GrammarSpec& g, const PendingSite& ps, const Site& s) {
  const auto& alts = g.leaf_alternatives(ps.symbol);
  std::vector<bool> ok(alts.size(), true);
  const std::string& r = ps.parent_rule;
  const int pos = ps.position;
  auto each = [&](auto pred) {
    for (size_t i = 0; i < alts.size(); ++i) ok[i] = pred(std::get<VarId>(alts[i]));
  };
  if (r == "b6a" && pos == 0) {
    each([&](const VarId& v) { return (v.is_literal() && s.exp) || readable(*s.st, *s.fl, v, s.exp); });
  } else if (r == "b3" && pos == 2) {
    each([&](const VarId& v) { return v.is_literal() ? !s.exp : readable(*s.st, *s.fl, v, s.exp); });
  } else if (r == "b3" && pos == 3) {
    each([&](const VarId& v) {
      if (v.is_literal()) return true;
      const TypeName* t = s.st->find(v);
      return s.exp && t && *t == *s.exp;
    });
  } else if (r == "b7" && pos == 0) {
    each([&](const VarId& v) {
      if (v.is_literal()) return s.mrt && *s.mrt == kVoid;
      return s.mrt && *s.mrt != kVoid && readable(*s.st, *s.fl, v, s.mrt);
    });
  } else if ((r == "b1" || r == "b2" || r == "c5a") && pos == 1) {
    // Declarations take a fresh local; a bound one only when none is left.
    bool fresh = false;
    for (const auto& a : alts) {
      const VarId& v = std::get<VarId>(a);
      fresh = fresh || (v.kind == VarKind::kLocal && !s.st->find(v));
    }
    each([&](const VarId& v) { return v.kind == VarKind::kLocal && (!fresh || !s.st->find(v)); });
  }
  return ok;
}

std::vector<bool> type_mask(const GrammarSpec& g, const PendingSite& ps, const Site& s) {
  const auto& alts = g.leaf_alternatives(ps.symbol);
  std::vector<bool> ok(alts.size(), true);
  const std::string& r = ps.parent_rule;
  for (size_t i = 0; i < alts.size(); ++i) {
    const TypeName& t = std::get<TypeName>(alts[i]);
    if (r == "b2" && ps.position == 2) {
      ok[i] = s.exp && t == *s.exp;
    } else if (r == "b1" && ps.position == 0) {
      ok[i] = t != kVoid;
    } else if ((r == "b2" || r == "c5a") && ps.position == 0) {
      ok[i] = !is_primitive(t);
    }
  }
  return ok;
}

std::vector<bool> api_mask(const GrammarSpec& g, const PendingSite& ps, const Site& s) {
  const auto& alts = g.leaf_alternatives(ps.symbol);
  std::vector<bool> ok(alts.size(), true);
  for (size_t i = 0; i < alts.size(); ++i) {
    const ApiSignature* sig = g.registry().find(std::get<ApiRef>(alts[i]).name);
    if (!sig) continue;
    if (s.exp) {
      ok[i] = sig->receiver_type && *sig->receiver_type == *s.exp;
    } else {
      ok[i] = !sig->receiver_type || any_readable(*s.st, *s.fl, *sig->receiver_type);
    }
  }
  return ok;
}

std::vector<bool> rule_mask(const GrammarSpec& g, const PendingSite& ps, const Site& s) {
  const auto& alts = g.alternatives(ps.symbol);
  std::vector<bool> ok(alts.size(), true);
  for (size_t i = 0; i < alts.size(); ++i) {
    const std::string& rid = g.production(alts[i]).rule_id;
    if (rid == "b6a") {
      ok[i] = ps.inh.has(Attr::kTypeList) && !ps.inh.types(Attr::kTypeList).empty();
    } else if (rid == "b6b") {
      ok[i] = !ps.inh.has(Attr::kTypeList) || ps.inh.types(Attr::kTypeList).empty();
    } else if (rid == "b4a") {
      bool callable = false;
      const auto& expr = s.exp;
      if (expr) {
        for (const auto& n : g.registry().callable_names()) {
          const ApiSignature* sig = g.registry().find(n);
          callable = callable || (sig->receiver_type && *sig->receiver_type == *expr);
        }
      }
      ok[i] = callable;
    } else if (rid == "a6") {
      ok[i] = s.mrt && (*s.mrt == kVoid || any_readable(*s.st, *s.fl, *s.mrt));
    }
  }
  return ok;
}

// Stmt-level recursive productions (a2a, c1.*): the ones masked near the
// depth cap.
bool near_cap_recursive(const GrammarSpec& g, int rule) {
  auto a2a = g.find_rule("a2a");
  if (!a2a) return false;
  return g.production(rule).lhs == g.production(*a2a).lhs && g.is_recursive(rule);
}

class Stepper {
 public:
  Stepper(const GrammarSpec& g, const ConditionalModel& m, const GenConfig& cfg)
      : g_(g), m_(m), cfg_(cfg), vocab_(Vocabulary::from_grammar(g)) {}

  // Model distribution at the pending site after the depth/sequence caps
  // and (if enabled) the validity mask.
  std::vector<double> dist(const Derivation& d, const std::vector<double>* z, std::vector<MaskFallback>& fb,
                           size_t step) const {
    const PendingSite& ps = d.pending();
    const auto f = encode_context(d.site(), ps.inh, vocab_, m_.use_attributes());
    std::vector<double> p = m_.predict(f, z);
    const Symbol& sym = g_.symbol(ps.symbol);
    if (sym.is_leaf()) {
      if (ps.depth > cfg_.max_depth) abort(d, "leaf " + sym.name + " below maxDepth");
      if (cfg_.mask_mode == MaskMode::kHard) drop_unfitting_calls(ps, p);
    } else {
      const auto& alts = g_.alternatives(ps.symbol);
      std::vector<bool> fits(alts.size());
      for (size_t i = 0; i < alts.size(); ++i) {
        fits[i] = ps.depth + g_.min_height_rule(alts[i]) - 1 <= cfg_.max_depth;
        if (g_.production(alts[i]).rule_id == "a2a" && d.stmt_expansions() >= cfg_.max_seq_stmts) fits[i] = false;
      }
      if (ps.depth >= cfg_.max_depth - 2) {
        bool escape = false;
        for (size_t i = 0; i < alts.size(); ++i) escape = escape || (fits[i] && !near_cap_recursive(g_, alts[i]));
        if (escape) {
          for (size_t i = 0; i < alts.size(); ++i) fits[i] = fits[i] && !near_cap_recursive(g_, alts[i]);
        }
      }
      double mass = 0;
      for (size_t i = 0; i < p.size(); ++i) {
        if (!fits[i]) p[i] = 0;
        mass += p[i];
      }
      if (!(mass > 0)) abort(d, "no alternative of " + sym.name + " fits maxDepth " + std::to_string(cfg_.max_depth));
      for (double& x : p) x /= mass;
    }
    if (cfg_.mask_mode == MaskMode::kHard) {
      bool fell = false;
      p = apply_mask(g_, p, ps, &fell);
      if (fell) fb.push_back({step, sym.name});
    }
    return p;
  }

  // n arguments nest n ArgLists below the depth of the leaf that fixes the
  // signature (an Api, or the declared type of an ObjInit); under the hard
  // mask a call whose arguments cannot fit would force an invalid b6b.
  void drop_unfitting_calls(const PendingSite& ps, std::vector<double>& p) const {
    const Symbol& sym = g_.symbol(ps.symbol);
    const bool ctor_type = sym.leaf == LeafKind::kType && ps.parent_rule == "b2" && ps.position == 0;
    if (sym.leaf != LeafKind::kApi && !ctor_type) return;
    const auto& alts = g_.leaf_alternatives(ps.symbol);
    std::vector<bool> fits(alts.size(), true);
    double mass = 0;
    for (size_t i = 0; i < alts.size(); ++i) {
      const ApiSignature* sig = ctor_type ? g_.registry().find(constructor_key(std::get<TypeName>(alts[i])))
                                          : g_.registry().find(std::get<ApiRef>(alts[i]).name);
      if (sig) fits[i] = ps.depth + static_cast<int>(sig->param_types.size()) <= cfg_.max_depth;
      if (fits[i]) mass += p[i];
    }
    if (!(mass > 0)) return;
    for (size_t i = 0; i < p.size(); ++i) p[i] = fits[i] ? p[i] / mass : 0.0;
  }

  std::vector<double> latent_z(const EvidenceSet& ev, Rng* rng) const {
    if (!m_.uses_latent()) return {};
    const auto& enc = static_cast<const LatentModel&>(m_).encoder();
    auto post = posterior(encode_evidence(ev, enc), enc);
    if (rng) return sample_z(post, *rng);
    return post.mean;
  }

  const std::string& key(const Derivation& d, int a) const {
    return m_.alternatives().keys(d.pending().symbol)[a];
  }

 private:
  [[noreturn]] void abort(const Derivation& d, const std::string& why) const {
    throw GenerationAborted("generation aborted: " + why, d.choices());
  }

  const GrammarSpec& g_;
  const ConditionalModel& m_;
  const GenConfig& cfg_;
  Vocabulary vocab_;
};

GenResult finish(const Derivation& d, double logp, std::vector<MaskFallback> fb) {
  GenResult r;
  r.tree = d.result();
  r.log_prob = logp;
  r.choices = d.choices();
  r.fallbacks = std::move(fb);
  return r;
}

}  // namespace

void GenConfig::validate() const {
  if (beam_width < 1) throw DataError("beamWidth must be >= 1");
  if (max_depth < 3) throw DataError("maxDepth must be >= 3");
  if (max_seq_stmts < 0) throw DataError("maxSeqStmts must be >= 0");
  if (!(temperature > 0) || !std::isfinite(temperature)) throw DataError("temperature must be positive");
}

std::vector<double> apply_mask(const GrammarSpec& g, const std::vector<double>& dist, const PendingSite& ps,
                               bool* fell_back) {
  if (fell_back) *fell_back = false;
  static const SymTab kEmptySt;
  static const Flags kEmptyFl;
  Site s;
  s.st = ps.inh.has(Attr::kSymTab) ? &ps.inh.symtab(Attr::kSymTab) : &kEmptySt;
  s.fl = ps.inh.has(Attr::kAttrIn) ? &ps.inh.flags(Attr::kAttrIn) : &kEmptyFl;
  if (ps.inh.has(Attr::kExpType)) s.exp = ps.inh.type(Attr::kExpType);
  if (ps.inh.has(Attr::kExprType)) s.exp = ps.inh.type(Attr::kExprType);
  if (ps.inh.has(Attr::kMethodRetType)) s.mrt = ps.inh.type(Attr::kMethodRetType);

  std::vector<bool> ok;
  switch (g.symbol(ps.symbol).leaf) {
    case LeafKind::kVar: ok = var_mask(g, ps, s); break;
    case LeafKind::kType: ok = type_mask(g, ps, s); break;
    case LeafKind::kApi: ok = api_mask(g, ps, s); break;
    case LeafKind::kNone: ok = rule_mask(g, ps, s); break;
  }
  if (ok.size() != dist.size()) throw GrammarError("apply_mask: distribution size mismatch");
  std::vector<double> out(dist.size());
  double mass = 0;
  for (size_t i = 0; i < dist.size(); ++i) {
    out[i] = ok[i] ? dist[i] : 0.0;
    mass += out[i];
  }
  if (!(mass > 0)) {
    if (fell_back) *fell_back = true;
    return dist;
  }
  for (double& x : out) x /= mass;
  return out;
}

GenResult generate(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                   const EvidenceSet& evidence, const GenConfig& cfg) {
  cfg.validate();
  Stepper st(g, m, cfg);
  Rng rng(cfg.seed);
  const auto z = st.latent_z(evidence, cfg.z_mode == ZMode::kSampled ? &rng : nullptr);
  Derivation d(g, initial_attributes(ctx));
  std::vector<MaskFallback> fb;
  double logp = 0;
  for (size_t step = 0; !d.done(); ++step) {
    const auto p = st.dist(d, m.uses_latent() ? &z : nullptr, fb, step);
    std::vector<double> q = p;
    if (cfg.temperature != 1.0) {
      double sum = 0;
      for (double& x : q) {
        x = x > 0 ? std::pow(x, 1.0 / cfg.temperature) : 0.0;
        sum += x;
      }
      for (double& x : q) x /= sum;
    }
    double u = rng.uniform();
    int pick = -1;
    for (size_t i = 0; i < q.size(); ++i) {
      if (q[i] <= 0) continue;
      pick = static_cast<int>(i);
      if (u < q[i]) break;
      u -= q[i];
    }
    if (pick < 0) throw GenerationAborted("generation aborted: empty distribution", d.choices());
    logp += std::log(p[pick]);
    d.apply(pick);
  }
  return finish(d, logp, std::move(fb));
}

GenResult greedy(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                 const EvidenceSet& evidence, const GenConfig& cfg) {
  cfg.validate();
  Stepper st(g, m, cfg);
  const auto z = st.latent_z(evidence, nullptr);
  Derivation d(g, initial_attributes(ctx));
  std::vector<MaskFallback> fb;
  double logp = 0;
  for (size_t step = 0; !d.done(); ++step) {
    const auto p = st.dist(d, m.uses_latent() ? &z : nullptr, fb, step);
    int best = -1;
    double best_score = -INFINITY;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0) continue;
      const double score = logp + std::log(p[i]);
      if (best < 0 || score > best_score ||
          (score == best_score && st.key(d, static_cast<int>(i)) < st.key(d, best))) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    if (best < 0) throw GenerationAborted("generation aborted: empty distribution", d.choices());
    logp = best_score;
    d.apply(best);
  }
  return finish(d, logp, std::move(fb));
}

std::vector<GenResult> beam_search(const GrammarSpec& g, const ConditionalModel& m, const MethodContext& ctx,
                                   const EvidenceSet& evidence, const GenConfig& cfg) {
  cfg.validate();
  Stepper st(g, m, cfg);
  const auto z = st.latent_z(evidence, nullptr);
  const std::vector<double>* zp = m.uses_latent() ? &z : nullptr;

  struct Cand {
    std::shared_ptr<const Derivation> d;
    double logp = 0;
    std::string last_key;
    uint64_t id = 0;
    std::vector<MaskFallback> fb;
    size_t steps = 0;
  };
  struct Proposal {
    double score;
    std::string key;
    uint64_t id;
    int from;  // index in live, -1 for a finished candidate
    int alt;
    int finished;  // index in finished, or -1
  };
  uint64_t next_id = 0;
  std::vector<Cand> live;
  live.push_back({std::make_shared<Derivation>(g, initial_attributes(ctx)), 0.0, "", next_id++, {}, 0});
  std::vector<Cand> finished;
  std::string last_abort;
  std::vector<std::string> last_partial;

  auto better = [](const Proposal& a, const Proposal& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.key != b.key) return a.key < b.key;
    return a.id < b.id;
  };

  while (!live.empty()) {
    std::vector<Proposal> pool;
    for (size_t f = 0; f < finished.size(); ++f) {
      pool.push_back({finished[f].logp, finished[f].last_key, finished[f].id, -1, -1, static_cast<int>(f)});
    }
    std::vector<std::vector<MaskFallback>> live_fb(live.size());
    for (size_t c = 0; c < live.size(); ++c) {
      std::vector<double> p;
      live_fb[c] = live[c].fb;
      try {
        p = st.dist(*live[c].d, zp, live_fb[c], live[c].steps);
      } catch (const GenerationAborted& e) {
        last_abort = e.what();
        last_partial = e.partial();
        continue;
      }
      for (size_t a = 0; a < p.size(); ++a) {
        if (p[a] <= 0) continue;
        pool.push_back({live[c].logp + std::log(p[a]), st.key(*live[c].d, static_cast<int>(a)), next_id++,
                        static_cast<int>(c), static_cast<int>(a), -1});
      }
    }
    if (pool.empty()) break;
    const size_t k = std::min(pool.size(), static_cast<size_t>(cfg.beam_width));
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), better);
    std::vector<Cand> next_live, next_finished;
    for (size_t i = 0; i < k; ++i) {
      const Proposal& pr = pool[i];
      if (pr.finished >= 0) {
        next_finished.push_back(std::move(finished[pr.finished]));
        continue;
      }
      auto d = std::make_shared<Derivation>(*live[pr.from].d);
      d->apply(pr.alt);
      Cand c{d, pr.score, pr.key, pr.id, live_fb[pr.from], live[pr.from].steps + 1};
      (d->done() ? next_finished : next_live).push_back(std::move(c));
    }
    live = std::move(next_live);
    finished = std::move(next_finished);
  }
  if (finished.empty()) {
    throw GenerationAborted(last_abort.empty() ? "generation aborted: beam emptied" : last_abort, last_partial);
  }
  std::sort(finished.begin(), finished.end(), [](const Cand& a, const Cand& b) {
    if (a.logp != b.logp) return a.logp > b.logp;
    if (a.last_key != b.last_key) return a.last_key < b.last_key;
    return a.id < b.id;
  });
  std::vector<GenResult> out;
  for (auto& c : finished) out.push_back(finish(*c.d, c.logp, std::move(c.fb)));
  return out;
}

std::vector<double> ForcedChoiceModel::predict(const ContextFeatures& f, const std::vector<double>*) const {
  if (next_ >= choices_.size()) throw DataError("forced replay: choice sequence exhausted");
  const std::string& want = choices_[next_++];
  int idx = alts_.index_of(f.symbol, want);
  if (idx < 0) throw DataError("forced replay: '" + want + "' is not an alternative of " + alts_.symbol_name(f.symbol));
  std::vector<double> p(alts_.keys(f.symbol).size(), 0.0);
  p[idx] = 1.0;
  return p;
}

void ForcedChoiceModel::save(const std::string&) const { throw NagError("a forced-choice model is not saved"); }

AnnotatedAst replay(const GrammarSpec& g, const SemState& root_inh, const std::vector<std::string>& choices) {
  Derivation d(g, root_inh);
  for (const auto& key : choices) {
    if (d.done()) throw DataError("replay: choices left over after the derivation completed");
    d.apply_key(key);
  }
  if (!d.done()) throw DataError("replay: choice sequence ends before the derivation completes");
  return d.result();
}

}  // namespace nag
