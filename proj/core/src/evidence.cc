#include "nag/evidence.h"

#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "nag/types.h"

namespace nag {

namespace {

constexpr std::array<const char*, kNumEvidenceKinds> kKindNames = {
    "class_name", "field_type", "method_header", "method_name",
    "formal_type", "return_type", "javadoc",
};

uint64_t fnv1a(const std::string& s, uint64_t seed) {
  uint64_t h = 1469598103934665603ULL ^ (seed * 0x100000001B3ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Final avalanche so low bits are usable as a bucket index.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

const char* evidence_kind_name(EvidenceKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EvidenceKind> parse_evidence_kind(const std::string& s) {
  for (int i = 0; i < kNumEvidenceKinds; ++i) {
    if (s == kKindNames[i]) return static_cast<EvidenceKind>(i);
  }
  return std::nullopt;
}

size_t EvidenceSet::count(EvidenceKind k) const {
  size_t n = 0;
  for (const auto& it : items) n += it.kind == k ? 1 : 0;
  return n;
}

std::vector<std::string> split_identifier(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      unsigned char prev = static_cast<unsigned char>(s[i - 1]);
      bool lower_to_upper = std::isupper(c) && (std::islower(prev) || std::isdigit(prev));
      // "HTMLParser" splits before the last capital of an acronym.
      bool acronym_end = std::isupper(c) && std::isupper(prev) && i + 1 < s.size() &&
                         std::islower(static_cast<unsigned char>(s[i + 1]));
      bool digit_edge = std::isdigit(c) != std::isdigit(prev);
      if (lower_to_upper || acronym_end || digit_edge) flush();
    }
    cur.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  return out;
}

std::vector<double> hashed_bag(const std::vector<std::string>& tokens, int dim, uint64_t seed) {
  std::vector<double> v(static_cast<size_t>(dim), 0.0);
  for (const auto& t : tokens) {
    uint64_t h = fnv1a(t, seed);
    size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim));
    v[bucket] += (h >> 63) ? -1.0 : 1.0;
  }
  return v;
}

std::vector<EncodedItem> encode_evidence(const EvidenceSet& x, const EncoderParams& p) {
  std::vector<EncodedItem> out;
  out.reserve(x.items.size());
  const size_t d = static_cast<size_t>(p.dim);
  for (const auto& item : x.items) {
    EncodedItem e;
    e.kind = static_cast<int>(item.kind);
    e.bag = hashed_bag(item.tokens, p.dim, p.hash_seed);
    const auto& m = p.maps[e.kind];
    if (m.empty()) {
      e.vec = e.bag;
    } else {
      e.vec.assign(d, 0.0);
      for (size_t r = 0; r < d; ++r) {
        double s = 0;
        for (size_t c = 0; c < d; ++c) s += m[r * d + c] * e.bag[c];
        e.vec[r] = s;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

LatentPosterior posterior(const std::vector<EncodedItem>& encoded, const EncoderParams& p) {
  for (double s2 : p.sigma2) {
    if (!(s2 > 0.0)) throw DataError("posterior: sigma^2 must be positive");
  }
  LatentPosterior post;
  post.mean.assign(static_cast<size_t>(p.dim), 0.0);
  double denom = 1.0;
  for (const auto& e : encoded) {
    const double prec = 1.0 / p.sigma2[e.kind];
    denom += prec;
    for (size_t i = 0; i < post.mean.size(); ++i) post.mean[i] += prec * e.vec[i];
  }
  for (double& m : post.mean) m /= denom;
  post.variance = 1.0 / denom;
  return post;
}

std::vector<double> sample_z(const LatentPosterior& post, Rng& rng) {
  std::vector<double> z(post.mean.size());
  const double sd = std::sqrt(post.variance);
  for (size_t i = 0; i < z.size(); ++i) z[i] = post.mean[i] + sd * rng.normal();
  return z;
}

void write_evidence(std::ostream& out, const EvidenceSet& x) {
  for (const auto& item : x.items) {
    out << evidence_kind_name(item.kind) << '\t';
    for (size_t i = 0; i < item.tokens.size(); ++i) out << (i ? " " : "") << item.tokens[i];
    out << '\n';
  }
}

std::vector<EvidenceSet> read_evidence_records(std::istream& in) {
  std::vector<EvidenceSet> out;
  EvidenceSet cur;
  bool open = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (open) out.push_back(std::move(cur));
      cur = {};
      open = false;
      continue;
    }
    auto tab = line.find('\t');
    std::string kind = line.substr(0, tab);
    // A "method" header opens a record, which may then stay empty.
    if (kind == "method") {
      if (open) out.push_back(std::move(cur));
      cur = {};
      open = true;
      continue;
    }
    auto k = parse_evidence_kind(kind);
    if (!k) throw DataError("evidence line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    EvidenceItem item{*k, {}};
    if (tab != std::string::npos) {
      std::istringstream ts(line.substr(tab + 1));
      std::string tok;
      while (ts >> tok) item.tokens.push_back(tok);
    }
    cur.items.push_back(std::move(item));
    open = true;
  }
  if (open) out.push_back(std::move(cur));
  return out;
}

}  // namespace nag
