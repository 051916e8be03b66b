#ifndef NAG_EVIDENCE_H_
#define NAG_EVIDENCE_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nag/rng.h"

namespace nag {

enum class EvidenceKind : uint8_t {
  kClassName = 0,
  kFieldType,
  kMethodHeader,
  kMethodName,
  kFormalType,
  kReturnType,
  kJavadoc,
};
inline constexpr int kNumEvidenceKinds = 7;

const char* evidence_kind_name(EvidenceKind k);
std::optional<EvidenceKind> parse_evidence_kind(const std::string& s);

struct EvidenceItem {
  EvidenceKind kind;
  std::vector<std::string> tokens;
  friend bool operator==(const EvidenceItem&, const EvidenceItem&) = default;
};

// A multiset of items over the seven kinds.
struct EvidenceSet {
  std::vector<EvidenceItem> items;

  size_t count(EvidenceKind k) const;
  bool empty() const { return items.empty(); }
  friend bool operator==(const EvidenceSet&, const EvidenceSet&) = default;
};

// Splits on camel case, digits and delimiters; lower-cases the pieces.
std::vector<std::string> split_identifier(const std::string& s);

inline constexpr uint64_t kHashSeed = 0x5EED;

struct EncoderParams {
  int dim = 32;
  uint64_t hash_seed = kHashSeed;
  // Optional per-kind linear map (dim x dim, row-major); empty = identity.
  std::array<std::vector<double>, kNumEvidenceKinds> maps;
  std::array<double, kNumEvidenceKinds> sigma2;

  EncoderParams() { sigma2.fill(1.0); }
};

// Signed feature hashing of a token bag into `dim` buckets.
std::vector<double> hashed_bag(const std::vector<std::string>& tokens, int dim, uint64_t seed);

struct EncodedItem {
  int kind = 0;
  std::vector<double> bag;  // hashed bag before the linear map
  std::vector<double> vec;  // f_j(item)
};

std::vector<EncodedItem> encode_evidence(const EvidenceSet& x, const EncoderParams& p);

struct LatentPosterior {
  std::vector<double> mean;
  double variance = 1.0;
};

// mean = sum_jk sigma_j^-2 f_j(X_jk) / (1 + sum_j |X_j| sigma_j^-2),
// variance = 1 / (1 + sum_j |X_j| sigma_j^-2).
LatentPosterior posterior(const std::vector<EncodedItem>& encoded, const EncoderParams& p);

std::vector<double> sample_z(const LatentPosterior& post, Rng& rng);

// Record format: "kind<TAB>token token ..." lines. Records are separated by
// blank lines or opened by a "method" line, so a record may be empty.
void write_evidence(std::ostream& out, const EvidenceSet& x);
std::vector<EvidenceSet> read_evidence_records(std::istream& in);

}  // namespace nag

#endif  // NAG_EVIDENCE_H_
