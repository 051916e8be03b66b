#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nag/evidence.h"

namespace nag {
namespace {

EncodedItem unit_item(int kind, int dim, int axis) {
  EncodedItem e;
  e.kind = kind;
  e.vec.assign(dim, 0.0);
  e.vec[axis] = 1.0;
  e.bag = e.vec;
  return e;
}

TEST(SplitIdentifier, CamelCaseDigitsDelimiters) {
  EXPECT_EQ(split_identifier("writeToFile"), (std::vector<std::string>{"write", "to", "file"}));
  EXPECT_EQ(split_identifier("HTTPServer_v2"), (std::vector<std::string>{"http", "server", "v", "2"}));
  EXPECT_TRUE(split_identifier("").empty());
}

TEST(Encode, EmptyEvidenceGivesNothing) {
  EXPECT_TRUE(encode_evidence({}, EncoderParams{}).empty());
}

TEST(Encode, MultisetAndOrderFree) {
  EvidenceSet x;
  x.items.push_back({EvidenceKind::kClassName, {"file", "writer"}});
  x.items.push_back({EvidenceKind::kClassName, {"file", "writer"}});
  x.items.push_back({EvidenceKind::kClassName, {"writer", "file"}});
  const auto enc = encode_evidence(x, EncoderParams{});
  ASSERT_EQ(enc.size(), 3u);
  EXPECT_EQ(enc[0].vec, enc[1].vec);
  EXPECT_EQ(enc[0].vec, enc[2].vec);
}

TEST(Posterior, PriorWithoutEvidence) {
  EncoderParams p;
  p.dim = 4;
  const LatentPosterior post = posterior({}, p);
  EXPECT_EQ(post.mean, std::vector<double>(4, 0.0));
  EXPECT_DOUBLE_EQ(post.variance, 1.0);
}

TEST(Posterior, HandExamples) {
  EncoderParams p;
  p.dim = 3;
  const auto one = posterior({unit_item(0, 3, 0)}, p);
  EXPECT_DOUBLE_EQ(one.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(one.variance, 0.5);
  const auto two = posterior({unit_item(0, 3, 0), unit_item(0, 3, 0)}, p);
  EXPECT_NEAR(two.mean[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(two.variance, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(two.mean[1], 0.0);
}

TEST(Posterior, MatchesClosedFormOnRandomConfigurations) {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    EncoderParams p;
    p.dim = 1 + static_cast<int>(rng.below(8));
    for (auto& s : p.sigma2) s = 0.1 + 3.0 * rng.uniform();
    std::vector<EncodedItem> items(rng.below(12));
    for (auto& e : items) {
      e.kind = static_cast<int>(rng.below(kNumEvidenceKinds));
      e.vec.resize(p.dim);
      for (auto& v : e.vec) v = rng.normal();
    }
    long double denom = 1.0L;
    std::vector<long double> num(p.dim, 0.0L);
    for (const auto& e : items) {
      const long double w = 1.0L / p.sigma2[e.kind];
      denom += w;
      for (int d = 0; d < p.dim; ++d) num[d] += w * e.vec[d];
    }
    const LatentPosterior post = posterior(items, p);
    ASSERT_NEAR(post.variance, static_cast<double>(1.0L / denom), 1e-9);
    for (int d = 0; d < p.dim; ++d) ASSERT_NEAR(post.mean[d], static_cast<double>(num[d] / denom), 1e-9);
  }
}

TEST(Posterior, VarianceStrictlyDecreasesWithItems) {
  EncoderParams p;
  p.dim = 2;
  p.sigma2[3] = 50.0;
  std::vector<EncodedItem> items;
  double prev = posterior(items, p).variance;
  for (int i = 0; i < 20; ++i) {
    items.push_back(unit_item(i % kNumEvidenceKinds, 2, i % 2));
    const double v = posterior(items, p).variance;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Posterior, RejectsNonPositiveVariance) {
  EncoderParams p;
  p.dim = 2;
  p.sigma2[0] = 0.0;
  EXPECT_THROW(posterior({unit_item(0, 2, 0)}, p), std::exception);
}

TEST(SampleZ, MomentsFollowPosterior) {
  LatentPosterior post{{1.0, -2.0}, 0.25};
  Rng rng(3);
  double s0 = 0, sq0 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto z = sample_z(post, rng);
    s0 += z[0];
    sq0 += (z[0] - 1.0) * (z[0] - 1.0);
  }
  EXPECT_NEAR(s0 / n, 1.0, 0.02);
  EXPECT_NEAR(sq0 / n, 0.25, 0.02);
}

TEST(EvidenceFile, RoundTrip) {
  EvidenceSet a, b;
  a.items.push_back({EvidenceKind::kMethodName, {"write"}});
  a.items.push_back({EvidenceKind::kFormalType, {"File", "String"}});
  std::stringstream ss;
  ss << "method\t0\n";
  write_evidence(ss, a);
  ss << "method\t1\n";
  write_evidence(ss, b);
  const auto back = read_evidence_records(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
}

}  // namespace
}  // namespace nag
