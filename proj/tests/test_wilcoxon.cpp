#include <gtest/gtest.h>

#include "opf/bench.hpp"
#include "opf/errors.hpp"
#include "oracles.hpp"

using opf::bench::wilcoxon_signed_rank;

TEST(Wilcoxon, WorkedExample) {
  const std::vector<double> a{1, -2, 3, 4, 5, 0};
  const std::vector<double> b(6, 0.0);
  const auto r = wilcoxon_signed_rank(a, b);
  EXPECT_EQ(r.n, 5u);
  EXPECT_EQ(r.w_plus, 13.0);
  EXPECT_EQ(r.w_minus, 2.0);
  EXPECT_EQ(r.w, 2.0);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, 0.1875, 1e-15);
}

TEST(Wilcoxon, MatchesSignEnumeration) {
  opf::SplitMix64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(8);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse values produce ties and zero differences
      a[i] = static_cast<double>(rng.below(6));
      b[i] = static_cast<double>(rng.below(6));
    }
    try {
      const auto r = wilcoxon_signed_rank(a, b);
      EXPECT_NEAR(r.p_value, oracle::enumerated_wilcoxon_p(a, b), 1e-12);
    } catch (const opf::DegenerateTestError&) {
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < n; ++i) nonzero += a[i] != b[i];
      EXPECT_LT(nonzero, opf::bench::kMinWilcoxonPairs);
    }
  }
}

TEST(Wilcoxon, SymmetricInArguments) {
  const std::vector<double> a{1.5, 2.0, 0.3, 4.1, 2.2, 7.0, 1.1};
  const std::vector<double> b{1.0, 2.4, 0.1, 3.0, 2.0, 1.0, 1.0};
  EXPECT_EQ(wilcoxon_signed_rank(a, b).p_value, wilcoxon_signed_rank(b, a).p_value);
}

TEST(Wilcoxon, LargeSampleUsesNormalApproximation) {
  std::vector<double> a(40), b(40, 0.0);
  for (int i = 0; i < 40; ++i) a[static_cast<std::size_t>(i)] = (i % 2 ? 1.0 : -1.0) * (i + 1);
  const auto r = wilcoxon_signed_rank(a, b);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p_value, 0.5);
  EXPECT_LE(r.p_value, 1.0);
  for (auto& v : a) v = std::abs(v);
  EXPECT_LT(wilcoxon_signed_rank(a, b).p_value, 1e-6);
}

TEST(Wilcoxon, Degenerate) {
  const std::vector<double> same{1, 2, 3, 4, 5};
  EXPECT_THROW(wilcoxon_signed_rank(same, same), opf::DegenerateTestError);
  EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{1, 2}, std::vector<double>{1}), opf::ShapeError);
}
