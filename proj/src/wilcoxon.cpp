#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "opf/bench.hpp"
#include "opf/errors.hpp"

namespace opf::bench {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("wilcoxon: samples differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw DegenerateTestError("wilcoxon: all differences are zero");
  if (diffs.size() < kMinWilcoxonPairs) {
    throw DegenerateTestError("wilcoxon: only " + std::to_string(diffs.size()) +
                              " non-zero differences, need at least " + std::to_string(kMinWilcoxonPairs));
  }
  const std::size_t n = diffs.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(diffs[i]) < std::abs(diffs[j]); });

  // Ranks are kept doubled so average ranks of ties stay integral.
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = i + j + 2;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  std::uint64_t plus2 = 0, minus2 = 0;
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0.0 ? plus2 : minus2) += rank2[i];

  WilcoxonResult result;
  result.n = n;
  result.w_plus = static_cast<double>(plus2) / 2.0;
  result.w_minus = static_cast<double>(minus2) / 2.0;
  result.w = std::min(result.w_plus, result.w_minus);

  const auto nd = static_cast<double>(n);
  if (n <= kExactWilcoxonLimit) {
    // counts[s] = number of sign assignments whose doubled W+ equals s.
    const std::uint64_t total2 = plus2 + minus2;
    std::vector<std::uint64_t> counts(total2 + 1, 0);
    counts[0] = 1;
    std::uint64_t reach = 0;
    for (std::uint64_t r : rank2) {
      for (std::uint64_t s = reach + 1; s-- > 0;) {
        if (counts[s]) counts[s + r] += counts[s];
      }
      reach += r;
    }
    const std::uint64_t w2 = std::min(plus2, minus2);
    std::uint64_t tail = 0;
    for (std::uint64_t s = 0; s <= w2; ++s) tail += counts[s];
    result.p_value = std::min(1.0, 2.0 * static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n)));
    result.exact = true;
  } else {
    const double mean = nd * (nd + 1.0) / 4.0;
    const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (!(variance > 0.0)) throw DegenerateTestError("wilcoxon: zero variance");
    const double z = std::min(0.0, (result.w - mean + 0.5) / std::sqrt(variance));
    result.p_value = std::clamp(std::erfc(-z / std::sqrt(2.0)), 0.0, 1.0);
    result.exact = false;
  }
  return result;
}

}  // namespace opf::bench
