#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "opf/errors.hpp"
#include "opf/random.hpp"
#include "opf/stream.hpp"

namespace opf::stream {
namespace {

void shuffle(std::vector<std::size_t>& items, SplitMix64& rng) {
  // Fisher-Yates, walking down from the last slot.
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::size_t first_side_size(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

}  // namespace

Dataset subset(const Dataset& dataset, std::span<const std::size_t> rows) {
  Dataset out;
  out.source_format = dataset.source_format;
  out.ids.reserve(rows.size());
  out.labels.reserve(rows.size());
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dataset.n_features());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    if (r >= dataset.size()) throw ShapeError("subset: row " + std::to_string(r) + " out of range");
    out.ids.push_back(dataset.ids[r]);
    out.labels.push_back(dataset.labels[r]);
    out.features.row(static_cast<Eigen::Index>(k)) = dataset.features.row(static_cast<Eigen::Index>(r));
  }
  return out;
}

Dataset concat(std::span<const Dataset> parts) {
  Dataset out;
  if (parts.empty()) return out;
  out.source_format = parts.front().source_format;
  Eigen::Index rows = 0;
  for (const Dataset& p : parts) {
    if (p.n_features() != parts.front().n_features()) throw ShapeError("concat: feature counts differ");
    rows += static_cast<Eigen::Index>(p.size());
  }
  out.features.resize(rows, parts.front().n_features());
  Eigen::Index at = 0;
  for (const Dataset& p : parts) {
    out.ids.insert(out.ids.end(), p.ids.begin(), p.ids.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.features.middleRows(at, static_cast<Eigen::Index>(p.size())) = p.features;
    at += static_cast<Eigen::Index>(p.size());
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec) {
  const std::size_t n = dataset.size();
  if (n < 2) throw SplitError("split: need at least two samples");
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
    throw SplitError("split: fraction " + std::to_string(spec.fraction) + " outside (0, 1)");
  }
  const std::size_t first = first_side_size(spec.fraction, n);
  if (first == 0 || first >= n) {
    throw SplitError("split: fraction " + std::to_string(spec.fraction) + " leaves one side empty for n = " +
                     std::to_string(n));
  }

  SplitMix64 rng(spec.seed);
  std::vector<char> in_first(n, 0);
  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::size_t k = 0; k < first; ++k) in_first[order[k]] = 1;
  } else {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < n; ++r) by_class[dataset.labels[r]].push_back(r);
    for (const auto& [label, members] : by_class) {
      if (members.size() < 2) {
        throw SplitError("split: stratified split needs >= 2 samples of class " + std::to_string(label));
      }
    }
    // Largest-remainder apportionment of `first` across classes.
    struct Share {
      int label;
      std::size_t take;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, members] : by_class) {
      const double ideal = spec.fraction * static_cast<double>(members.size());
      const auto base = static_cast<std::size_t>(std::floor(ideal));
      shares.push_back({label, base, ideal - static_cast<double>(base)});
      assigned += base;
    }
    std::vector<std::size_t> rank(shares.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t k = 0; assigned < first && k < rank.size(); ++k, ++assigned) ++shares[rank[k]].take;

    for (const Share& share : shares) {
      std::vector<std::size_t> members = by_class[share.label];
      shuffle(members, rng);
      for (std::size_t k = 0; k < share.take; ++k) in_first[members[k]] = 1;
    }
  }

  std::vector<std::size_t> a, b;
  for (std::size_t r = 0; r < n; ++r) (in_first[r] ? a : b).push_back(r);
  return {subset(dataset, a), subset(dataset, b)};
}

std::vector<Dataset> kfold(const Dataset& dataset, int folds, std::uint64_t seed, bool stratified) {
  if (folds < 2) throw SplitError("kfold: need at least two folds");
  std::vector<Dataset> parts;
  Dataset rest = dataset;
  SplitMix64 seeds(seed);
  for (int k = 0; k + 1 < folds; ++k) {
    const std::uint64_t part_seed = k == 0 ? seed : seeds();
    auto [head, tail] = split(rest, {1.0 / static_cast<double>(folds - k), part_seed, stratified});
    parts.push_back(std::move(head));
    rest = std::move(tail);
  }
  parts.push_back(std::move(rest));
  return parts;
}

}  // namespace opf::stream
