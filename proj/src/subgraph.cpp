#include "opf/subgraph.hpp"

#include <algorithm>
#include <string>

#include "opf/errors.hpp"

namespace opf {

Subgraph::Subgraph(FeatureMatrix features, std::span<const int> labels, std::span<const int> sample_ids,
                   int n_classes)
    : features_(std::move(features)) {
  const auto n = static_cast<std::size_t>(features_.rows());
  if (labels.size() != n) {
    throw ShapeError("subgraph: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows");
  }
  if (!sample_ids.empty() && sample_ids.size() != n) {
    throw ShapeError("subgraph: " + std::to_string(sample_ids.size()) + " ids for " + std::to_string(n) + " rows");
  }
  if (n > 0 && features_.cols() == 0) throw ShapeError("subgraph: samples have no features");

  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 1) {
      throw ShapeError("subgraph: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) + " is < 1");
    }
    max_label = std::max(max_label, labels[i]);
  }
  n_classes_ = n_classes > 0 ? n_classes : max_label;
  if (max_label > n_classes_) {
    throw ShapeError("subgraph: label " + std::to_string(max_label) + " exceeds n_classes " +
                     std::to_string(n_classes_));
  }
  std::vector<bool> seen(static_cast<std::size_t>(n_classes_) + 1, false);
  for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
  for (int c = 1; c <= n_classes_; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw MissingClassError("subgraph: class " + std::to_string(c) + " has no samples", c);
    }
  }

  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Node& node = nodes_[i];
    node.id = static_cast<NodeId>(i);
    node.sample_id = sample_ids.empty() ? static_cast<int>(i) : sample_ids[i];
    node.true_label = labels[i];
    node.conquered_label = labels[i];
  }
}

int Subgraph::distinct_labels() const {
  std::vector<bool> seen(static_cast<std::size_t>(n_classes_) + 1, false);
  int count = 0;
  for (const Node& node : nodes_) {
    if (!seen[static_cast<std::size_t>(node.true_label)]) {
      seen[static_cast<std::size_t>(node.true_label)] = true;
      ++count;
    }
  }
  return count;
}

}  // namespace opf
