#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "opf/types.hpp"

namespace opf {

// Per-sample bookkeeping. The feature vector itself is row `id` of the
// owning Subgraph's feature matrix.
struct Node {
  NodeId id = 0;
  int sample_id = 0;  // id carried by the source dataset
  int true_label = 1;
  double cost = std::numeric_limits<double>::infinity();
  std::optional<NodeId> predecessor;
  int conquered_label = 1;
  bool is_prototype = false;

  friend bool operator==(const Node&, const Node&) = default;
};

// Node collection plus the cost-ordered index produced by training.
// Labels are 1-based; every class in [1, n_classes] must occur.
class Subgraph {
 public:
  Subgraph() = default;

  // Throws ShapeError on size mismatch and MissingClassError when a class in
  // [1, n_classes] has no sample. n_classes <= 0 means "max label".
  Subgraph(FeatureMatrix features, std::span<const int> labels, std::span<const int> sample_ids = {},
           int n_classes = 0);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  Eigen::Index n_features() const noexcept { return features_.cols(); }
  int n_classes() const noexcept { return n_classes_; }

  const FeatureMatrix& features() const noexcept { return features_; }
  auto sample(NodeId id) const { return features_.row(id); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::vector<Node>& nodes() noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  Node& node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }

  // Node ids in non-decreasing trained cost; empty before training.
  const std::vector<NodeId>& ordered_ids() const noexcept { return ordered_ids_; }
  void set_ordered_ids(std::vector<NodeId> ids) { ordered_ids_ = std::move(ids); }

  // Number of distinct true labels actually present.
  int distinct_labels() const;

 private:
  FeatureMatrix features_;
  std::vector<Node> nodes_;
  std::vector<NodeId> ordered_ids_;
  int n_classes_ = 0;
};

}  // namespace opf
