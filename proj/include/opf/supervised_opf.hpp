#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opf/distance.hpp"
#include "opf/subgraph.hpp"

namespace opf {

inline constexpr int kModelFormatVersion = 1;

// Precomputing the n x n arc weights is only allowed below this size
// (11,055^2 doubles would already be ~1 GB).
inline constexpr std::size_t kMaxPrecomputedNodes = 5000;

// How fit obtains arc weights. Automatic precomputes a tiled matrix for the
// optimized backend up to kMaxPrecomputedNodes and evaluates on demand
// otherwise. The trained model is identical either way.
enum class ArcEvaluation { Automatic, OnDemand, Precomputed };

struct FitOptions {
  DomainPolicy policy = DomainPolicy::Lenient;
  ArcEvaluation arcs = ArcEvaluation::Automatic;
};

struct TrainedModel {
  Subgraph subgraph;
  DistanceId distance = DistanceId::Euclidean;
  KernelBackend backend = KernelBackend::Optimized;
  DomainPolicy policy = DomainPolicy::Lenient;
  int format_version = kModelFormatVersion;
  double train_seconds = 0.0;  // not serialised
};

struct Prediction {
  int label = 0;
  double cost = 0.0;
  NodeId conqueror_id = -1;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct BatchPrediction {
  std::vector<Prediction> predictions;
  double seconds = 0.0;
};

struct MstEdge {
  NodeId parent;
  NodeId child;
  double weight;
};

// Prim's algorithm on the complete graph, started at node 0. Returns the
// n - 1 edges in the order their child joined the tree. Ties go to the
// smaller node id.
std::vector<MstEdge> minimum_spanning_tree(const Subgraph& graph, DistanceId distance, KernelBackend backend,
                                           DomainPolicy policy = DomainPolicy::Lenient);
std::vector<MstEdge> minimum_spanning_tree(const DistanceMatrix& weights);

// Both endpoints of every MST edge joining different true labels, sorted.
std::vector<NodeId> find_prototypes(const Subgraph& graph, DistanceId distance, KernelBackend backend,
                                    DomainPolicy policy = DomainPolicy::Lenient);

TrainedModel fit(Subgraph train, DistanceId distance, KernelBackend backend, const FitOptions& options = {});

// argmin over training nodes k of max(cost(k), d(k, sample)), scanning in
// cost order and stopping once no later node can win. Ties keep the first
// node reached.
Prediction predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& sample);

// Row-wise predict. threads > 1 splits the rows into bands; output is
// identical for any thread count.
BatchPrediction predict_batch(const TrainedModel& model, const FeatureMatrix& samples, unsigned threads = 1);

void save_model(const TrainedModel& model, std::ostream& sink);
TrainedModel load_model(std::istream& source);
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);

}  // namespace opf
