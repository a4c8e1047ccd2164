#include "opf/supervised_opf.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "opf/errors.hpp"
#include "opf/heap.hpp"

namespace opf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Prim over a dense complete graph; weight(u, v) is the arc from the tree
// node u to the candidate v. Relaxation and the search for the next node
// share one pass over the nodes still outside the tree, kept in id order so
// ties go to the smaller id.
template <typename Weight>
std::vector<MstEdge> prim(std::size_t n, Weight&& weight) {
  std::vector<MstEdge> edges;
  if (n == 0) return edges;
  edges.reserve(n - 1);
  std::vector<double> key(n, kInf);
  std::vector<NodeId> parent(n, -1);
  std::vector<NodeId> outside(n - 1);
  for (std::size_t v = 1; v < n; ++v) outside[v - 1] = static_cast<NodeId>(v);

  NodeId u = 0;
  while (!outside.empty()) {
    std::size_t kept = 0;
    NodeId next = -1;
    for (const NodeId v : outside) {
      if (v == u) continue;
      const double d = weight(u, v);
      if (d < key[static_cast<std::size_t>(v)]) {
        key[static_cast<std::size_t>(v)] = d;
        parent[static_cast<std::size_t>(v)] = u;
      }
      if (next < 0 || key[static_cast<std::size_t>(v)] < key[static_cast<std::size_t>(next)]) next = v;
      outside[kept++] = v;
    }
    outside.resize(kept);
    if (next < 0) break;
    edges.push_back({parent[static_cast<std::size_t>(next)], next, key[static_cast<std::size_t>(next)]});
    u = next;
  }
  return edges;
}

// Arc weights either looked up in a precomputed matrix or evaluated on demand.
// Symmetric measures are always evaluated as (smaller id, larger id), so both
// routes see bit-identical weights.
class ArcWeights {
 public:
  ArcWeights(const Subgraph& graph, DistanceId distance, KernelBackend backend, DomainPolicy policy,
             ArcEvaluation mode)
      : features_(graph.features()),
        fn_(kernel(distance, backend, policy)),
        width_(static_cast<std::size_t>(graph.n_features())),
        symmetric_(registry_lookup(distance).symmetric) {
    const bool fits = graph.size() <= kMaxPrecomputedNodes;
    if (mode == ArcEvaluation::Precomputed && !fits) {
      throw ParameterError("precomputed distances limited to " + std::to_string(kMaxPrecomputedNodes) + " nodes");
    }
    const bool automatic = mode == ArcEvaluation::Automatic && fits && backend == KernelBackend::Optimized;
    if (mode == ArcEvaluation::Precomputed || automatic) {
      matrix_ = arc_matrix(distance, features_, backend, policy);
    }
  }

  double operator()(NodeId s, NodeId t) const {
    if (matrix_.size() != 0) return matrix_(s, t);
    if (symmetric_ && t < s) std::swap(s, t);
    try {
      return fn_(features_.row(s).data(), features_.row(t).data(), width_);
    } catch (const DomainError& e) {
      throw DomainError("arc (" + std::to_string(s) + ", " + std::to_string(t) + "): " + e.what());
    }
  }

 private:
  const FeatureMatrix& features_;
  KernelFn fn_;
  std::size_t width_;
  bool symmetric_;
  ArcMatrix matrix_;
};

void require_trainable(const Subgraph& graph) {
  if (graph.size() < 2) throw DegenerateTrainingError("fit: need at least two samples");
  if (graph.distinct_labels() < 2) throw DegenerateTrainingError("fit: training set holds a single class");
}

std::vector<NodeId> prototypes_from_mst(const Subgraph& graph, const std::vector<MstEdge>& mst) {
  std::vector<char> marked(graph.size(), 0);
  for (const MstEdge& e : mst) {
    if (graph.node(e.parent).true_label != graph.node(e.child).true_label) {
      marked[static_cast<std::size_t>(e.parent)] = 1;
      marked[static_cast<std::size_t>(e.child)] = 1;
    }
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (marked[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

Prediction predict_unchecked(const TrainedModel& model, KernelFn fn, const double* sample) {
  const Subgraph& graph = model.subgraph;
  const auto width = static_cast<std::size_t>(graph.n_features());
  Prediction best{0, kInf, -1};
  for (NodeId id : graph.ordered_ids()) {
    const Node& node = graph.nodes()[static_cast<std::size_t>(id)];
    if (node.cost >= best.cost) break;
    const double candidate = std::max(node.cost, fn(graph.features().row(id).data(), sample, width));
    if (candidate < best.cost) best = {node.conquered_label, candidate, id};
  }
  return best;
}

void require_trained(const TrainedModel& model) {
  if (model.subgraph.empty() || model.subgraph.ordered_ids().size() != model.subgraph.size()) {
    throw ParameterError("predict: model is not trained");
  }
}

}  // namespace

std::vector<MstEdge> minimum_spanning_tree(const Subgraph& graph, DistanceId distance, KernelBackend backend,
                                           DomainPolicy policy) {
  check_domain_rows(distance, graph.features(), policy);
  const ArcWeights weight(graph, distance, backend, policy, ArcEvaluation::OnDemand);
  return prim(graph.size(), weight);
}

std::vector<MstEdge> minimum_spanning_tree(const DistanceMatrix& weights) {
  if (weights.rows() != weights.cols()) throw ShapeError("minimum_spanning_tree: weight matrix must be square");
  return prim(static_cast<std::size_t>(weights.rows()), [&](NodeId u, NodeId v) { return weights(u, v); });
}

std::vector<NodeId> find_prototypes(const Subgraph& graph, DistanceId distance, KernelBackend backend,
                                    DomainPolicy policy) {
  require_trainable(graph);
  return prototypes_from_mst(graph, minimum_spanning_tree(graph, distance, backend, policy));
}

TrainedModel fit(Subgraph train, DistanceId distance, KernelBackend backend, const FitOptions& options) {
  const auto start = Clock::now();
  require_trainable(train);
  check_domain_rows(distance, train.features(), options.policy);

  const std::size_t n = train.size();
  const ArcWeights weight(train, distance, backend, options.policy, options.arcs);
  const std::vector<NodeId> prototypes = prototypes_from_mst(train, prim(n, weight));

  std::vector<Node>& nodes = train.nodes();
  for (Node& node : nodes) {
    node.cost = kInf;
    node.predecessor.reset();
    node.conquered_label = node.true_label;
    node.is_prototype = false;
  }
  for (NodeId p : prototypes) {
    nodes[static_cast<std::size_t>(p)].cost = 0.0;
    nodes[static_cast<std::size_t>(p)].is_prototype = true;
  }

  CostHeap heap(n);
  for (const Node& node : nodes) heap.insert(node.id, node.cost);

  std::vector<NodeId> order;
  order.reserve(n);
  // Queued nodes in id order, compacted as nodes leave the heap.
  std::vector<NodeId> queued(n);
  for (std::size_t i = 0; i < n; ++i) queued[i] = static_cast<NodeId>(i);
  while (!heap.empty()) {
    const NodeId s = heap.pop_min().first;
    order.push_back(s);
    const Node& source = nodes[static_cast<std::size_t>(s)];
    std::size_t kept = 0;
    for (const NodeId t : queued) {
      if (t == s) continue;
      queued[kept++] = t;
      Node& target = nodes[static_cast<std::size_t>(t)];
      const double candidate = std::max(source.cost, weight(s, t));
      if (candidate < target.cost) {
        target.cost = candidate;
        target.predecessor = s;
        target.conquered_label = source.conquered_label;
        heap.decrease_key(t, candidate);
      }
    }
    queued.resize(kept);
  }
  train.set_ordered_ids(std::move(order));

  TrainedModel model{std::move(train), distance, backend, options.policy, kModelFormatVersion, 0.0};
  model.train_seconds = seconds_since(start);
  return model;
}

Prediction predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& sample) {
  require_trained(model);
  if (sample.size() != model.subgraph.n_features()) {
    throw ShapeError("predict: sample has " + std::to_string(sample.size()) + " features, model expects " +
                     std::to_string(model.subgraph.n_features()));
  }
  check_domain(model.distance, sample.data(), static_cast<std::size_t>(sample.size()), model.policy);
  return predict_unchecked(model, kernel(model.distance, model.backend, model.policy), sample.data());
}

BatchPrediction predict_batch(const TrainedModel& model, const FeatureMatrix& samples, unsigned threads) {
  const auto start = Clock::now();
  BatchPrediction out;
  if (samples.rows() == 0) {
    out.seconds = seconds_since(start);
    return out;
  }
  require_trained(model);
  if (samples.cols() != model.subgraph.n_features()) {
    throw ShapeError("predict_batch: samples have " + std::to_string(samples.cols()) + " features, model expects " +
                     std::to_string(model.subgraph.n_features()));
  }
  const KernelFn fn = kernel(model.distance, model.backend, model.policy);
  const auto width = static_cast<std::size_t>(samples.cols());
  const Eigen::Index n = samples.rows();
  out.predictions.resize(static_cast<std::size_t>(n));

  auto run = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index r = begin; r < end; ++r) {
      const double* row = samples.row(r).data();
      try {
        check_domain(model.distance, row, width, model.policy);
        out.predictions[static_cast<std::size_t>(r)] = predict_unchecked(model, fn, row);
      } catch (const DomainError& e) {
        throw DomainError("row " + std::to_string(r) + ": " + e.what());
      }
    }
  };

  const auto workers = static_cast<Eigen::Index>(std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(n)));
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const Eigen::Index band = (n + workers - 1) / workers;
    for (Eigen::Index w = 0; w < workers; ++w) {
      const Eigen::Index begin = std::min(n, w * band);
      const Eigen::Index end = std::min(n, begin + band);
      pool.emplace_back([&, w, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    // lowest band first, so the reported row is the earliest failing one
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace opf
