#include <gtest/gtest.h>

#include <set>

#include "opf/errors.hpp"
#include "opf/supervised_opf.hpp"
#include "oracles.hpp"

using opf::DistanceId;
using opf::KernelBackend;

namespace {

opf::Subgraph line_fixture() {
  opf::FeatureMatrix f(4, 1);
  f << 0, 1, 10, 11;
  const std::vector<int> labels{1, 1, 2, 2};
  return opf::Subgraph(f, labels);
}

opf::Subgraph random_graph(opf::SplitMix64& rng, int n, int dims, int classes) {
  opf::FeatureMatrix f(n, dims);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform();
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < classes ? i + 1 : 1 + static_cast<int>(rng.below(classes));
  return opf::Subgraph(f, labels);
}

}  // namespace

TEST(Fit, LineFixture) {
  for (auto backend : {KernelBackend::Reference, KernelBackend::Optimized}) {
    const auto model = opf::fit(line_fixture(), DistanceId::Manhattan, backend);
    const auto& g = model.subgraph;
    std::vector<bool> prototypes;
    std::vector<double> costs;
    std::vector<int> labels;
    for (const auto& node : g.nodes()) {
      prototypes.push_back(node.is_prototype);
      costs.push_back(node.cost);
      labels.push_back(node.conquered_label);
    }
    EXPECT_EQ(prototypes, (std::vector<bool>{false, true, true, false}));
    EXPECT_EQ(costs, (std::vector<double>{1, 0, 0, 1}));
    EXPECT_EQ(labels, (std::vector<int>{1, 1, 2, 2}));
    EXPECT_EQ(g.node(0).predecessor, 1);
    EXPECT_EQ(g.node(3).predecessor, 2);

    const auto p = opf::predict(model, Eigen::VectorXd::Constant(1, 5.0));
    EXPECT_EQ(p.label, 1);
    EXPECT_EQ(p.cost, 4.0);
    EXPECT_EQ(p.conqueror_id, 1);
  }
}

TEST(Fit, OrderedIdsSortedByCost) {
  opf::SplitMix64 rng(5);
  const auto model = opf::fit(random_graph(rng, 60, 4, 3), DistanceId::Euclidean, KernelBackend::Optimized);
  const auto& order = model.subgraph.ordered_ids();
  ASSERT_EQ(order.size(), 60u);
  EXPECT_EQ(std::set<opf::NodeId>(order.begin(), order.end()).size(), 60u);
  for (std::size_t i = 1; i < order.size(); ++i) {
    EXPECT_LE(model.subgraph.node(order[i - 1]).cost, model.subgraph.node(order[i]).cost);
  }
}

TEST(Fit, PathConsistency) {
  opf::SplitMix64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = opf::fit(random_graph(rng, 40, 5, 3), DistanceId::Manhattan, KernelBackend::Reference);
    const auto& g = model.subgraph;
    for (const auto& node : g.nodes()) {
      if (node.is_prototype) {
        EXPECT_EQ(node.cost, 0.0);
        EXPECT_FALSE(node.predecessor.has_value());
        EXPECT_EQ(node.conquered_label, node.true_label);
        continue;
      }
      ASSERT_TRUE(node.predecessor.has_value());
      const auto& pred = g.node(*node.predecessor);
      const double d = opf::evaluate(DistanceId::Manhattan, g.sample(pred.id), g.sample(node.id),
                                     KernelBackend::Reference);
      EXPECT_EQ(node.cost, std::max(pred.cost, d));
      EXPECT_EQ(node.conquered_label, pred.conquered_label);
    }
  }
}

TEST(Fit, Deterministic) {
  opf::SplitMix64 a(13), b(13);
  const auto m1 = opf::fit(random_graph(a, 50, 3, 2), DistanceId::Canberra, KernelBackend::Optimized);
  const auto m2 = opf::fit(random_graph(b, 50, 3, 2), DistanceId::Canberra, KernelBackend::Optimized);
  EXPECT_EQ(opf::serialize_model(m1), opf::serialize_model(m2));
}

TEST(Fit, PrecomputedMatrixGivesSameModel) {
  opf::SplitMix64 rng(17);
  const auto g = random_graph(rng, 50, 3, 3);
  for (auto backend : {KernelBackend::Reference, KernelBackend::Optimized}) {
    const auto lazy = opf::fit(g, DistanceId::Euclidean, backend, {opf::DomainPolicy::Lenient, opf::ArcEvaluation::OnDemand});
    const auto eager =
        opf::fit(g, DistanceId::Euclidean, backend, {opf::DomainPolicy::Lenient, opf::ArcEvaluation::Precomputed});
    const auto automatic = opf::fit(g, DistanceId::Euclidean, backend);
    EXPECT_EQ(opf::serialize_model(lazy), opf::serialize_model(eager));
    EXPECT_EQ(opf::serialize_model(lazy), opf::serialize_model(automatic));
  }
}

TEST(Fit, MatchesMinimaxOracle) {
  opf::SplitMix64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(20));
    const auto g = random_graph(rng, n, 8, 3);
    const auto model = opf::fit(g, DistanceId::Euclidean, KernelBackend::Reference);
    const auto w = oracle::distances(g.features(), oracle::euclidean);
    std::vector<bool> proto(static_cast<std::size_t>(n), false);
    for (const auto& [a, b] : oracle::kruskal(w)) {
      if (g.node(static_cast<int>(a)).true_label != g.node(static_cast<int>(b)).true_label) proto[a] = proto[b] = true;
    }
    const auto cost = oracle::minimax_costs(w, proto);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(model.subgraph.node(i).is_prototype, proto[static_cast<std::size_t>(i)]);
      EXPECT_EQ(model.subgraph.node(i).cost, cost[static_cast<std::size_t>(i)]);
    }
  }
}

TEST(Mst, MatchesExhaustiveEnumeration) {
  opf::SplitMix64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const auto g = random_graph(rng, n, 3, 2);
    const auto edges = opf::minimum_spanning_tree(g, DistanceId::Manhattan, KernelBackend::Reference,
                                                  opf::DomainPolicy::Lenient);
    ASSERT_EQ(edges.size(), static_cast<std::size_t>(n - 1));
    double total = 0.0;
    for (const auto& e : edges) total += e.weight;
    const auto w = oracle::distances(g.features(), [](const double* x, const double* y, std::size_t m) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += std::abs(x[i] - y[i]);
      return s;
    });
    EXPECT_NEAR(total, oracle::exhaustive_mst_weight(w), 1e-12);
  }
}

TEST(Mst, TiesGoToSmallerId) {
  opf::DistanceMatrix w(3, 3);
  w << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  const auto edges = opf::minimum_spanning_tree(w);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0].parent, 0);
  EXPECT_EQ(edges[0].child, 1);
  EXPECT_EQ(edges[1].parent, 0);
  EXPECT_EQ(edges[1].child, 2);
}

TEST(Predict, EarlyStopMatchesExhaustiveScan) {
  opf::SplitMix64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const auto model = opf::fit(random_graph(rng, 2 + static_cast<int>(rng.below(120)), 3, 3),
                                DistanceId::Euclidean, KernelBackend::Optimized);
    for (int q = 0; q < 10; ++q) {
      Eigen::VectorXd x(3);
      for (auto& v : x) v = rng.uniform();
      EXPECT_EQ(opf::predict(model, x), oracle::exhaustive_predict(model, x));
    }
  }
}

TEST(Predict, BatchParallelMatchesSerial) {
  opf::SplitMix64 rng(31);
  const auto model = opf::fit(random_graph(rng, 80, 4, 3), DistanceId::Manhattan, KernelBackend::Optimized);
  opf::FeatureMatrix queries(57, 4);
  for (Eigen::Index i = 0; i < queries.size(); ++i) queries.data()[i] = rng.uniform();
  const auto serial = opf::predict_batch(model, queries, 1);
  const auto parallel = opf::predict_batch(model, queries, 4);
  ASSERT_EQ(serial.predictions.size(), 57u);
  EXPECT_EQ(serial.predictions, parallel.predictions);
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    EXPECT_EQ(serial.predictions[static_cast<std::size_t>(i)], opf::predict(model, queries.row(i).transpose()));
  }
}

TEST(Predict, EmptyBatch) {
  const auto model = opf::fit(line_fixture(), DistanceId::Manhattan, KernelBackend::Reference);
  const auto out = opf::predict_batch(model, opf::FeatureMatrix(0, 1));
  EXPECT_TRUE(out.predictions.empty());
}

TEST(Predict, Errors) {
  const auto model = opf::fit(line_fixture(), DistanceId::Manhattan, KernelBackend::Reference);
  EXPECT_THROW(opf::predict(model, Eigen::VectorXd::Zero(2)), opf::ShapeError);
  EXPECT_THROW(opf::predict_batch(model, opf::FeatureMatrix::Zero(3, 2)), opf::ShapeError);
  EXPECT_THROW(opf::predict(opf::TrainedModel{}, Eigen::VectorXd::Zero(1)), opf::ParameterError);
}

TEST(Fit, DegenerateInputs) {
  opf::FeatureMatrix one(1, 2);
  one << 1, 2;
  EXPECT_THROW(opf::fit(opf::Subgraph(one, std::vector<int>{1}), DistanceId::Euclidean, KernelBackend::Reference),
               opf::DegenerateTrainingError);
  opf::FeatureMatrix two(2, 1);
  two << 0, 1;
  EXPECT_THROW(opf::fit(opf::Subgraph(two, std::vector<int>{1, 1}), DistanceId::Euclidean, KernelBackend::Reference),
               opf::DegenerateTrainingError);
  two(1, 0) = -1;
  EXPECT_THROW(opf::fit(opf::Subgraph(two, std::vector<int>{1, 2}), DistanceId::KullbackLeibler,
                        KernelBackend::Reference, {opf::DomainPolicy::Strict}),
               opf::DomainError);
}

TEST(Subgraph, Validation) {
  opf::FeatureMatrix f(2, 1);
  f << 0, 1;
  EXPECT_THROW(opf::Subgraph(f, std::vector<int>{1}), opf::ShapeError);
  EXPECT_THROW(opf::Subgraph(f, std::vector<int>{0, 1}), opf::ShapeError);
  try {
    opf::Subgraph(f, std::vector<int>{1, 3});
    FAIL();
  } catch (const opf::MissingClassError& e) {
    EXPECT_EQ(e.label(), 2);
  }
}
