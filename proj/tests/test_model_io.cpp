#include <gtest/gtest.h>

#include <sstream>

#include "opf/errors.hpp"
#include "opf/supervised_opf.hpp"
#include "oracles.hpp"

using opf::DistanceId;
using opf::KernelBackend;

namespace {

opf::TrainedModel trained(std::uint64_t seed, DistanceId id = DistanceId::Euclidean) {
  opf::SplitMix64 rng(seed);
  opf::FeatureMatrix f(40, 3);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = 0.01 + rng.uniform();
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) labels[static_cast<std::size_t>(i)] = 1 + i % 3;
  std::vector<int> ids(40);
  for (int i = 0; i < 40; ++i) ids[static_cast<std::size_t>(i)] = 100 + i;
  return opf::fit(opf::Subgraph(f, labels, ids), id, KernelBackend::Optimized);
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST(ModelIo, RoundTripPreservesEverything) {
  const auto model = trained(1, DistanceId::Jensen);
  const auto text = opf::serialize_model(model);
  const auto back = opf::deserialize_model(text);
  EXPECT_EQ(back.distance, model.distance);
  EXPECT_EQ(back.backend, model.backend);
  EXPECT_EQ(back.subgraph.nodes(), model.subgraph.nodes());
  EXPECT_EQ(back.subgraph.ordered_ids(), model.subgraph.ordered_ids());
  EXPECT_EQ(back.subgraph.features(), model.subgraph.features());
  EXPECT_EQ(opf::serialize_model(back), text);
}

TEST(ModelIo, PredictionsSurviveRoundTrip) {
  const auto model = trained(2);
  std::stringstream buffer;
  opf::save_model(model, buffer);
  const auto back = opf::load_model(buffer);
  opf::SplitMix64 rng(3);
  for (int q = 0; q < 100; ++q) {
    Eigen::VectorXd x(3);
    for (auto& v : x) v = rng.uniform();
    EXPECT_EQ(opf::predict(model, x), opf::predict(back, x));
  }
}

TEST(ModelIo, CorruptedNodeCount) {
  const auto text = opf::serialize_model(trained(4));
  EXPECT_THROW(opf::deserialize_model(replace(text, "\"n_nodes\": 40", "\"n_nodes\": 41")), opf::ParseError);
}

TEST(ModelIo, VersionMismatch) {
  const auto text = opf::serialize_model(trained(5));
  EXPECT_THROW(opf::deserialize_model(replace(text, "\"format_version\": 1", "\"format_version\": 9")),
               opf::VersionError);
}

TEST(ModelIo, MalformedInputs) {
  const auto text = opf::serialize_model(trained(6));
  EXPECT_THROW(opf::deserialize_model(text.substr(0, text.size() / 2)), opf::ParseError);
  EXPECT_THROW(opf::deserialize_model("[]"), opf::ParseError);
  EXPECT_THROW(opf::deserialize_model(replace(text, "\"euclidean\"", "\"euclid\"")), opf::ParseError);
  EXPECT_THROW(opf::deserialize_model(replace(text, "\"ordered_ids\": [", "\"ordered_ids\": [0,")), opf::ParseError);
}
