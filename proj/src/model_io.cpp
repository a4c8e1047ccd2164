#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opf/errors.hpp"
#include "opf/supervised_opf.hpp"

namespace opf {
namespace {

using Json = nlohmann::ordered_json;

const Json& field(const Json& object, const char* name, const std::string& where) {
  if (!object.is_object()) throw ParseError(where + ": expected an object");
  auto it = object.find(name);
  if (it == object.end()) throw ParseError(where + ": missing field '" + name + "'");
  return *it;
}

template <typename T>
T typed(const Json& object, const char* name, const std::string& where) {
  const Json& value = field(object, name, where);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!value.is_number()) throw ParseError(where + "." + name + ": expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!value.is_number_integer()) throw ParseError(where + "." + name + ": expected an integer");
    }
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "." + name + ": " + e.what());
  }
}

std::string_view policy_name(DomainPolicy p) { return p == DomainPolicy::Strict ? "strict" : "lenient"; }

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  const Subgraph& graph = model.subgraph;
  Json doc;
  doc["format_version"] = model.format_version;
  doc["distance"] = registry_lookup(model.distance).name;
  doc["backend"] = to_string(model.backend);
  doc["domain_policy"] = policy_name(model.policy);
  doc["n_features"] = graph.n_features();
  doc["n_classes"] = graph.n_classes();
  doc["n_nodes"] = graph.size();
  Json nodes = Json::array();
  for (const Node& node : graph.nodes()) {
    Json j;
    j["id"] = node.id;
    j["sample_id"] = node.sample_id;
    j["true_label"] = node.true_label;
    j["conquered_label"] = node.conquered_label;
    j["cost"] = node.cost;
    j["predecessor"] = node.predecessor ? Json(*node.predecessor) : Json(nullptr);
    j["is_prototype"] = node.is_prototype;
    Json features = Json::array();
    for (Eigen::Index c = 0; c < graph.n_features(); ++c) features.push_back(graph.features()(node.id, c));
    j["features"] = std::move(features);
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["ordered_ids"] = graph.ordered_ids();
  return doc.dump(1) + "\n";
}

TrainedModel deserialize_model(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("model: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const std::string root = "model";
  const int version = typed<int>(doc, "format_version", root);
  if (version != kModelFormatVersion) {
    throw VersionError("model: unsupported format_version " + std::to_string(version) + " (supported: " +
                       std::to_string(kModelFormatVersion) + ")");
  }

  TrainedModel model;
  model.format_version = version;
  try {
    model.distance = parse_distance(typed<std::string>(doc, "distance", root));
    model.backend = parse_backend(typed<std::string>(doc, "backend", root));
  } catch (const ParameterError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  const std::string policy = typed<std::string>(doc, "domain_policy", root);
  if (policy != "strict" && policy != "lenient") throw ParseError("model.domain_policy: unknown value '" + policy + "'");
  model.policy = policy == "strict" ? DomainPolicy::Strict : DomainPolicy::Lenient;

  const int n_features = typed<int>(doc, "n_features", root);
  const int n_classes = typed<int>(doc, "n_classes", root);
  const long long n_nodes = typed<long long>(doc, "n_nodes", root);
  if (n_features < 1) throw ParseError("model.n_features: must be >= 1");
  if (n_classes < 1) throw ParseError("model.n_classes: must be >= 1");
  const Json& nodes = field(doc, "nodes", root);
  if (!nodes.is_array()) throw ParseError("model.nodes: expected an array");
  if (n_nodes < 0 || static_cast<std::size_t>(n_nodes) != nodes.size()) {
    throw ParseError("model.nodes: header declares " + std::to_string(n_nodes) + " nodes, payload holds " +
                     std::to_string(nodes.size()));
  }
  const auto n = static_cast<std::size_t>(n_nodes);

  FeatureMatrix features(static_cast<Eigen::Index>(n), n_features);
  std::vector<int> labels(n), sample_ids(n);
  std::vector<Node> parsed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = "model.nodes[" + std::to_string(i) + "]";
    const Json& j = nodes[i];
    Node& node = parsed[i];
    node.id = typed<NodeId>(j, "id", where);
    if (node.id != static_cast<NodeId>(i)) throw ParseError(where + ".id: expected " + std::to_string(i));
    node.sample_id = typed<int>(j, "sample_id", where);
    node.true_label = typed<int>(j, "true_label", where);
    node.conquered_label = typed<int>(j, "conquered_label", where);
    if (node.true_label < 1 || node.true_label > n_classes || node.conquered_label < 1 ||
        node.conquered_label > n_classes) {
      throw ParseError(where + ": label outside [1, " + std::to_string(n_classes) + "]");
    }
    node.cost = typed<double>(j, "cost", where);
    const Json& pred = field(j, "predecessor", where);
    if (!pred.is_null()) {
      if (!pred.is_number_integer()) throw ParseError(where + ".predecessor: expected an integer or null");
      const auto p = pred.get<long long>();
      if (p < 0 || static_cast<std::size_t>(p) >= n) throw ParseError(where + ".predecessor: out of range");
      node.predecessor = static_cast<NodeId>(p);
    }
    node.is_prototype = typed<bool>(j, "is_prototype", where);
    const Json& f = field(j, "features", where);
    if (!f.is_array() || f.size() != static_cast<std::size_t>(n_features)) {
      throw ParseError(where + ".features: expected " + std::to_string(n_features) + " numbers");
    }
    for (int c = 0; c < n_features; ++c) {
      if (!f[static_cast<std::size_t>(c)].is_number()) {
        throw ParseError(where + ".features[" + std::to_string(c) + "]: expected a number");
      }
      features(static_cast<Eigen::Index>(i), c) = f[static_cast<std::size_t>(c)].get<double>();
    }
    labels[i] = node.true_label;
    sample_ids[i] = node.sample_id;
  }

  const Json& ordered = field(doc, "ordered_ids", root);
  if (!ordered.is_array() || ordered.size() != n) {
    throw ParseError("model.ordered_ids: expected " + std::to_string(n) + " ids");
  }
  std::vector<NodeId> order(n);
  std::vector<char> seen(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!ordered[k].is_number_integer()) throw ParseError("model.ordered_ids[" + std::to_string(k) + "]: not an id");
    const auto id = ordered[k].get<long long>();
    if (id < 0 || static_cast<std::size_t>(id) >= n || seen[static_cast<std::size_t>(id)]) {
      throw ParseError("model.ordered_ids[" + std::to_string(k) + "]: not a permutation of node ids");
    }
    seen[static_cast<std::size_t>(id)] = 1;
    order[k] = static_cast<NodeId>(id);
  }

  try {
    model.subgraph = Subgraph(std::move(features), labels, sample_ids, n_classes);
  } catch (const Error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  model.subgraph.nodes() = std::move(parsed);
  model.subgraph.set_ordered_ids(std::move(order));
  return model;
}

void save_model(const TrainedModel& model, std::ostream& sink) {
  sink << serialize_model(model);
  if (!sink) throw IoError("save_model: write failed");
}

TrainedModel load_model(std::istream& source) {
  std::string text((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace opf
