#include <charconv>
#include <random>
#include <sstream>
#include <string>

#include "opf/bench.hpp"
#include "opf/errors.hpp"
#include "opf/random.hpp"

namespace opf::bench {
namespace {

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParameterError("synthetic spec: bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

}  // namespace

BlobSpec parse_blob_spec(std::string_view text) {
  BlobSpec spec;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParameterError("synthetic spec: expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "classes") spec.classes = parse_value<int>(key, value);
    else if (key == "per_class") spec.per_class = parse_value<int>(key, value);
    else if (key == "dims") spec.dims = parse_value<int>(key, value);
    else if (key == "separation") spec.separation = parse_value<double>(key, value);
    else if (key == "sigma") spec.sigma = parse_value<double>(key, value);
    else if (key == "seed") spec.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "shift") spec.non_negative = parse_value<int>(key, value) != 0;
    else if (key == "floor") spec.floor = parse_value<double>(key, value);
    else if (key == "name") spec.name = std::string(value);
    else throw ParameterError("synthetic spec: unknown key '" + std::string(key) + "'");
  }
  return spec;
}

std::string describe(const BlobSpec& spec) {
  if (!spec.name.empty()) return spec.name;
  std::ostringstream out;
  out << "blobs-c" << spec.classes << "-n" << spec.per_class << "-d" << spec.dims << "-s" << spec.seed;
  return out.str();
}

stream::Dataset generate_synthetic(const BlobSpec& spec) {
  if (spec.classes < 2) throw ParameterError("synthetic: need at least 2 classes");
  if (spec.per_class < 1) throw ParameterError("synthetic: per_class must be >= 1");
  if (spec.dims < 1) throw ParameterError("synthetic: dims must be >= 1");
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) throw ParameterError("synthetic: sigma must be > 0");
  if (!std::isfinite(spec.separation)) throw ParameterError("synthetic: separation must be finite");
  if (spec.non_negative && !(spec.floor >= 0.0)) throw ParameterError("synthetic: floor must be >= 0");
  if (!spec.centers.empty()) {
    if (spec.centers.size() != static_cast<std::size_t>(spec.classes)) {
      throw ParameterError("synthetic: need one center per class");
    }
    for (const auto& c : spec.centers) {
      if (c.size() != static_cast<std::size_t>(spec.dims)) throw ParameterError("synthetic: center has wrong dims");
    }
  }

  const auto n = static_cast<Eigen::Index>(spec.classes) * spec.per_class;
  stream::Dataset out;
  out.ids.resize(static_cast<std::size_t>(n));
  out.labels.resize(static_cast<std::size_t>(n));
  out.features.resize(n, spec.dims);

  SplitMix64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  Eigen::Index row = 0;
  for (int c = 0; c < spec.classes; ++c) {
    Eigen::RowVectorXd center = Eigen::RowVectorXd::Zero(spec.dims);
    if (!spec.centers.empty()) {
      for (int d = 0; d < spec.dims; ++d) center(d) = spec.centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
    } else {
      center(0) = c * spec.separation * spec.sigma;
    }
    for (int k = 0; k < spec.per_class; ++k, ++row) {
      out.ids[static_cast<std::size_t>(row)] = static_cast<int>(row);
      out.labels[static_cast<std::size_t>(row)] = c + 1;
      for (int d = 0; d < spec.dims; ++d) out.features(row, d) = center(d) + noise(rng);
    }
  }
  if (spec.non_negative) out.features.array() += spec.floor - out.features.minCoeff();
  return out;
}

}  // namespace opf::bench
