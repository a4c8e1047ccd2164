#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opf/subgraph.hpp"
#include "opf/types.hpp"

namespace opf::stream {

enum class Format { Txt, Csv, Json, OpfBinary };

// Loaded samples. ids are unique, labels are 1-based, one feature row per
// sample.
struct Dataset {
  std::vector<int> ids;
  std::vector<int> labels;
  FeatureMatrix features;
  Format source_format = Format::Txt;

  std::size_t size() const noexcept { return ids.size(); }
  Eigen::Index n_features() const noexcept { return features.cols(); }
  int max_label() const noexcept;
};

// Same ids, labels and bit-identical features; the source format is ignored.
bool operator==(const Dataset& a, const Dataset& b);

// Same ids and labels, features equal after rounding both to float.
bool equal_quantized(const Dataset& a, const Dataset& b);

struct LoadOptions {
  std::optional<Format> format;  // inferred from the extension when empty
  bool strict = false;           // reject blank and '#' comment lines
};

Format infer_format(const std::filesystem::path& path);
Format parse_format(std::string_view name);
std::string_view to_string(Format format) noexcept;

Dataset load(const std::filesystem::path& path, const LoadOptions& options = {});
// source_name only labels error messages.
Dataset read(std::istream& in, Format format, bool strict = false, const std::string& source_name = "<stream>");

void save(const Dataset& dataset, const std::filesystem::path& path, std::optional<Format> format = std::nullopt);
void write(const Dataset& dataset, std::ostream& out, Format format);
std::string to_bytes(const Dataset& dataset, Format format);

// One node per row; n_classes = max label. Throws MissingClassError naming
// the first absent label in [1, max].
Subgraph parse(const Dataset& dataset);

struct SplitSpec {
  double fraction = 0.5;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// First side gets ceil(fraction * n) samples. Both sides keep the input's
// row order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec);

// folds parts built by successive splits; for folds == 2 the parts are
// exactly split(dataset, {0.5, seed, stratified}).
std::vector<Dataset> kfold(const Dataset& dataset, int folds, std::uint64_t seed, bool stratified);

Dataset subset(const Dataset& dataset, std::span<const std::size_t> rows);
Dataset concat(std::span<const Dataset> parts);

// Per-feature min-max scaling to [0, 1]; constant features map to 0.
Dataset normalize(const Dataset& dataset);

struct ConversionReport {
  Format from;
  Format to;
  std::size_t samples;
  Eigen::Index features;
  std::size_t quantized_values;  // features altered by float rounding
};

ConversionReport convert(const std::filesystem::path& in, const std::filesystem::path& out,
                         std::optional<Format> target = std::nullopt, const LoadOptions& options = {});

}  // namespace opf::stream
