#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "opf/errors.hpp"
#include "opf/stream.hpp"

namespace opf::stream {
namespace {

using Json = nlohmann::ordered_json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct RawRow {
  long long id;
  long long label;
  std::vector<double> features;
  std::string where;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view token, const std::string& where, const char* what) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.empty()) {
    throw ParseError(where + ": " + what + " '" + std::string(token) + "' is not a valid number");
  }
  return value;
}

std::vector<std::string_view> tokenize(std::string_view line, bool comma) {
  std::vector<std::string_view> out;
  if (comma) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

Dataset assemble(std::vector<RawRow> rows, Format format, const std::string& source) {
  Dataset out;
  out.source_format = format;
  if (rows.empty()) throw ParseError(source + ": no samples");
  const std::size_t width = rows.front().features.size();
  if (width == 0) throw ParseError(rows.front().where + ": sample has no features");
  out.ids.reserve(rows.size());
  out.labels.reserve(rows.size());
  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  std::unordered_set<long long> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const RawRow& row = rows[r];
    if (row.features.size() != width) {
      throw ParseError(row.where + ": ragged row with " + std::to_string(row.features.size()) +
                       " features, expected " + std::to_string(width));
    }
    if (row.label < 1 || row.label > std::numeric_limits<int>::max()) {
      throw ParseError(row.where + ": label " + std::to_string(row.label) + " must be >= 1");
    }
    if (row.id < std::numeric_limits<int>::min() || row.id > std::numeric_limits<int>::max()) {
      throw ParseError(row.where + ": id " + std::to_string(row.id) + " out of range");
    }
    if (!seen.insert(row.id).second) throw ParseError(row.where + ": duplicate id " + std::to_string(row.id));
    out.ids.push_back(static_cast<int>(row.id));
    out.labels.push_back(static_cast<int>(row.label));
    for (std::size_t c = 0; c < width; ++c) {
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.features[c];
    }
  }
  return out;
}

Dataset read_delimited(std::istream& in, bool comma, bool strict, const std::string& source) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
      if (strict) throw ParseError(where + ": blank or comment line in strict mode");
      continue;
    }
    const auto tokens = tokenize(body, comma);
    if (tokens.size() < 3) throw ParseError(where + ": expected 'id label f1 ... fF'");
    RawRow row{parse_number<long long>(tokens[0], where, "id"), parse_number<long long>(tokens[1], where, "label"),
               {}, where};
    row.features.reserve(tokens.size() - 2);
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      row.features.push_back(parse_number<double>(tokens[t], where, "feature"));
    }
    rows.push_back(std::move(row));
  }
  return assemble(std::move(rows), comma ? Format::Csv : Format::Txt, source);
}

Dataset read_json(std::istream& in, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
    throw ParseError(source + ": expected a top-level object with a 'data' array");
  }
  std::vector<RawRow> rows;
  const Json& data = doc["data"];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string where = source + ": data[" + std::to_string(i) + "]";
    const Json& item = data[i];
    if (!item.is_object()) throw ParseError(where + ": expected an object");
    for (const char* key : {"id", "label"}) {
      if (!item.contains(key) || !item[key].is_number_integer()) {
        throw ParseError(where + "." + key + ": expected an integer");
      }
    }
    if (!item.contains("features") || !item["features"].is_array()) {
      throw ParseError(where + ".features: expected an array");
    }
    RawRow row{item["id"].get<long long>(), item["label"].get<long long>(), {}, where};
    for (std::size_t c = 0; c < item["features"].size(); ++c) {
      const Json& v = item["features"][c];
      if (!v.is_number()) throw ParseError(where + ".features[" + std::to_string(c) + "]: not a number");
      row.features.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return assemble(std::move(rows), Format::Json, source);
}

// Little-endian 32-bit fields, independent of host byte order.
std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

Dataset read_opf(std::istream& in, const std::string& source) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 12) {
    throw ParseError(source + ": truncated header (" + std::to_string(bytes.size()) + " of 12 bytes)");
  }
  const auto n_samples = static_cast<std::int32_t>(load_u32(data));
  const auto n_classes = static_cast<std::int32_t>(load_u32(data + 4));
  const auto n_features = static_cast<std::int32_t>(load_u32(data + 8));
  if (n_samples < 1 || n_classes < 1 || n_features < 1) {
    throw ParseError(source + ": offset 0: invalid header (" + std::to_string(n_samples) + ", " +
                     std::to_string(n_classes) + ", " + std::to_string(n_features) + ")");
  }
  const std::size_t record = 8 + 4 * static_cast<std::size_t>(n_features);
  const std::size_t expected = 12 + record * static_cast<std::size_t>(n_samples);
  if (bytes.size() != expected) {
    throw ParseError(source + ": offset " + std::to_string(std::min(bytes.size(), expected)) + ": expected " +
                     std::to_string(expected) + " bytes, found " + std::to_string(bytes.size()) +
                     (bytes.size() < expected ? " (truncated)" : " (trailing data)"));
  }
  std::vector<RawRow> rows(static_cast<std::size_t>(n_samples));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t offset = 12 + r * record;
    const unsigned char* p = data + offset;
    RawRow& row = rows[r];
    row.where = source + ": offset " + std::to_string(offset);
    row.id = static_cast<std::int32_t>(load_u32(p));
    row.label = static_cast<std::int32_t>(load_u32(p + 4));
    if (row.label > n_classes) {
      throw ParseError(row.where + ": label " + std::to_string(row.label) + " exceeds header n_classes " +
                       std::to_string(n_classes));
    }
    row.features.resize(static_cast<std::size_t>(n_features));
    for (std::size_t c = 0; c < row.features.size(); ++c) {
      row.features[c] = static_cast<double>(std::bit_cast<float>(load_u32(p + 8 + 4 * c)));
    }
  }
  return assemble(std::move(rows), Format::OpfBinary, source);
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

float to_float(double v, std::size_t row, Eigen::Index col) {
  if (!std::isfinite(v) || std::abs(v) > static_cast<double>(std::numeric_limits<float>::max())) {
    throw ConversionError(".opf cannot represent feature " + std::to_string(col) + " of row " + std::to_string(row) +
                          " (value " + std::to_string(v) + ")");
  }
  return static_cast<float>(v);
}

}  // namespace

int Dataset::max_label() const noexcept {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.ids == b.ids && a.labels == b.labels && a.features.rows() == b.features.rows() &&
         a.features.cols() == b.features.cols() && a.features == b.features;
}

bool equal_quantized(const Dataset& a, const Dataset& b) {
  if (a.ids != b.ids || a.labels != b.labels || a.features.rows() != b.features.rows() ||
      a.features.cols() != b.features.cols()) {
    return false;
  }
  return a.features.cast<float>() == b.features.cast<float>();
}

Format infer_format(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".txt") return Format::Txt;
  if (ext == ".csv") return Format::Csv;
  if (ext == ".json") return Format::Json;
  if (ext == ".opf" || ext == ".dat") return Format::OpfBinary;
  throw ParseError(path.string() + ": cannot infer format from extension '" + ext + "'");
}

Format parse_format(std::string_view name) {
  std::string key = lower(std::string(name));
  if (!key.empty() && key.front() == '.') key.erase(0, 1);
  if (key == "txt") return Format::Txt;
  if (key == "csv") return Format::Csv;
  if (key == "json") return Format::Json;
  if (key == "opf" || key == "dat" || key == "binary") return Format::OpfBinary;
  throw ParameterError("unknown format '" + std::string(name) + "'; expected txt|csv|json|opf");
}

std::string_view to_string(Format format) noexcept {
  switch (format) {
    case Format::Txt: return "txt";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::OpfBinary: return "opf";
  }
  return "?";
}

Dataset read(std::istream& in, Format format, bool strict, const std::string& source_name) {
  switch (format) {
    case Format::Txt: return read_delimited(in, false, strict, source_name);
    case Format::Csv: return read_delimited(in, true, strict, source_name);
    case Format::Json: return read_json(in, source_name);
    case Format::OpfBinary: return read_opf(in, source_name);
  }
  throw ParameterError("read: unknown format");
}

Dataset load(const std::filesystem::path& path, const LoadOptions& options) {
  const Format format = options.format ? *options.format : infer_format(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open for reading");
  return read(in, format, options.strict, path.string());
}

std::string to_bytes(const Dataset& dataset, Format format) {
  std::string out;
  const std::size_t n = dataset.size();
  const Eigen::Index f = dataset.n_features();
  switch (format) {
    case Format::Txt:
    case Format::Csv: {
      const char sep = format == Format::Csv ? ',' : ' ';
      for (std::size_t r = 0; r < n; ++r) {
        out += std::to_string(dataset.ids[r]);
        out += sep;
        out += std::to_string(dataset.labels[r]);
        for (Eigen::Index c = 0; c < f; ++c) {
          out += sep;
          append_double(out, dataset.features(static_cast<Eigen::Index>(r), c));
        }
        out += '\n';
      }
      return out;
    }
    case Format::Json: {
      Json data = Json::array();
      for (std::size_t r = 0; r < n; ++r) {
        Json item;
        item["id"] = dataset.ids[r];
        item["label"] = dataset.labels[r];
        Json features = Json::array();
        for (Eigen::Index c = 0; c < f; ++c) {
          const double v = dataset.features(static_cast<Eigen::Index>(r), c);
          if (!std::isfinite(v)) {
            throw ConversionError("json cannot represent non-finite feature " + std::to_string(c) + " of row " +
                                  std::to_string(r));
          }
          features.push_back(v);
        }
        item["features"] = std::move(features);
        data.push_back(std::move(item));
      }
      Json doc;
      doc["data"] = std::move(data);
      return doc.dump() + "\n";
    }
    case Format::OpfBinary: {
      out.reserve(12 + n * static_cast<std::size_t>(8 + 4 * f));
      store_u32(out, static_cast<std::uint32_t>(n));
      store_u32(out, static_cast<std::uint32_t>(dataset.max_label()));
      store_u32(out, static_cast<std::uint32_t>(f));
      for (std::size_t r = 0; r < n; ++r) {
        store_u32(out, static_cast<std::uint32_t>(dataset.ids[r]));
        store_u32(out, static_cast<std::uint32_t>(dataset.labels[r]));
        for (Eigen::Index c = 0; c < f; ++c) {
          store_u32(out, std::bit_cast<std::uint32_t>(to_float(dataset.features(static_cast<Eigen::Index>(r), c), r, c)));
        }
      }
      return out;
    }
  }
  throw ParameterError("write: unknown format");
}

void write(const Dataset& dataset, std::ostream& out, Format format) {
  const std::string bytes = to_bytes(dataset, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write: output stream failed");
}

void save(const Dataset& dataset, const std::filesystem::path& path, std::optional<Format> format) {
  const Format target = format ? *format : infer_format(path);
  const std::string bytes = to_bytes(dataset, target);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

Subgraph parse(const Dataset& dataset) {
  if (dataset.size() == 0) throw ShapeError("parse: empty dataset");
  return Subgraph(dataset.features, dataset.labels, dataset.ids);
}

Dataset normalize(const Dataset& dataset) {
  Dataset out = dataset;
  if (dataset.size() == 0) return out;
  const Eigen::RowVectorXd lo = dataset.features.colwise().minCoeff();
  const Eigen::RowVectorXd range = dataset.features.colwise().maxCoeff() - lo;
  for (Eigen::Index c = 0; c < out.features.cols(); ++c) {
    if (range(c) > 0.0) {
      out.features.col(c) = (out.features.col(c).array() - lo(c)) / range(c);
    } else {
      out.features.col(c).setZero();
    }
  }
  return out;
}

ConversionReport convert(const std::filesystem::path& in, const std::filesystem::path& out,
                         std::optional<Format> target, const LoadOptions& options) {
  const Dataset dataset = load(in, options);
  const Format to = target ? *target : infer_format(out);
  std::size_t quantized = 0;
  if (to == Format::OpfBinary) {
    for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
      for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
        const double v = dataset.features(r, c);
        if (std::isfinite(v) && static_cast<double>(static_cast<float>(v)) != v) ++quantized;
      }
    }
  }
  save(dataset, out, to);
  return {dataset.source_format, to, dataset.size(), dataset.n_features(), quantized};
}

}  // namespace opf::stream
