#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <future>
#include <istream>
#include <ostream>
#include <string>

#include "opf/bench.hpp"
#include "opf/errors.hpp"
#include "opf/supervised_opf.hpp"

namespace opf::bench {
namespace {

std::string error_reason(const char* phase, const std::exception& e) { return std::string(phase) + ": " + e.what(); }

struct LoadedDataset {
  std::string name;
  std::optional<stream::Dataset> data;
  std::string failure;
};

// One train/test partition of a run.
struct FoldData {
  std::optional<Subgraph> train;
  stream::Dataset test;
  std::string failure;
};

LoadedDataset load_source(const DataSource& source) {
  LoadedDataset out{source.name, std::nullopt, {}};
  try {
    if (source.blobs) {
      out.data = generate_synthetic(*source.blobs);
    } else if (source.path) {
      out.data = stream::load(*source.path);
    } else {
      out.failure = "load: data source has neither a path nor a generator";
    }
  } catch (const std::exception& e) {
    out.failure = error_reason("load", e);
  }
  return out;
}

std::vector<LoadedDataset> load_all(const std::vector<DataSource>& sources, unsigned threads) {
  std::vector<LoadedDataset> out(sources.size());
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, sources.size()));
  for (std::size_t begin = 0; begin < sources.size(); begin += workers) {
    std::vector<std::future<LoadedDataset>> batch;
    const std::size_t end = std::min(sources.size(), begin + workers);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, load_source,
                                 std::cref(sources[i])));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
  }
  return out;
}

std::vector<FoldData> make_folds(const stream::Dataset& data, const BenchPlan& plan, int run) {
  std::vector<FoldData> folds(static_cast<std::size_t>(plan.folds));
  std::vector<stream::Dataset> parts;
  try {
    parts = stream::kfold(data, plan.folds, plan.base_seed ^ static_cast<std::uint64_t>(run), plan.stratified);
  } catch (const Error& e) {
    for (auto& f : folds) f.failure = error_reason("split", e);
    return folds;
  }
  for (int f = 0; f < plan.folds; ++f) {
    FoldData& fold = folds[static_cast<std::size_t>(f)];
    std::vector<stream::Dataset> train_parts;
    for (int k = 0; k < plan.folds; ++k) {
      if (k != f) train_parts.push_back(parts[static_cast<std::size_t>(k)]);
    }
    fold.test = parts[static_cast<std::size_t>(f)];
    try {
      // The full dataset fixes n_classes so a fold lacking a class fails here.
      const stream::Dataset train = stream::concat(train_parts);
      fold.train = Subgraph(train.features, train.labels, train.ids, data.max_label());
    } catch (const Error& e) {
      fold.failure = error_reason("parse", e);
    }
  }
  return folds;
}

double accuracy(const BatchPrediction& predicted, const std::vector<int>& truth) {
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted.predictions[i].label == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line, const char* column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("records.csv:" + std::to_string(line) + ": bad " + column + " '" + text + "'");
  }
  return value;
}

}  // namespace

DataSource DataSource::file(const std::filesystem::path& p) { return {p.stem().string(), p, std::nullopt}; }

DataSource DataSource::synthetic(const BlobSpec& spec) { return {describe(spec), std::nullopt, spec}; }

unsigned threads_from_environment() {
  const char* env = std::getenv("OPF_THREADS");
  if (env == nullptr) return 1;
  unsigned value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) return 1;
  return value;
}

std::size_t planned_cells(const BenchPlan& plan) {
  const std::size_t distances = plan.distances.empty() ? kDistanceCount : plan.distances.size();
  return plan.datasets.size() * distances * plan.backends.size() * static_cast<std::size_t>(plan.runs) *
         static_cast<std::size_t>(plan.folds);
}

std::vector<BenchRecord> run_plan(const BenchPlan& plan, const RecordSink& sink) {
  if (plan.datasets.empty()) throw EmptyPlanError("bench: plan has no datasets");
  if (plan.folds < 2) throw ParameterError("bench: folds must be >= 2");
  if (plan.runs < 1) throw ParameterError("bench: runs must be >= 1");
  if (plan.backends.empty()) throw ParameterError("bench: no backends selected");

  std::vector<DistanceId> distances = plan.distances;
  if (distances.empty()) {
    for (const DistanceSpec& spec : distance_registry()) distances.push_back(spec.id);
  }
  const FitOptions fit_options{plan.strict_domain ? DomainPolicy::Strict : DomainPolicy::Lenient};

  const std::vector<LoadedDataset> loaded = load_all(plan.datasets, plan.threads);
  if (std::none_of(loaded.begin(), loaded.end(), [](const LoadedDataset& d) { return d.data.has_value(); })) {
    throw EmptyPlanError("bench: no dataset could be loaded (" + loaded.front().failure + ")");
  }

  std::vector<BenchRecord> records;
  records.reserve(planned_cells(plan));
  auto emit = [&](BenchRecord record) {
    if (sink) sink(record);
    records.push_back(std::move(record));
  };

  for (const LoadedDataset& dataset : loaded) {
    // Splits are shared by every distance and backend.
    std::vector<std::vector<FoldData>> runs;
    if (dataset.data) {
      for (int r = 0; r < plan.runs; ++r) runs.push_back(make_folds(*dataset.data, plan, r));
    }

    for (DistanceId distance : distances) {
      if (plan.warm_up && dataset.data) {
        for (KernelBackend backend : plan.backends) {
          for (const auto& fold : runs) {
            if (!fold.front().train) continue;
            try {
              (void)fit(*fold.front().train, distance, backend, fit_options);
            } catch (const Error&) {
              // the timed cells record the failure
            }
            break;
          }
        }
      }

      for (int r = 0; r < plan.runs; ++r) {
        for (int f = 0; f < plan.folds; ++f) {
          for (KernelBackend backend : plan.backends) {
            BenchRecord record{dataset.name, distance, backend, r, f, 0.0, 0.0, 0.0, std::nullopt};
            if (!dataset.data) {
              record.skipped_reason = dataset.failure;
              emit(std::move(record));
              continue;
            }
            const FoldData& fold = runs[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
            if (!fold.train) {
              record.skipped_reason = fold.failure;
              emit(std::move(record));
              continue;
            }
            try {
              const TrainedModel model = fit(*fold.train, distance, backend, fit_options);
              const BatchPrediction predicted = predict_batch(model, fold.test.features);
              record.train_seconds = model.train_seconds;
              record.predict_seconds = predicted.seconds;
              record.accuracy = accuracy(predicted, fold.test.labels);
            } catch (const Error& e) {
              record.skipped_reason = error_reason("cell", e);
            }
            emit(std::move(record));
          }
        }
      }
    }
  }
  return records;
}

void write_records_header(std::ostream& out) {
  out << "dataset,distance,backend,run,fold,train_seconds,predict_seconds,accuracy,skipped_reason\n";
}

void write_record(std::ostream& out, const BenchRecord& record) {
  std::string line = csv_quote(record.dataset);
  line += ',';
  line += registry_lookup(record.distance).name;
  line += ',';
  line += to_string(record.backend);
  line += ',' + std::to_string(record.run) + ',' + std::to_string(record.fold) + ',';
  if (record.completed()) {
    append_double(line, record.train_seconds);
    line += ',';
    append_double(line, record.predict_seconds);
    line += ',';
    append_double(line, record.accuracy);
    line += ',';
  } else {
    line += ",,," + csv_quote(*record.skipped_reason);
  }
  line += '\n';
  out << line;
  out.flush();
  if (!out) throw IoError("records: write failed");
}

std::vector<BenchRecord> read_records(std::istream& in) {
  std::vector<BenchRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("dataset,", 0) == 0) continue;
    if (line.empty()) continue;
    const auto fields = csv_fields(line);
    if (fields.size() != 9) {
      throw ParseError("records.csv:" + std::to_string(line_no) + ": expected 9 columns, found " +
                       std::to_string(fields.size()));
    }
    BenchRecord r;
    r.dataset = fields[0];
    try {
      r.distance = parse_distance(fields[1]);
      r.backend = parse_backend(fields[2]);
    } catch (const ParameterError& e) {
      throw ParseError("records.csv:" + std::to_string(line_no) + ": " + e.what());
    }
    r.run = parse_field<int>(fields[3], line_no, "run");
    r.fold = parse_field<int>(fields[4], line_no, "fold");
    if (!fields[8].empty()) {
      r.skipped_reason = fields[8];
    } else {
      r.train_seconds = parse_field<double>(fields[5], line_no, "train_seconds");
      r.predict_seconds = parse_field<double>(fields[6], line_no, "predict_seconds");
      r.accuracy = parse_field<double>(fields[7], line_no, "accuracy");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace opf::bench
