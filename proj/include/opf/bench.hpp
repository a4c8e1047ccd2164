#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opf/distance.hpp"
#include "opf/stream.hpp"

namespace opf::bench {

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test

inline constexpr std::size_t kExactWilcoxonLimit = 25;
inline constexpr std::size_t kMinWilcoxonPairs = 5;

struct WilcoxonResult {
  double w = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n = 0;  // pairs with a non-zero difference
  double p_value = 1.0;
  bool exact = true;
};

// Paired two-sided test on a - b. Zero differences are dropped; tied
// |differences| share their average rank. Exact null distribution for
// n <= 25, normal approximation with tie and continuity correction above.
// Throws ShapeError on length mismatch and DegenerateTestError when fewer
// than 5 non-zero differences remain.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Synthetic Gaussian blobs

struct BlobSpec {
  int classes = 2;
  int per_class = 100;
  int dims = 2;
  double separation = 10.0;  // distance between consecutive centers, in sigmas
  double sigma = 1.0;
  std::uint64_t seed = 0;
  bool non_negative = false;  // translate so the smallest feature equals floor
  double floor = 1.0;
  // Optional explicit centers (classes x dims); overrides separation.
  std::vector<std::vector<double>> centers;
  std::string name;
};

// "classes=2,per_class=100,dims=2,separation=10,sigma=1,seed=7,shift=1,floor=1,name=blobs"
BlobSpec parse_blob_spec(std::string_view text);
std::string describe(const BlobSpec& spec);

stream::Dataset generate_synthetic(const BlobSpec& spec);

// ---------------------------------------------------------------------------
// Benchmark plan and records

struct DataSource {
  std::string name;
  std::optional<std::filesystem::path> path;
  std::optional<BlobSpec> blobs;

  static DataSource file(const std::filesystem::path& p);
  static DataSource synthetic(const BlobSpec& spec);
};

struct BenchPlan {
  std::vector<DataSource> datasets;
  std::vector<DistanceId> distances;  // empty means all 47
  std::vector<KernelBackend> backends{KernelBackend::Optimized, KernelBackend::Reference};
  int folds = 2;
  int runs = 25;
  std::uint64_t base_seed = 0;
  bool strict_domain = false;
  bool stratified = true;
  bool warm_up = true;
  double alpha = 0.05;
  unsigned threads = 1;  // untimed phases only
};

std::size_t planned_cells(const BenchPlan& plan);

struct BenchRecord {
  std::string dataset;
  DistanceId distance = DistanceId::Euclidean;
  KernelBackend backend = KernelBackend::Optimized;
  int run = 0;
  int fold = 0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  double accuracy = 0.0;
  std::optional<std::string> skipped_reason;

  bool completed() const noexcept { return !skipped_reason.has_value(); }
};

using RecordSink = std::function<void(const BenchRecord&)>;

// Runs every cell in the order dataset, distance, run, fold, backend. Cell
// failures become skipped records; the sink sees each record as soon as it
// exists.
std::vector<BenchRecord> run_plan(const BenchPlan& plan, const RecordSink& sink = {});

// Worker cap for untimed phases from OPF_THREADS (default 1).
unsigned threads_from_environment();

// records.csv columns, in order:
//   dataset,distance,backend,run,fold,train_seconds,predict_seconds,accuracy,skipped_reason
// Reals use shortest round-trip formatting so that reading the file back
// reproduces every value bit for bit.
void write_records_header(std::ostream& out);
void write_record(std::ostream& out, const BenchRecord& record);
std::vector<BenchRecord> read_records(std::istream& in);

// ---------------------------------------------------------------------------
// Summary tables

struct EquivalenceVerdict {
  std::string dataset;
  DistanceId distance = DistanceId::Euclidean;
  double w_statistic = 0.0;
  double p_value = 1.0;
  bool equivalent = false;
  double alpha = 0.05;
};

struct BackendStats {
  std::size_t count = 0;
  double mean_train_seconds = 0.0;
  double mean_predict_seconds = 0.0;
  double mean_accuracy = 0.0;
};

struct SummaryRow {
  std::string dataset;
  DistanceId distance = DistanceId::Euclidean;
  std::optional<BackendStats> optimized;
  std::optional<BackendStats> reference;
  std::optional<EquivalenceVerdict> verdict;  // empty when the test could not run
  std::optional<KernelBackend> faster;
};

struct Summary {
  std::vector<SummaryRow> rows;
  double alpha = 0.05;
  std::size_t completed = 0;
  std::size_t skipped = 0;
};

// Throws EmptySummaryError when no record completed.
Summary summarize(std::span<const BenchRecord> records, double alpha = 0.05);

// "opt [ref]" with three decimals. '*' marks the faster mean; when the
// Wilcoxon verdict says equivalent both means carry '~' instead.
std::string format_cell(const SummaryRow& row);

std::string render_csv(const Summary& summary);
// Aligned text tables shaped datasets x distances, ten distances per table,
// preceded by free-form header lines.
std::string render_text(const Summary& summary, std::span<const std::string> header_lines = {});

}  // namespace opf::bench
