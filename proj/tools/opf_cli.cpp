#include <charconv>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opf/bench.hpp"
#include "opf/errors.hpp"
#include "opf/stream.hpp"
#include "opf/supervised_opf.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw opf::IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<opf::DistanceId> parse_distance_list(const std::string& text) {
  std::vector<opf::DistanceId> out;
  if (text == "all") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(opf::parse_distance(item));
  }
  if (out.empty()) throw opf::ParameterError("--distances: empty list");
  return out;
}

std::vector<opf::KernelBackend> parse_backend_list(const std::string& text) {
  if (text == "both") return {opf::KernelBackend::Optimized, opf::KernelBackend::Reference};
  return {opf::parse_backend(text)};
}

std::vector<opf::bench::DataSource> expand_sources(const std::vector<std::string>& specs) {
  std::vector<opf::bench::DataSource> out;
  for (const std::string& spec : specs) {
    if (spec.rfind("synthetic:", 0) == 0) {
      out.push_back(opf::bench::DataSource::synthetic(opf::bench::parse_blob_spec(spec.substr(10))));
    } else if (fs::is_directory(spec)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(spec)) {
        if (!entry.is_regular_file()) continue;
        try {
          (void)opf::stream::infer_format(entry.path());
          files.push_back(entry.path());
        } catch (const opf::Error&) {
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back(opf::bench::DataSource::file(f));
    } else {
      out.push_back(opf::bench::DataSource::file(spec));
    }
  }
  return out;
}

int run_train(const std::string& input, const std::string& distance, const std::string& backend,
              const std::string& model_path, bool strict, bool precompute) {
  const opf::stream::Dataset data = opf::stream::load(input, {std::nullopt, strict});
  const opf::FitOptions options{strict ? opf::DomainPolicy::Strict : opf::DomainPolicy::Lenient,
                                precompute ? opf::ArcEvaluation::Precomputed : opf::ArcEvaluation::Automatic};
  const opf::TrainedModel model =
      opf::fit(opf::stream::parse(data), opf::parse_distance(distance), opf::parse_backend(backend), options);
  std::ofstream out = open_output(model_path);
  opf::save_model(model, out);
  if (!out) throw opf::IoError("write failed: " + model_path);
  std::size_t prototypes = 0;
  for (const auto& node : model.subgraph.nodes()) prototypes += node.is_prototype;
  std::cout << "trained " << data.size() << " samples, " << prototypes << " prototypes in " << model.train_seconds
            << " s\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& input, const std::string& out_path, bool strict,
                unsigned threads) {
  std::ifstream in(model_path, std::ios::binary);
  if (!in) throw opf::IoError("cannot open model '" + model_path + "'");
  const opf::TrainedModel model = opf::load_model(in);
  const opf::stream::Dataset data = opf::stream::load(input, {std::nullopt, strict});
  const opf::BatchPrediction result = opf::predict_batch(model, data.features, threads);

  std::ofstream out = open_output(out_path);
  out << "id,label,cost,conqueror\n";
  std::size_t hits = 0;
  char buf[64];
  for (std::size_t i = 0; i < result.predictions.size(); ++i) {
    const opf::Prediction& p = result.predictions[i];
    const auto res = std::to_chars(buf, buf + sizeof buf, p.cost);
    out << data.ids[i] << ',' << p.label << ',' << std::string_view(buf, res.ptr - buf) << ',' << p.conqueror_id
        << '\n';
    hits += p.label == data.labels[i];
  }
  if (!out) throw opf::IoError("write failed: " + out_path);
  const double acc = data.size() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(data.size());
  std::cout << "predicted " << data.size() << " samples in " << result.seconds << " s, accuracy " << acc << '\n';
  return 0;
}

int run_convert(const std::string& in, const std::string& out, const std::string& to, bool strict) {
  std::optional<opf::stream::Format> target;
  if (!to.empty()) target = opf::stream::parse_format(to);
  const auto report = opf::stream::convert(in, out, target, {std::nullopt, strict});
  std::cout << "converted " << report.samples << " samples x " << report.features << " features from "
            << opf::stream::to_string(report.from) << " to " << opf::stream::to_string(report.to);
  if (report.quantized_values > 0) std::cout << " (" << report.quantized_values << " values rounded to float)";
  std::cout << '\n';
  return 0;
}

std::string format_real(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

struct BenchArgs {
  std::vector<std::string> data;
  std::string distances = "all";
  std::string backends = "both";
  int folds = 2;
  int runs = 25;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool strict = false;
  bool no_stratify = false;
  bool no_warm_up = false;
  std::string out = "report";
};

int run_bench(const BenchArgs& args) {
  opf::bench::BenchPlan plan;
  plan.datasets = expand_sources(args.data);
  plan.distances = parse_distance_list(args.distances);
  plan.backends = parse_backend_list(args.backends);
  plan.folds = args.folds;
  plan.runs = args.runs;
  plan.base_seed = args.seed;
  plan.alpha = args.alpha;
  plan.strict_domain = args.strict;
  plan.stratified = !args.no_stratify;
  plan.warm_up = !args.no_warm_up;
  plan.threads = opf::bench::threads_from_environment();
  if (!(plan.alpha > 0.0 && plan.alpha < 1.0)) throw opf::ParameterError("--alpha must lie in (0, 1)");

  const fs::path dir(args.out);
  fs::create_directories(dir);
  std::ofstream records_out = open_output(dir / "records.csv");
  opf::bench::write_records_header(records_out);
  const std::size_t total = opf::bench::planned_cells(plan);
  std::size_t done = 0;
  const auto records = opf::bench::run_plan(plan, [&](const opf::bench::BenchRecord& r) {
    opf::bench::write_record(records_out, r);
    ++done;
    if (done % 50 == 0 || done == total) std::cerr << "\r" << done << "/" << total << " cells" << std::flush;
  });
  std::cerr << '\n';
  records_out.close();

  const opf::bench::Summary summary = opf::bench::summarize(records, plan.alpha);
  std::vector<std::string> header{
      "# OPF training-time benchmark",
      "",
      "Protocol: for each run r, the data is split into " + std::to_string(plan.folds) + " " +
          (plan.stratified ? "stratified" : "unstratified") + " folds with seed " + std::to_string(plan.base_seed) +
          " XOR r; each fold in turn is the test set and the rest is the training set.",
      "Runs: " + std::to_string(plan.runs) + ", alpha: " + format_real(plan.alpha) +
          ", domain policy: " + (plan.strict_domain ? "strict" : "lenient") + ".",
      "",
      "```",
  };
  std::string text = opf::bench::render_text(summary, header);
  text += "```\n";
  std::ofstream md = open_output(dir / "summary.md");
  md << text;
  std::ofstream csv = open_output(dir / "summary.csv");
  csv << opf::bench::render_csv(summary);
  std::cout << "records: " << records.size() << " (" << summary.completed << " completed, " << summary.skipped
            << " skipped)\nreport written to " << dir.string() << '\n';
  return 0;
}

int run_distances() {
  std::cout << "code name family domain symmetric\n";
  for (const opf::DistanceSpec& spec : opf::distance_registry()) {
    std::cout << 'D' << opf::code(spec.id) << ' ' << spec.name << ' ' << opf::to_string(spec.family) << ' '
              << opf::to_string(spec.input_domain) << ' ' << (spec.symmetric ? "yes" : "no")
              << (spec.nonstandard_formula ? " (nonstandard formula)" : "") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimum-path forest classifier toolkit"};
  app.set_version_flag("--version", std::string(OPF_VERSION));
  app.require_subcommand(1);

  std::string input, distance = "euclidean", backend = "optimized", model_path, out_path, to;
  bool strict = false, precompute = false;
  unsigned threads = 1;

  auto* train = app.add_subcommand("train", "fit a model on a labelled dataset");
  train->add_option("--input", input, "training data (.txt, .csv, .json, .opf)")->required();
  train->add_option("--distance", distance, "distance name or code")->capture_default_str();
  train->add_option("--backend", backend, "reference or optimized")->capture_default_str();
  train->add_option("--model", model_path, "model output path")->required();
  train->add_flag("--strict", strict, "strict parsing and input-domain checks");
  train->add_flag("--precompute", precompute, "precompute the full distance matrix");

  auto* predict = app.add_subcommand("predict", "label samples with a trained model");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--input", input, "samples to label")->required();
  predict->add_option("--out", out_path, "CSV output: id,label,cost,conqueror")->required();
  predict->add_flag("--strict", strict, "strict parsing");
  predict->add_option("--threads", threads, "worker threads")->capture_default_str();

  std::string conv_in, conv_out;
  auto* convert = app.add_subcommand("convert", "convert between dataset formats");
  convert->add_option("--in", conv_in, "input dataset")->required();
  convert->add_option("--out", conv_out, "output dataset")->required();
  convert->add_option("--to", to, "output format (txt, csv, json, opf); default from extension");
  convert->add_flag("--strict", strict, "strict parsing");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "run the training-time benchmark");
  bench->add_option("--data", bench_args.data, "dataset file, directory or synthetic:<spec>")->required();
  bench->add_option("--distances", bench_args.distances, "all or a list such as D3,D6,manhattan")
      ->capture_default_str();
  bench->add_option("--backends", bench_args.backends, "both, reference or optimized")->capture_default_str();
  bench->add_option("--folds", bench_args.folds, "folds per run")->capture_default_str();
  bench->add_option("--runs", bench_args.runs, "repetitions")->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "base seed")->capture_default_str();
  bench->add_option("--alpha", bench_args.alpha, "significance level of the Wilcoxon test")->capture_default_str();
  bench->add_flag("--strict", bench_args.strict, "strict input-domain checks");
  bench->add_flag("--no-stratify", bench_args.no_stratify, "plain random folds");
  bench->add_flag("--no-warm-up", bench_args.no_warm_up, "skip the untimed warm-up fit");
  bench->add_option("--out", bench_args.out, "report directory")->capture_default_str();

  auto* distances = app.add_subcommand("distances", "list the distance registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(input, distance, backend, model_path, strict, precompute);
    if (*predict) return run_predict(model_path, input, out_path, strict, threads);
    if (*convert) return run_convert(conv_in, conv_out, to, strict);
    if (*bench) return run_bench(bench_args);
    if (*distances) return run_distances();
  } catch (const opf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
