// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass --only N to run a single criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "opf/bench.hpp"
#include "opf/errors.hpp"
#include "opf/stream.hpp"
#include "opf/supervised_opf.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using opf::DistanceId;
using opf::KernelBackend;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

opf::Subgraph random_graph(opf::SplitMix64& rng, int n, int dims, int classes) {
  opf::FeatureMatrix f(n, dims);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform();
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] =
        i < classes ? i + 1 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
  }
  return opf::Subgraph(f, labels);
}

// 1. Trained costs equal the minimax path cost from the prototype set.
Outcome bottleneck_oracle() {
  const auto start = Clock::now();
  opf::SplitMix64 rng(1001);
  std::size_t mismatches = 0, nodes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(23));
    const auto g = random_graph(rng, n, 8, 3);
    for (auto backend : {KernelBackend::Reference, KernelBackend::Optimized}) {
      const auto model = opf::fit(g, DistanceId::Euclidean, backend);
      const auto w = backend == KernelBackend::Reference
                         ? oracle::distances(g.features(), oracle::euclidean)
                         : oracle::distances(g.features(), opf::kernel(DistanceId::Euclidean, backend));
      std::vector<bool> proto(static_cast<std::size_t>(n), false);
      for (const auto& [a, b] : oracle::kruskal(w)) {
        if (g.node(static_cast<int>(a)).true_label != g.node(static_cast<int>(b)).true_label) {
          proto[a] = proto[b] = true;
        }
      }
      const auto cost = oracle::minimax_costs(w, proto);
      for (int i = 0; i < n; ++i) {
        ++nodes;
        const auto& node = model.subgraph.node(i);
        mismatches += node.cost != cost[static_cast<std::size_t>(i)] ||
                      node.is_prototype != proto[static_cast<std::size_t>(i)];
      }
    }
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 30.0,
          fmt("%zu/%zu node costs differ from the oracle (exact), %.2f s (limit 30 s)", mismatches, nodes, t)};
}

// 2. Prim's tree weight equals the best of all labelled spanning trees.
Outcome mst_oracle() {
  const auto start = Clock::now();
  opf::SplitMix64 rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto g = random_graph(rng, n, 4, 2);
    double total = 0.0;
    for (const auto& e : opf::minimum_spanning_tree(g, DistanceId::Euclidean, KernelBackend::Reference,
                                                    opf::DomainPolicy::Lenient)) {
      total += e.weight;
    }
    const double best = oracle::exhaustive_mst_weight(oracle::distances(g.features(), oracle::euclidean));
    worst = std::max(worst, std::abs(total - best));
  }
  const double t = seconds_since(start);
  return {worst <= 1e-12 && t < 10.0, fmt("max |prim - exhaustive| = %.3g (tol 1e-12), %.2f s (limit 10 s)", worst, t)};
}

// 3. Early-stopping prediction equals the full scan.
Outcome early_stop() {
  opf::SplitMix64 rng(1003);
  std::size_t mismatches = 0;
  for (int m = 0; m < 50; ++m) {
    const int n = 2 + static_cast<int>(rng.below(199));
    const auto backend = m % 2 ? KernelBackend::Optimized : KernelBackend::Reference;
    const auto model = opf::fit(random_graph(rng, n, 5, 2 + m % 3), DistanceId::Euclidean, backend);
    for (int q = 0; q < 10; ++q) {
      Eigen::VectorXd x(5);
      for (auto& v : x) v = rng.uniform();
      const auto fast = opf::predict(model, x);
      const auto full = oracle::exhaustive_predict(model, x);
      mismatches += fast.label != full.label || fast.cost != full.cost;
    }
  }
  return {mismatches == 0, fmt("%zu/500 queries differ in label or cost (exact)", mismatches)};
}

// 4. Reference and optimized kernels agree, with symmetry, identity and
// non-negativity checked per registry flags.
Outcome backend_equivalence() {
  opf::SplitMix64 rng(1004);
  double worst_rel = 0.0, worst_sym = 0.0, worst_id = 0.0;
  std::size_t negatives = 0;
  std::string worst_name = "-";
  for (const auto& spec : opf::distance_registry()) {
    for (int t = 0; t < 1000; ++t) {
      const auto n = static_cast<Eigen::Index>(1 + rng.below(256));
      const Eigen::VectorXd x = oracle::in_domain(spec.input_domain, n, rng);
      const Eigen::VectorXd y = oracle::in_domain(spec.input_domain, n, rng);
      const double ref = opf::evaluate(spec.id, x, y, KernelBackend::Reference);
      const double opt = opf::evaluate(spec.id, x, y, KernelBackend::Optimized);
      const double rel = std::abs(ref - opt) / std::max(1.0, std::abs(ref));
      if (rel > worst_rel) {
        worst_rel = rel;
        worst_name = std::string(spec.name);
      }
      for (auto backend : {KernelBackend::Reference, KernelBackend::Optimized}) {
        const double xy = backend == KernelBackend::Reference ? ref : opt;
        negatives += !(xy >= 0.0);
        if (spec.symmetric) {
          const double yx = opf::evaluate(spec.id, y, x, backend);
          worst_sym = std::max(worst_sym, std::abs(xy - yx) / std::max(1.0, std::abs(xy)));
        }
        if (spec.zero_on_identity) worst_id = std::max(worst_id, opf::evaluate(spec.id, x, x, backend));
      }
    }
  }
  const bool pass = worst_rel <= 1e-9 && worst_sym <= 1e-12 && worst_id <= 1e-12 && negatives == 0;
  return {pass, fmt("47 x 1000 pairs: max rel diff %.3g (%s, tol 1e-9), symmetry %.3g (tol 1e-12), identity %.3g "
                    "(tol 1e-12), %zu negative",
                    worst_rel, worst_name.c_str(), worst_sym, worst_id, negatives)};
}

// 5. Optimized training is at most 0.7x the reference time.
Outcome speedup() {
  opf::bench::BlobSpec spec;
  spec.classes = 2;
  spec.per_class = 2000;
  spec.dims = 64;
  spec.separation = 3.0;
  spec.seed = 1005;
  const auto graph = opf::stream::parse(opf::bench::generate_synthetic(spec));
  std::string detail;
  bool pass = true;
  for (DistanceId id : {DistanceId::Euclidean, DistanceId::Manhattan}) {
    // Runs alternate between backends so drift in machine speed hits both.
    double mean[2] = {0.0, 0.0};
    const KernelBackend order[2] = {KernelBackend::Reference, KernelBackend::Optimized};
    for (int slot = 0; slot < 2; ++slot) (void)opf::fit(graph, id, order[slot]);
    for (int run = 0; run < 5; ++run) {
      for (int slot = 0; slot < 2; ++slot) mean[slot] += opf::fit(graph, id, order[slot]).train_seconds / 5.0;
    }
    const double ratio = mean[1] / mean[0];
    pass = pass && ratio <= 0.7;
    detail += fmt("D%d opt %.3f s / ref %.3f s = %.3f; ", opf::code(id), mean[1], mean[0], ratio);
  }
  return {pass, detail + "limit 0.7 (4000 x 64, mean of 5 fits)"};
}

// 6. Well-separated blobs are classified almost perfectly.
Outcome blob_accuracy() {
  const auto start = Clock::now();
  opf::bench::BenchPlan plan;
  opf::bench::BlobSpec spec;
  spec.seed = 1006;
  plan.datasets = {opf::bench::DataSource::synthetic(spec)};
  plan.distances = {DistanceId::Euclidean};
  plan.backends = {KernelBackend::Optimized};
  plan.folds = 2;
  plan.runs = 25;
  plan.base_seed = 1006;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : opf::bench::run_plan(plan, {})) {
    if (!r.completed()) continue;
    sum += r.accuracy;
    ++count;
  }
  const double acc = count ? sum / static_cast<double>(count) : 0.0;
  const double t = seconds_since(start);
  return {count == 50 && acc >= 0.95 && t < 20.0,
          fmt("mean accuracy %.4f over %zu folds (min 0.95), %.2f s (limit 20 s)", acc, count, t)};
}

// 7. Exact Wilcoxon p equals enumeration over all sign patterns.
Outcome wilcoxon() {
  opf::SplitMix64 rng(1007);
  double worst = 0.0;
  std::size_t tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = opf::bench::kMinWilcoxonPairs + rng.below(13 - opf::bench::kMinWilcoxonPairs);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = trial % 2 ? rng.uniform() : static_cast<double>(rng.below(8));
      b[i] = trial % 2 ? rng.uniform() : static_cast<double>(rng.below(8));
    }
    try {
      const auto r = opf::bench::wilcoxon_signed_rank(a, b);
      worst = std::max(worst, std::abs(r.p_value - oracle::enumerated_wilcoxon_p(a, b)));
      ++tested;
    } catch (const opf::DegenerateTestError&) {
    }
  }
  const std::vector<double> diffs{1, -2, 3, 4, 5};
  const auto example = opf::bench::wilcoxon_signed_rank(diffs, std::vector<double>(5, 0.0));
  return {worst <= 1e-12 && tested >= 150 && example.w == 2.0,
          fmt("%zu samples, max |p - enumeration| = %.3g (tol 1e-12); worked example W = %g (expect 2)", tested, worst,
              example.w)};
}

// 8. File formats and models round-trip.
Outcome round_trips() {
  const fs::path dir = fs::temp_directory_path() / "opf_acceptance_roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  opf::SplitMix64 rng(1008);
  std::size_t binary_ok = 0, cross_ok = 0, model_ok = 0;
  for (int t = 0; t < 20; ++t) {
    opf::stream::Dataset d;
    const int n = 2 + static_cast<int>(rng.below(40));
    const int f = 1 + static_cast<int>(rng.below(12));
    const int classes = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, 4))));
    d.features.resize(n, f);
    for (int i = 0; i < n; ++i) {
      d.ids.push_back(static_cast<int>(rng.below(1000)) + 1000 * i);
      d.labels.push_back(i < classes ? i + 1 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
      // 20 significant bits at varying scales, so every value is exact in float.
      for (int c = 0; c < f; ++c) {
        d.features(i, c) = std::ldexp(static_cast<double>(rng.below(1 << 20)) - (1 << 19), t - 12);
      }
    }
    opf::stream::save(d, dir / "a.opf");
    opf::stream::convert(dir / "a.opf", dir / "a.txt");
    opf::stream::convert(dir / "a.txt", dir / "b.opf");
    binary_ok += slurp(dir / "a.opf") == slurp(dir / "b.opf");

    for (Eigen::Index i = 0; i < d.features.size(); ++i) d.features.data()[i] = rng.uniform() * 2e3 - 1e3;
    bool same = true;
    for (const char* name : {"c.txt", "c.csv", "c.json"}) {
      opf::stream::save(d, dir / name);
      same = same && opf::stream::load(dir / name) == d;
    }
    cross_ok += same;
  }

  const auto model = opf::fit(random_graph(rng, 120, 6, 3), DistanceId::Canberra, KernelBackend::Optimized);
  std::stringstream buffer;
  opf::save_model(model, buffer);
  const auto loaded = opf::load_model(buffer);
  for (int q = 0; q < 100; ++q) {
    Eigen::VectorXd x(6);
    for (auto& v : x) v = rng.uniform();
    model_ok += opf::predict(model, x) == opf::predict(loaded, x);
  }
  fs::remove_all(dir);
  return {binary_ok == 20 && cross_ok == 20 && model_ok == 100,
          fmt(".opf->txt->.opf identical %zu/20, txt/csv/json equal %zu/20, model predictions kept %zu/100", binary_ok,
              cross_ok, model_ok)};
}

// 9. The harness emits one record per planned cell and the summary is
// reproducible from records.csv alone.
Outcome harness_accounting() {
  opf::bench::BenchPlan plan;
  opf::bench::BlobSpec a, b;
  a.per_class = 15;
  a.seed = 1;
  b.classes = 3;
  b.per_class = 10;
  b.dims = 3;
  b.seed = 2;
  plan.datasets = {opf::bench::DataSource::synthetic(a), opf::bench::DataSource::synthetic(b)};
  plan.distances = {DistanceId::Euclidean, DistanceId::Manhattan, DistanceId::KullbackLeibler};
  plan.backends = {KernelBackend::Optimized, KernelBackend::Reference};
  plan.runs = 2;
  plan.folds = 2;
  plan.strict_domain = true;  // KL on signed blobs turns into skip records

  std::stringstream csv;
  opf::bench::write_records_header(csv);
  std::size_t streamed = 0;
  const auto records = opf::bench::run_plan(plan, [&](const opf::bench::BenchRecord& r) {
    opf::bench::write_record(csv, r);
    ++streamed;
  });
  const auto parsed = opf::bench::read_records(csv);
  std::size_t skipped = 0;
  for (const auto& r : parsed) skipped += !r.completed();

  const auto summary = opf::bench::summarize(parsed, plan.alpha);
  const auto original = opf::bench::summarize(records, plan.alpha);
  bool exact = opf::bench::render_csv(summary) == opf::bench::render_csv(original);
  for (const auto& row : summary.rows) {
    for (auto backend : plan.backends) {
      const auto& stats = backend == KernelBackend::Optimized ? row.optimized : row.reference;
      double train = 0.0, predict = 0.0, acc = 0.0;
      std::size_t count = 0;
      for (const auto& r : parsed) {
        if (!r.completed() || r.dataset != row.dataset || r.distance != row.distance || r.backend != backend) continue;
        train += r.train_seconds;
        predict += r.predict_seconds;
        acc += r.accuracy;
        ++count;
      }
      if (!stats) {
        exact = exact && count == 0;
        continue;
      }
      const double n = static_cast<double>(count);
      exact = exact && stats->count == count && stats->mean_train_seconds == train / n &&
              stats->mean_predict_seconds == predict / n && stats->mean_accuracy == acc / n;
    }
  }
  return {parsed.size() == 48 && streamed == 48 && exact,
          fmt("%zu records (%zu skipped), expect 48; summary means re-derived bit-for-bit: %s", parsed.size(), skipped,
              exact ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"bottleneck oracle", bottleneck_oracle},   {"mst oracle", mst_oracle},
      {"early stop", early_stop},                 {"backend equivalence", backend_equivalence},
      {"speedup", speedup},                       {"blob accuracy", blob_accuracy},
      {"wilcoxon exact", wilcoxon},               {"round trips", round_trips},
      {"harness accounting", harness_accounting},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome outcome{false, ""};
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s criterion %zu (%s): %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
