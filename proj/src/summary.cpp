#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "opf/bench.hpp"
#include "opf/errors.hpp"

namespace opf::bench {
namespace {

struct Accumulator {
  std::size_t count = 0;
  double train = 0.0;
  double predict = 0.0;
  double accuracy = 0.0;

  void add(const BenchRecord& r) {
    ++count;
    train += r.train_seconds;
    predict += r.predict_seconds;
    accuracy += r.accuracy;
  }

  std::optional<BackendStats> stats() const {
    if (count == 0) return std::nullopt;
    const double n = static_cast<double>(count);
    return BackendStats{count, train / n, predict / n, accuracy / n};
  }
};

struct Group {
  std::string dataset;
  DistanceId distance;
  Accumulator optimized;
  Accumulator reference;
  std::map<std::pair<int, int>, double> opt_train;
  std::map<std::pair<int, int>, double> ref_train;
};

// Three decimals; means below a millisecond switch to scientific notation.
std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, v != 0.0 && v < 1e-3 ? "%.2e" : "%.3f", v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

Summary summarize(std::span<const BenchRecord> records, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("summary: alpha must lie in (0, 1)");
  Summary out;
  out.alpha = alpha;
  std::vector<Group> groups;
  for (const BenchRecord& r : records) {
    if (!r.completed()) {
      ++out.skipped;
      continue;
    }
    ++out.completed;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.dataset == r.dataset && g.distance == r.distance; });
    if (it == groups.end()) {
      groups.push_back(Group{r.dataset, r.distance, {}, {}, {}, {}});
      it = std::prev(groups.end());
    }
    if (r.backend == KernelBackend::Optimized) {
      it->optimized.add(r);
      it->opt_train[{r.run, r.fold}] = r.train_seconds;
    } else {
      it->reference.add(r);
      it->ref_train[{r.run, r.fold}] = r.train_seconds;
    }
  }
  if (out.completed == 0) throw EmptySummaryError("summary: no completed cells among " +
                                                  std::to_string(records.size()) + " records");

  for (const Group& g : groups) {
    SummaryRow row{g.dataset, g.distance, g.optimized.stats(), g.reference.stats(), std::nullopt, std::nullopt};
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& [key, t] : g.opt_train) {
      const auto match = g.ref_train.find(key);
      if (match == g.ref_train.end()) continue;
      a.push_back(t);
      b.push_back(match->second);
    }
    if (!a.empty()) {
      try {
        const WilcoxonResult w = wilcoxon_signed_rank(a, b);
        row.verdict = EquivalenceVerdict{g.dataset, g.distance, w.w, w.p_value, w.p_value >= alpha, alpha};
      } catch (const DegenerateTestError&) {
      }
    }
    if (row.optimized && row.reference) {
      row.faster = row.optimized->mean_train_seconds <= row.reference->mean_train_seconds ? KernelBackend::Optimized
                                                                                           : KernelBackend::Reference;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string format_cell(const SummaryRow& row) {
  const bool equivalent = row.verdict && row.verdict->equivalent;
  auto part = [&](const std::optional<BackendStats>& stats, KernelBackend backend) {
    if (!stats) return std::string("-");
    std::string s = fixed3(stats->mean_train_seconds);
    if (equivalent) {
      s += '~';
    } else if (row.faster == backend) {
      s += '*';
    }
    return s;
  };
  return part(row.optimized, KernelBackend::Optimized) + " [" + part(row.reference, KernelBackend::Reference) + "]";
}

std::string render_csv(const Summary& summary) {
  std::string out =
      "dataset,distance,opt_count,opt_train_seconds,opt_predict_seconds,opt_accuracy,"
      "ref_count,ref_train_seconds,ref_predict_seconds,ref_accuracy,w_statistic,p_value,equivalent,faster\n";
  auto stats = [](const std::optional<BackendStats>& s) {
    if (!s) return std::string(",,,");
    return std::to_string(s->count) + ',' + shortest(s->mean_train_seconds) + ',' +
           shortest(s->mean_predict_seconds) + ',' + shortest(s->mean_accuracy);
  };
  for (const SummaryRow& row : summary.rows) {
    out += row.dataset + ',' + std::string(registry_lookup(row.distance).name) + ',';
    out += stats(row.optimized) + ',' + stats(row.reference) + ',';
    if (row.verdict) {
      out += shortest(row.verdict->w_statistic) + ',' + shortest(row.verdict->p_value) + ',' +
             (row.verdict->equivalent ? "true" : "false");
    } else {
      out += ",,n/a";
    }
    out += ',';
    if (row.faster) out += to_string(*row.faster);
    out += '\n';
  }
  return out;
}

std::string render_text(const Summary& summary, std::span<const std::string> header_lines) {
  std::ostringstream out;
  for (const std::string& line : header_lines) out << line << '\n';
  if (!header_lines.empty()) out << '\n';
  out << "Mean training seconds per cell as \"optimized [reference]\".\n"
      << "'*' marks the faster mean. '~' marks both means when the Wilcoxon signed-rank test on paired\n"
      << "training times finds no difference (p >= " << summary.alpha << ").\n"
      << "Completed cells: " << summary.completed << ", skipped cells: " << summary.skipped << ".\n";

  std::vector<std::string> datasets;
  std::vector<DistanceId> distances;
  for (const SummaryRow& row : summary.rows) {
    if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end()) datasets.push_back(row.dataset);
    if (std::find(distances.begin(), distances.end(), row.distance) == distances.end()) {
      distances.push_back(row.distance);
    }
  }
  std::sort(distances.begin(), distances.end());
  auto find_row = [&](const std::string& dataset, DistanceId d) -> const SummaryRow* {
    for (const SummaryRow& row : summary.rows) {
      if (row.dataset == dataset && row.distance == d) return &row;
    }
    return nullptr;
  };

  constexpr std::size_t kPerTable = 10;
  for (std::size_t begin = 0; begin < distances.size(); begin += kPerTable) {
    const std::size_t end = std::min(distances.size(), begin + kPerTable);
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> head{"dataset"};
    for (std::size_t i = begin; i < end; ++i) head.push_back("D" + std::to_string(code(distances[i])));
    table.push_back(head);
    for (const std::string& dataset : datasets) {
      std::vector<std::string> line{dataset};
      for (std::size_t i = begin; i < end; ++i) {
        const SummaryRow* row = find_row(dataset, distances[i]);
        line.push_back(row ? format_cell(*row) : "-");
      }
      table.push_back(line);
    }
    std::vector<std::size_t> widths(head.size(), 0);
    for (const auto& line : table) {
      for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
    }
    out << '\n';
    for (std::size_t r = 0; r < table.size(); ++r) {
      std::string text;
      for (std::size_t c = 0; c < table[r].size(); ++c) {
        text += pad(table[r][c], widths[c]);
        text += c + 1 < table[r].size() ? " | " : "";
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out << text << '\n';
      if (r == 0) {
        std::string rule;
        for (std::size_t c = 0; c < widths.size(); ++c) {
          rule += std::string(widths[c], '-');
          rule += c + 1 < widths.size() ? "-|-" : "";
        }
        out << rule << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace opf::bench
