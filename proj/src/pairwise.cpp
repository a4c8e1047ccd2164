#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "kernel_guards.hpp"
#include "opf/distance.hpp"

namespace opf {

KernelFn kernel(DistanceId id, KernelBackend backend, DomainPolicy policy) {
  const int c = code(id);
  if (c < 1 || c > kDistanceCount) throw ParameterError("unknown distance code " + std::to_string(c));
  return backend == KernelBackend::Reference ? kernels::reference_kernel(id, policy)
                                             : kernels::optimized_kernel(id, policy);
}

namespace {

constexpr Eigen::Index kTileRows = 16;
constexpr Eigen::Index kTileCols = 128;

// Fills out(i, j) = d(row i, row j) for i in [begin, end), tile by tile so a
// block of rows stays in cache while it is paired with a block of columns.
template <typename Out>
void fill_tiled(KernelFn fn, const FeatureMatrix& rows, Out& out, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index n = rows.rows();
  const auto f = static_cast<std::size_t>(rows.cols());
  for (Eigen::Index i0 = begin; i0 < end; i0 += kTileRows) {
    const Eigen::Index i1 = std::min(end, i0 + kTileRows);
    for (Eigen::Index j0 = 0; j0 < n; j0 += kTileCols) {
      const Eigen::Index j1 = std::min(n, j0 + kTileCols);
      for (Eigen::Index i = i0; i < i1; ++i) {
        for (Eigen::Index j = j0; j < j1; ++j) {
          try {
            out(i, j) = fn(rows.row(i).data(), rows.row(j).data(), f);
          } catch (const DomainError& e) {
            throw DomainError("rows (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
          }
        }
      }
    }
  }
}

// Upper triangle only, mirrored into the lower one.
void fill_tiled_symmetric(KernelFn fn, const FeatureMatrix& rows, ArcMatrix& out) {
  const Eigen::Index n = rows.rows();
  const auto f = static_cast<std::size_t>(rows.cols());
  for (Eigen::Index i0 = 0; i0 < n; i0 += kTileRows) {
    const Eigen::Index i1 = std::min(n, i0 + kTileRows);
    for (Eigen::Index j0 = i0; j0 < n; j0 += kTileCols) {
      const Eigen::Index j1 = std::min(n, j0 + kTileCols);
      for (Eigen::Index i = i0; i < i1; ++i) {
        for (Eigen::Index j = std::max(j0, i); j < j1; ++j) {
          try {
            out(i, j) = out(j, i) = fn(rows.row(i).data(), rows.row(j).data(), f);
          } catch (const DomainError& e) {
            throw DomainError("rows (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
          }
        }
      }
    }
  }
}

template <typename Out>
Out pairwise(DistanceId id, const FeatureMatrix& rows, KernelBackend backend, DomainPolicy policy, unsigned threads) {
  const Eigen::Index n = rows.rows();
  if (n < 1 || rows.cols() < 1) throw ShapeError("pairwise_matrix: need at least one row and one column");
  check_domain_rows(id, rows, policy);

  const KernelFn fn = kernel(id, backend, policy);
  Out out(n, n);

  // Each worker owns a contiguous band of rows; values do not depend on the
  // banding because every entry is an independent kernel call.
  const auto workers = static_cast<Eigen::Index>(std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(n)));
  if (workers == 1) {
    fill_tiled(fn, rows, out, 0, n);
    return out;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const Eigen::Index band = (n + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * band;
    const Eigen::Index end = std::min(n, begin + band);
    pool.emplace_back([&, w, begin, end] {
      try {
        fill_tiled(fn, rows, out, begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

DistanceMatrix pairwise_matrix(DistanceId id, const FeatureMatrix& rows, KernelBackend backend, DomainPolicy policy,
                               unsigned threads) {
  return pairwise<DistanceMatrix>(id, rows, backend, policy, threads);
}

ArcMatrix arc_matrix(DistanceId id, const FeatureMatrix& rows, KernelBackend backend, DomainPolicy policy) {
  if (!registry_lookup(id).symmetric) return pairwise<ArcMatrix>(id, rows, backend, policy, 1);
  const Eigen::Index n = rows.rows();
  if (n < 1 || rows.cols() < 1) throw ShapeError("arc_matrix: need at least one row and one column");
  check_domain_rows(id, rows, policy);
  ArcMatrix out(n, n);
  fill_tiled_symmetric(kernel(id, backend, policy), rows, out);
  return out;
}

}  // namespace opf
