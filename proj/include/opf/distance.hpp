#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "opf/errors.hpp"
#include "opf/types.hpp"

namespace opf {

// The 47 measures in taxonomy order; the numeric value is the D-number.
enum class DistanceId : int {
  Chebyshev = 1,
  ChiSquared,
  Euclidean,
  Gaussian,
  LogEuclidean,
  Manhattan,
  BrayCurtis,
  Canberra,
  Gower,
  Kulczynski,
  Lorentzian,
  NonIntersection,
  Soergel,
  Chord,
  Cosine,
  Dice,
  Jaccard,
  Bhattacharyya,
  Hellinger,
  Matusita,
  SquaredChord,
  AdditiveSymmetricChiSquared,
  AverageEuclidean,
  Clark,
  Divergence,
  LogSquaredEuclidean,
  MeanCensoredEuclidean,
  NeymanChiSquared,
  PearsonChiSquared,
  SangviChiSquared,
  SquaredChiSquared,
  SquaredEuclidean,
  Jeffreys,
  Jensen,
  JensenShannon,
  KDivergence,
  KullbackLeibler,
  Topsoe,
  MaxSymmetricChiSquared,
  MinSymmetricChiSquared,
  VicisSymmetric1,
  VicisSymmetric2,
  VicisSymmetric3,
  VicisWaveHedges,
  Hamming,
  Hassanat,
  Statistic,
};

inline constexpr int kDistanceCount = 47;

enum class DistanceFamily { Lp, L1, InnerProduct, SquaredChord, SquaredL2, ShannonEntropy, Vicissitude, Other };

enum class InputDomain { Real, NonNegative, Positive };

enum class KernelBackend { Reference, Optimized };

// Lenient replaces a near-zero denominator or log argument by kEpsilon;
// Strict throws DomainError instead and also checks the input domain.
enum class DomainPolicy { Lenient, Strict };

inline constexpr double kEpsilon = 1e-10;

struct DistanceSpec {
  DistanceId id;
  std::string_view name;
  DistanceFamily family;
  bool symmetric;
  bool zero_on_identity;
  InputDomain input_domain;
  bool nonstandard_formula;
};

const DistanceSpec& registry_lookup(DistanceId id);
std::span<const DistanceSpec, kDistanceCount> distance_registry();

constexpr int code(DistanceId id) noexcept { return static_cast<int>(id); }

// Accepts a canonical snake_case name ("bray_curtis") or a code ("D7").
std::optional<DistanceId> find_distance(std::string_view name_or_code) noexcept;
// Like find_distance but throws ParameterError listing the valid names.
DistanceId parse_distance(std::string_view name_or_code);

std::string_view to_string(DistanceFamily family) noexcept;
std::string_view to_string(InputDomain domain) noexcept;
std::string_view to_string(KernelBackend backend) noexcept;
KernelBackend parse_backend(std::string_view name);

// Raw kernel over contiguous storage. No shape, finiteness or input-domain
// checks; the policy only governs the denominator and log guards.
using KernelFn = double (*)(const double* x, const double* y, std::size_t n);

KernelFn kernel(DistanceId id, KernelBackend backend, DomainPolicy policy = DomainPolicy::Lenient);

// Throws DomainError when any value is non-finite or, under Strict, outside
// the measure's declared input domain.
void check_domain(DistanceId id, const double* values, std::size_t n, DomainPolicy policy);

// Same as check_domain over every row; the message names the offending row.
void check_domain_rows(DistanceId id, const FeatureMatrix& rows, DomainPolicy policy);

namespace detail {
double evaluate_contiguous(DistanceId id, const double* x, const double* y, std::size_t nx, std::size_t ny,
                           KernelBackend backend, DomainPolicy policy);
}

// d(x, y) for any pair of dense double vectors (row or column, any Eigen
// expression). Result is finite and >= 0.
template <typename DerivedX, typename DerivedY>
double evaluate(DistanceId id, const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                KernelBackend backend, DomainPolicy policy = DomainPolicy::Lenient) {
  if ((x.rows() != 1 && x.cols() != 1) || (y.rows() != 1 && y.cols() != 1)) {
    throw ShapeError("evaluate: arguments must be vectors");
  }
  const Eigen::Ref<const Eigen::VectorXd> xv(x.derived());
  const Eigen::Ref<const Eigen::VectorXd> yv(y.derived());
  return detail::evaluate_contiguous(id, xv.data(), yv.data(), static_cast<std::size_t>(xv.size()),
                                     static_cast<std::size_t>(yv.size()), backend, policy);
}

// M(i, j) = evaluate(id, X.row(i), X.row(j)). Rows are computed in
// parallel when threads > 1; the result does not depend on the thread count.
DistanceMatrix pairwise_matrix(DistanceId id, const FeatureMatrix& rows, KernelBackend backend,
                               DomainPolicy policy = DomainPolicy::Lenient, unsigned threads = 1);

// Arc weights for training, stored row-major so row s holds every arc
// leaving s contiguously. Entry (i, j) is evaluate(row i, row j), except that
// for symmetric measures both (i, j) and (j, i) hold the value for
// min(i, j), max(i, j).
using ArcMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
ArcMatrix arc_matrix(DistanceId id, const FeatureMatrix& rows, KernelBackend backend,
                     DomainPolicy policy = DomainPolicy::Lenient);

}  // namespace opf
