#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "opf/distance.hpp"

namespace opf {
namespace {

using F = DistanceFamily;
using D = InputDomain;
using Id = DistanceId;

constexpr std::array<DistanceSpec, kDistanceCount> kRegistry{{
    {Id::Chebyshev, "chebyshev", F::Lp, true, true, D::Real, false},
    {Id::ChiSquared, "chi_squared", F::Lp, true, true, D::NonNegative, false},
    {Id::Euclidean, "euclidean", F::Lp, true, true, D::Real, false},
    {Id::Gaussian, "gaussian", F::Lp, true, true, D::Real, true},
    {Id::LogEuclidean, "log_euclidean", F::Lp, true, true, D::Real, true},
    {Id::Manhattan, "manhattan", F::Lp, true, true, D::Real, false},
    {Id::BrayCurtis, "bray_curtis", F::L1, true, true, D::NonNegative, false},
    {Id::Canberra, "canberra", F::L1, true, true, D::Real, false},
    {Id::Gower, "gower", F::L1, true, true, D::Real, false},
    {Id::Kulczynski, "kulczynski", F::L1, true, true, D::NonNegative, false},
    {Id::Lorentzian, "lorentzian", F::L1, true, true, D::Real, false},
    {Id::NonIntersection, "non_intersection", F::L1, true, true, D::Real, false},
    {Id::Soergel, "soergel", F::L1, true, true, D::NonNegative, false},
    {Id::Chord, "chord", F::InnerProduct, true, true, D::Real, false},
    {Id::Cosine, "cosine", F::InnerProduct, true, true, D::Real, false},
    {Id::Dice, "dice", F::InnerProduct, true, true, D::Real, false},
    {Id::Jaccard, "jaccard", F::InnerProduct, true, true, D::Real, false},
    {Id::Bhattacharyya, "bhattacharyya", F::SquaredChord, true, false, D::NonNegative, false},
    {Id::Hellinger, "hellinger", F::SquaredChord, true, true, D::NonNegative, false},
    {Id::Matusita, "matusita", F::SquaredChord, true, true, D::NonNegative, false},
    {Id::SquaredChord, "squared_chord", F::SquaredChord, true, true, D::NonNegative, false},
    {Id::AdditiveSymmetricChiSquared, "additive_symmetric_chi_squared", F::SquaredL2, true, true, D::Positive, false},
    {Id::AverageEuclidean, "average_euclidean", F::SquaredL2, true, true, D::Real, false},
    {Id::Clark, "clark", F::SquaredL2, true, true, D::NonNegative, false},
    {Id::Divergence, "divergence", F::SquaredL2, true, true, D::NonNegative, false},
    {Id::LogSquaredEuclidean, "log_squared_euclidean", F::SquaredL2, true, true, D::Real, true},
    {Id::MeanCensoredEuclidean, "mean_censored_euclidean", F::SquaredL2, true, true, D::Real, false},
    {Id::NeymanChiSquared, "neyman_chi_squared", F::SquaredL2, false, true, D::Positive, false},
    {Id::PearsonChiSquared, "pearson_chi_squared", F::SquaredL2, false, true, D::Positive, false},
    {Id::SangviChiSquared, "sangvi_chi_squared", F::SquaredL2, true, true, D::NonNegative, false},
    {Id::SquaredChiSquared, "squared_chi_squared", F::SquaredL2, true, true, D::NonNegative, false},
    {Id::SquaredEuclidean, "squared_euclidean", F::SquaredL2, true, true, D::Real, false},
    {Id::Jeffreys, "jeffreys", F::ShannonEntropy, true, true, D::Positive, false},
    {Id::Jensen, "jensen", F::ShannonEntropy, true, true, D::Positive, false},
    {Id::JensenShannon, "jensen_shannon", F::ShannonEntropy, true, true, D::Positive, false},
    {Id::KDivergence, "k_divergence", F::ShannonEntropy, false, true, D::Positive, false},
    {Id::KullbackLeibler, "kullback_leibler", F::ShannonEntropy, false, true, D::Positive, false},
    {Id::Topsoe, "topsoe", F::ShannonEntropy, true, true, D::Positive, false},
    {Id::MaxSymmetricChiSquared, "max_symmetric_chi_squared", F::Vicissitude, true, true, D::Positive, false},
    {Id::MinSymmetricChiSquared, "min_symmetric_chi_squared", F::Vicissitude, true, true, D::Positive, false},
    {Id::VicisSymmetric1, "vicis_symmetric_1", F::Vicissitude, true, true, D::Positive, false},
    {Id::VicisSymmetric2, "vicis_symmetric_2", F::Vicissitude, true, true, D::Positive, false},
    {Id::VicisSymmetric3, "vicis_symmetric_3", F::Vicissitude, true, true, D::Positive, false},
    {Id::VicisWaveHedges, "vicis_wave_hedges", F::Vicissitude, true, true, D::Positive, false},
    {Id::Hamming, "hamming", F::Other, true, true, D::Real, false},
    {Id::Hassanat, "hassanat", F::Other, true, true, D::Real, false},
    {Id::Statistic, "statistic", F::Other, true, true, D::Real, true},
}};

static_assert([] {
  for (int i = 0; i < kDistanceCount; ++i) {
    if (static_cast<int>(kRegistry[static_cast<std::size_t>(i)].id) != i + 1) return false;
  }
  return true;
}());

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const DistanceSpec& registry_lookup(DistanceId id) {
  const int c = code(id);
  if (c < 1 || c > kDistanceCount) throw ParameterError("unknown distance code " + std::to_string(c));
  return kRegistry[static_cast<std::size_t>(c - 1)];
}

std::span<const DistanceSpec, kDistanceCount> distance_registry() { return kRegistry; }

std::optional<DistanceId> find_distance(std::string_view name_or_code) noexcept {
  const std::string key = lowercase(name_or_code);
  if (key.size() >= 2 && key[0] == 'd' && std::isdigit(static_cast<unsigned char>(key[1]))) {
    int value = 0;
    for (std::size_t i = 1; i < key.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(key[i])) || value > 100) return std::nullopt;
      value = value * 10 + (key[i] - '0');
    }
    if (value < 1 || value > kDistanceCount) return std::nullopt;
    return static_cast<DistanceId>(value);
  }
  for (const DistanceSpec& spec : kRegistry) {
    if (spec.name == key) return spec.id;
  }
  return std::nullopt;
}

DistanceId parse_distance(std::string_view name_or_code) {
  if (auto id = find_distance(name_or_code)) return *id;
  std::string valid;
  for (const DistanceSpec& spec : kRegistry) {
    if (!valid.empty()) valid += ", ";
    valid += spec.name;
  }
  throw ParameterError("unknown distance '" + std::string(name_or_code) + "'; valid names: " + valid);
}

std::string_view to_string(DistanceFamily family) noexcept {
  switch (family) {
    case F::Lp: return "lp";
    case F::L1: return "l1";
    case F::InnerProduct: return "inner_product";
    case F::SquaredChord: return "squared_chord";
    case F::SquaredL2: return "squared_l2";
    case F::ShannonEntropy: return "shannon_entropy";
    case F::Vicissitude: return "vicissitude";
    case F::Other: return "other";
  }
  return "?";
}

std::string_view to_string(InputDomain domain) noexcept {
  switch (domain) {
    case D::Real: return "real";
    case D::NonNegative: return "non_negative";
    case D::Positive: return "positive";
  }
  return "?";
}

std::string_view to_string(KernelBackend backend) noexcept {
  return backend == KernelBackend::Reference ? "reference" : "optimized";
}

KernelBackend parse_backend(std::string_view name) {
  const std::string key = lowercase(name);
  if (key == "reference" || key == "ref") return KernelBackend::Reference;
  if (key == "optimized" || key == "opt") return KernelBackend::Optimized;
  throw ParameterError("unknown backend '" + std::string(name) + "'; expected reference|optimized");
}

void check_domain(DistanceId id, const double* values, std::size_t n, DomainPolicy policy) {
  const InputDomain domain = registry_lookup(id).input_domain;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw DomainError("non-finite value at component " + std::to_string(i));
    if (policy == DomainPolicy::Strict) {
      if (domain == InputDomain::NonNegative && v < 0.0) {
        throw DomainError(std::string(registry_lookup(id).name) + " requires non-negative inputs; component " +
                          std::to_string(i) + " is " + std::to_string(v));
      }
      if (domain == InputDomain::Positive && !(v > 0.0)) {
        throw DomainError(std::string(registry_lookup(id).name) + " requires positive inputs; component " +
                          std::to_string(i) + " is " + std::to_string(v));
      }
    }
  }
}

void check_domain_rows(DistanceId id, const FeatureMatrix& rows, DomainPolicy policy) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    try {
      check_domain(id, rows.row(r).data(), static_cast<std::size_t>(rows.cols()), policy);
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(r) + ": " + e.what());
    }
  }
}

namespace detail {

double evaluate_contiguous(DistanceId id, const double* x, const double* y, std::size_t nx, std::size_t ny,
                           KernelBackend backend, DomainPolicy policy) {
  if (nx != ny) {
    throw ShapeError("evaluate: length mismatch " + std::to_string(nx) + " vs " + std::to_string(ny));
  }
  if (nx == 0) throw ShapeError("evaluate: empty vectors");
  check_domain(id, x, nx, policy);
  check_domain(id, y, ny, policy);
  return kernel(id, backend, policy)(x, y, nx);
}

}  // namespace detail
}  // namespace opf
