// Reference backend: one plain loop per sum, scalar libm calls, no
// reassociation. The optimized backend must agree with these to 1e-9.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "kernel_guards.hpp"

namespace opf::kernels {
namespace {

using std::size_t;

double sum_sq_diff(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double sum_abs_diff(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
  return s;
}

double dot(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// sum of (x-y)^2 / den(g(x, y)); g picks the chi-square variant
template <DomainPolicy P, typename Den>
double sum_sq_diff_over(const double* x, const double* y, size_t n, Den g) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d / den<P>(g(x[i], y[i]));
  }
  return s;
}

template <DomainPolicy P>
double chebyshev(const double* x, const double* y, size_t n) {
  double m = 0.0;
  for (size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return finish(m);
}

template <DomainPolicy P>
double chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return a + b; }));
}

template <DomainPolicy P>
double euclidean(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(sum_sq_diff(x, y, n)));
}

template <DomainPolicy P>
double gaussian(const double* x, const double* y, size_t n) {
  return finish(1.0 - std::exp(-0.5 * std::sqrt(sum_sq_diff(x, y, n))));
}

template <DomainPolicy P>
double log_euclidean(const double* x, const double* y, size_t n) {
  return finish(std::log(1.0 + std::sqrt(sum_sq_diff(x, y, n))));
}

template <DomainPolicy P>
double manhattan(const double* x, const double* y, size_t n) {
  return finish(sum_abs_diff(x, y, n));
}

template <DomainPolicy P>
double bray_curtis(const double* x, const double* y, size_t n) {
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) total += x[i] + y[i];
  return finish(sum_abs_diff(x, y, n) / den<P>(total));
}

template <DomainPolicy P>
double canberra(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]) / den<P>(std::abs(x[i]) + std::abs(y[i]));
  return finish(s);
}

template <DomainPolicy P>
double gower(const double* x, const double* y, size_t n) {
  return finish(sum_abs_diff(x, y, n) / static_cast<double>(n));
}

template <DomainPolicy P>
double kulczynski(const double* x, const double* y, size_t n) {
  double mins = 0.0;
  for (size_t i = 0; i < n; ++i) mins += std::min(x[i], y[i]);
  return finish(sum_abs_diff(x, y, n) / den<P>(mins));
}

template <DomainPolicy P>
double lorentzian(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::log(1.0 + std::abs(x[i] - y[i]));
  return finish(s);
}

template <DomainPolicy P>
double non_intersection(const double* x, const double* y, size_t n) {
  return finish(0.5 * sum_abs_diff(x, y, n));
}

template <DomainPolicy P>
double soergel(const double* x, const double* y, size_t n) {
  double maxs = 0.0;
  for (size_t i = 0; i < n; ++i) maxs += std::max(x[i], y[i]);
  return finish(sum_abs_diff(x, y, n) / den<P>(maxs));
}

template <DomainPolicy P>
double cosine_similarity(const double* x, const double* y, size_t n) {
  const double xy = dot(x, y, n);
  const double xx = dot(x, x, n);
  const double yy = dot(y, y, n);
  return xy / den<P>(std::sqrt(xx * yy));
}

template <DomainPolicy P>
double chord(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(sqrt_arg(2.0 - 2.0 * cosine_similarity<P>(x, y, n))));
}

template <DomainPolicy P>
double cosine(const double* x, const double* y, size_t n) {
  return finish(1.0 - cosine_similarity<P>(x, y, n));
}

template <DomainPolicy P>
double dice(const double* x, const double* y, size_t n) {
  const double xy = dot(x, y, n);
  const double xx = dot(x, x, n);
  const double yy = dot(y, y, n);
  return finish(1.0 - 2.0 * xy / den<P>(xx + yy));
}

template <DomainPolicy P>
double jaccard(const double* x, const double* y, size_t n) {
  const double xy = dot(x, y, n);
  const double xx = dot(x, x, n);
  const double yy = dot(y, y, n);
  return finish(1.0 - xy / den<P>(xx + yy - xy));
}

template <DomainPolicy P>
double bhattacharyya(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::sqrt(sqrt_arg(x[i] * y[i]));
  return finish(-std::log(log_arg<P>(s)));
}

double sum_sq_root_diff(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = std::sqrt(sqrt_arg(x[i])) - std::sqrt(sqrt_arg(y[i]));
    s += d * d;
  }
  return s;
}

template <DomainPolicy P>
double hellinger(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(2.0 * sum_sq_root_diff(x, y, n)));
}

template <DomainPolicy P>
double matusita(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(sum_sq_root_diff(x, y, n)));
}

template <DomainPolicy P>
double squared_chord(const double* x, const double* y, size_t n) {
  return finish(sum_sq_root_diff(x, y, n));
}

template <DomainPolicy P>
double additive_symmetric_chi_squared(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d * (x[i] + y[i]) / den<P>(x[i] * y[i]);
  }
  return finish(s);
}

template <DomainPolicy P>
double average_euclidean(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(sum_sq_diff(x, y, n) / static_cast<double>(n)));
}

template <DomainPolicy P>
double clark(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = std::abs(x[i] - y[i]) / den<P>(x[i] + y[i]);
    s += r * r;
  }
  return finish(std::sqrt(s));
}

template <DomainPolicy P>
double divergence(const double* x, const double* y, size_t n) {
  return finish(2.0 * sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return (a + b) * (a + b); }));
}

template <DomainPolicy P>
double log_squared_euclidean(const double* x, const double* y, size_t n) {
  return finish(std::log(1.0 + sum_sq_diff(x, y, n)));
}

template <DomainPolicy P>
double mean_censored_euclidean(const double* x, const double* y, size_t n) {
  double nonzero = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (x[i] + y[i] != 0.0) nonzero += 1.0;
  }
  return finish(std::sqrt(sum_sq_diff(x, y, n) / den<P>(nonzero)));
}

template <DomainPolicy P>
double neyman_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double) { return a; }));
}

template <DomainPolicy P>
double pearson_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double, double b) { return b; }));
}

template <DomainPolicy P>
double sangvi_chi_squared(const double* x, const double* y, size_t n) {
  return finish(2.0 * sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return a + b; }));
}

template <DomainPolicy P>
double squared_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return a + b; }));
}

template <DomainPolicy P>
double squared_euclidean(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff(x, y, n));
}

template <DomainPolicy P>
double jeffreys(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += (x[i] - y[i]) * (std::log(log_arg<P>(x[i])) - std::log(log_arg<P>(y[i])));
  return finish(s);
}

template <DomainPolicy P>
double jensen(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double m = (x[i] + y[i]) / 2.0;
    const double xlx = x[i] * std::log(log_arg<P>(x[i]));
    const double yly = y[i] * std::log(log_arg<P>(y[i]));
    s += (xlx + yly) / 2.0 - m * std::log(log_arg<P>(m));
  }
  return finish(s);
}

// x * ln(2x / (x + y)), the building block of the K-divergence family
template <DomainPolicy P>
double k_term(double a, double b) {
  return a * std::log(log_arg<P>(2.0 * a / den<P>(a + b)));
}

template <DomainPolicy P>
double jensen_shannon(const double* x, const double* y, size_t n) {
  double sx = 0.0;
  for (size_t i = 0; i < n; ++i) sx += k_term<P>(x[i], y[i]);
  double sy = 0.0;
  for (size_t i = 0; i < n; ++i) sy += k_term<P>(y[i], x[i]);
  return finish(0.5 * (sx + sy));
}

template <DomainPolicy P>
double k_divergence(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += k_term<P>(x[i], y[i]);
  return finish(s);
}

template <DomainPolicy P>
double kullback_leibler(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * std::log(log_arg<P>(x[i] / den<P>(y[i])));
  return finish(s);
}

template <DomainPolicy P>
double topsoe(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += k_term<P>(x[i], y[i]) + k_term<P>(y[i], x[i]);
  return finish(s);
}

template <DomainPolicy P>
double max_symmetric_chi_squared(const double* x, const double* y, size_t n) {
  const double over_x = sum_sq_diff_over<P>(x, y, n, [](double a, double) { return a; });
  const double over_y = sum_sq_diff_over<P>(x, y, n, [](double, double b) { return b; });
  return finish(std::max(over_x, over_y));
}

template <DomainPolicy P>
double min_symmetric_chi_squared(const double* x, const double* y, size_t n) {
  const double over_x = sum_sq_diff_over<P>(x, y, n, [](double a, double) { return a; });
  const double over_y = sum_sq_diff_over<P>(x, y, n, [](double, double b) { return b; });
  return finish(std::min(over_x, over_y));
}

template <DomainPolicy P>
double vicis_symmetric_1(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double b) {
    const double m = std::min(a, b);
    return m * m;
  }));
}

template <DomainPolicy P>
double vicis_symmetric_2(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return std::min(a, b); }));
}

template <DomainPolicy P>
double vicis_symmetric_3(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](double a, double b) { return std::max(a, b); }));
}

template <DomainPolicy P>
double vicis_wave_hedges(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]) / den<P>(std::min(x[i], y[i]));
  return finish(s);
}

template <DomainPolicy P>
double hamming(const double* x, const double* y, size_t n) {
  double count = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (x[i] != y[i]) count += 1.0;
  }
  return finish(count);
}

template <DomainPolicy P>
double hassanat(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double lo = std::min(x[i], y[i]);
    const double hi = std::max(x[i], y[i]);
    if (lo >= 0.0) {
      s += 1.0 - (1.0 + lo) / (1.0 + hi);
    } else {
      const double shift = std::abs(lo);
      s += 1.0 - (1.0 + lo + shift) / (1.0 + hi + shift);
    }
  }
  return finish(s);
}

template <DomainPolicy P>
double statistic(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::abs(x[i] - (x[i] + y[i]) / 2.0);
  return finish(s);
}

template <DomainPolicy P>
constexpr std::array<KernelFn, kDistanceCount> kTable{
    &chebyshev<P>,
    &chi_squared<P>,
    &euclidean<P>,
    &gaussian<P>,
    &log_euclidean<P>,
    &manhattan<P>,
    &bray_curtis<P>,
    &canberra<P>,
    &gower<P>,
    &kulczynski<P>,
    &lorentzian<P>,
    &non_intersection<P>,
    &soergel<P>,
    &chord<P>,
    &cosine<P>,
    &dice<P>,
    &jaccard<P>,
    &bhattacharyya<P>,
    &hellinger<P>,
    &matusita<P>,
    &squared_chord<P>,
    &additive_symmetric_chi_squared<P>,
    &average_euclidean<P>,
    &clark<P>,
    &divergence<P>,
    &log_squared_euclidean<P>,
    &mean_censored_euclidean<P>,
    &neyman_chi_squared<P>,
    &pearson_chi_squared<P>,
    &sangvi_chi_squared<P>,
    &squared_chi_squared<P>,
    &squared_euclidean<P>,
    &jeffreys<P>,
    &jensen<P>,
    &jensen_shannon<P>,
    &k_divergence<P>,
    &kullback_leibler<P>,
    &topsoe<P>,
    &max_symmetric_chi_squared<P>,
    &min_symmetric_chi_squared<P>,
    &vicis_symmetric_1<P>,
    &vicis_symmetric_2<P>,
    &vicis_symmetric_3<P>,
    &vicis_wave_hedges<P>,
    &hamming<P>,
    &hassanat<P>,
    &statistic<P>,
};

}  // namespace

KernelFn reference_kernel(DistanceId id, DomainPolicy policy) {
  const auto slot = static_cast<std::size_t>(code(id) - 1);
  return policy == DomainPolicy::Strict ? kTable<DomainPolicy::Strict>[slot] : kTable<DomainPolicy::Lenient>[slot];
}

}  // namespace opf::kernels
