// Optimized backend: same formulas as the reference backend, evaluated in a
// single fused pass over fixed-width Eigen blocks. Each running sum keeps one
// accumulator per lane, so the inner loop has no serial dependency and the
// block arithmetic maps onto SIMD packets. Leftovers run through the same
// body with narrower blocks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <Eigen/Core>

#include "kernel_guards.hpp"

namespace opf::kernels {
namespace {

using std::size_t;

constexpr int kLanes = 32;
constexpr int kShortLanes = 8;

template <int L>
using Block = Eigen::Array<double, L, 1>;
template <int L>
using BlockMap = Eigen::Map<const Block<L>>;

template <int L, int Sums>
struct Accumulators {
  std::array<Block<L>, Sums> acc;
  Accumulators() {
    for (auto& a : acc) a.setZero();
  }
};

// Wide blocks first, then at most three short blocks, then single elements.
template <int Sums, typename Body>
std::array<double, Sums> fused_sums(const double* x, const double* y, size_t n, Body&& body) {
  Accumulators<kLanes, Sums> wide;
  size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) body(BlockMap<kLanes>(x + i), BlockMap<kLanes>(y + i), wide.acc);

  Accumulators<kShortLanes, Sums> narrow;
  for (; i + kShortLanes <= n; i += kShortLanes) {
    body(BlockMap<kShortLanes>(x + i), BlockMap<kShortLanes>(y + i), narrow.acc);
  }

  Accumulators<1, Sums> tail;
  for (; i < n; ++i) body(BlockMap<1>(x + i), BlockMap<1>(y + i), tail.acc);

  std::array<double, Sums> out{};
  for (int k = 0; k < Sums; ++k) out[k] = wide.acc[k].sum() + narrow.acc[k].sum() + tail.acc[k](0);
  return out;
}

template <typename Body>
double fused_sum(const double* x, const double* y, size_t n, Body&& body) {
  return fused_sums<1>(x, y, n, body)[0];
}

// Block versions of the scalar guards.
template <DomainPolicy P, typename E>
typename E::PlainObject den_v(const Eigen::ArrayBase<E>& d) {
  typename E::PlainObject v = d;
  const auto small = v.abs() < kEpsilon;
  if constexpr (P == DomainPolicy::Strict) {
    if (small.any()) throw DomainError("denominator below epsilon");
    return v;
  } else {
    return small.select(kEpsilon, v);
  }
}

template <DomainPolicy P, typename E>
typename E::PlainObject log_arg_v(const Eigen::ArrayBase<E>& a) {
  typename E::PlainObject v = a;
  const auto small = v < kEpsilon;
  if constexpr (P == DomainPolicy::Strict) {
    if (small.any()) throw DomainError("logarithm argument below epsilon");
    return v;
  } else {
    return small.select(kEpsilon, v);
  }
}

template <DomainPolicy P, typename A, typename B>
auto k_term_v(const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b) {
  return (a * log_arg_v<P>(2.0 * a / den_v<P>(a + b)).log()).eval();
}

double sum_sq_diff(const double* x, const double* y, size_t n) {
  return fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) { acc[0] += (xb - yb).square(); });
}

double sum_abs_diff(const double* x, const double* y, size_t n) {
  return fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) { acc[0] += (xb - yb).abs(); });
}

// (x-y)^2 / den(g(x, y)) summed; g maps the two blocks to the denominator.
template <DomainPolicy P, typename G>
double sum_sq_diff_over(const double* x, const double* y, size_t n, G g) {
  return fused_sum(x, y, n, [&](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).square() / den_v<P>(g(xb, yb));
  });
}

// Sums of x*y, x*x and y*y in one pass.
std::array<double, 3> inner_products(const double* x, const double* y, size_t n) {
  return fused_sums<3>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += xb * yb;
    acc[1] += xb.square();
    acc[2] += yb.square();
  });
}

template <DomainPolicy P>
double chebyshev(const double* x, const double* y, size_t n) {
  Block<kLanes> m = Block<kLanes>::Zero();
  size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) m = m.max((BlockMap<kLanes>(x + i) - BlockMap<kLanes>(y + i)).abs());
  double best = m.maxCoeff();
  for (; i < n; ++i) best = std::max(best, std::abs(x[i] - y[i]));
  return finish(best);
}

template <DomainPolicy P>
double chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a + b; }));
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
  const auto s = fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).abs();
    acc[1] += xb + yb;
  });
  return finish(s[0] / den<P>(s[1]));
}

template <DomainPolicy P>
double canberra(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).abs() / den_v<P>(xb.abs() + yb.abs());
  }));
}

template <DomainPolicy P>
double gower(const double* x, const double* y, size_t n) {
  return finish(sum_abs_diff(x, y, n) / static_cast<double>(n));
}

template <DomainPolicy P>
double kulczynski(const double* x, const double* y, size_t n) {
  const auto s = fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).abs();
    acc[1] += xb.min(yb);
  });
  return finish(s[0] / den<P>(s[1]));
}

template <DomainPolicy P>
double lorentzian(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (1.0 + (xb - yb).abs()).log();
  }));
}

template <DomainPolicy P>
double non_intersection(const double* x, const double* y, size_t n) {
  return finish(0.5 * sum_abs_diff(x, y, n));
}

template <DomainPolicy P>
double soergel(const double* x, const double* y, size_t n) {
  const auto s = fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).abs();
    acc[1] += xb.max(yb);
  });
  return finish(s[0] / den<P>(s[1]));
}

template <DomainPolicy P>
double cosine_similarity(const double* x, const double* y, size_t n) {
  const auto [xy, xx, yy] = inner_products(x, y, n);
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
  const auto [xy, xx, yy] = inner_products(x, y, n);
  return finish(1.0 - 2.0 * xy / den<P>(xx + yy));
}

template <DomainPolicy P>
double jaccard(const double* x, const double* y, size_t n) {
  const auto [xy, xx, yy] = inner_products(x, y, n);
  return finish(1.0 - xy / den<P>(xx + yy - xy));
}

template <DomainPolicy P>
double bhattacharyya(const double* x, const double* y, size_t n) {
  const double s = fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb * yb).max(0.0).sqrt();
  });
  return finish(-std::log(log_arg<P>(s)));
}

double sum_sq_root_diff(const double* x, const double* y, size_t n) {
  return fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb.max(0.0).sqrt() - yb.max(0.0).sqrt()).square();
  });
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
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).square() * (xb + yb) / den_v<P>(xb * yb);
  }));
}

template <DomainPolicy P>
double average_euclidean(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(sum_sq_diff(x, y, n) / static_cast<double>(n)));
}

template <DomainPolicy P>
double clark(const double* x, const double* y, size_t n) {
  return finish(std::sqrt(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += ((xb - yb).abs() / den_v<P>(xb + yb)).square();
  })));
}

template <DomainPolicy P>
double divergence(const double* x, const double* y, size_t n) {
  return finish(2.0 * sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return (a + b).square(); }));
}

template <DomainPolicy P>
double log_squared_euclidean(const double* x, const double* y, size_t n) {
  return finish(std::log(1.0 + sum_sq_diff(x, y, n)));
}

template <DomainPolicy P>
double mean_censored_euclidean(const double* x, const double* y, size_t n) {
  const auto s = fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).square();
    acc[1] += ((xb + yb) != 0.0).template cast<double>();
  });
  return finish(std::sqrt(s[0] / den<P>(s[1])));
}

template <DomainPolicy P>
double neyman_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto&) { return a; }));
}

template <DomainPolicy P>
double pearson_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto&, const auto& b) { return b; }));
}

template <DomainPolicy P>
double sangvi_chi_squared(const double* x, const double* y, size_t n) {
  return finish(2.0 * sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a + b; }));
}

template <DomainPolicy P>
double squared_chi_squared(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a + b; }));
}

template <DomainPolicy P>
double squared_euclidean(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff(x, y, n));
}

template <DomainPolicy P>
double jeffreys(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb) * (log_arg_v<P>(xb).log() - log_arg_v<P>(yb).log());
  }));
}

template <DomainPolicy P>
double jensen(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    const auto m = ((xb + yb) / 2.0).eval();
    acc[0] += (xb * log_arg_v<P>(xb).log() + yb * log_arg_v<P>(yb).log()) / 2.0 - m * log_arg_v<P>(m).log();
  }));
}

template <DomainPolicy P>
double jensen_shannon(const double* x, const double* y, size_t n) {
  const auto s = fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += k_term_v<P>(xb, yb);
    acc[1] += k_term_v<P>(yb, xb);
  });
  return finish(0.5 * (s[0] + s[1]));
}

template <DomainPolicy P>
double k_divergence(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) { acc[0] += k_term_v<P>(xb, yb); }));
}

template <DomainPolicy P>
double kullback_leibler(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += xb * log_arg_v<P>(xb / den_v<P>(yb)).log();
  }));
}

template <DomainPolicy P>
double topsoe(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += k_term_v<P>(xb, yb) + k_term_v<P>(yb, xb);
  }));
}

template <DomainPolicy P>
std::array<double, 2> chi_squared_pair(const double* x, const double* y, size_t n) {
  return fused_sums<2>(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    const auto d2 = (xb - yb).square().eval();
    acc[0] += d2 / den_v<P>(xb);
    acc[1] += d2 / den_v<P>(yb);
  });
}

template <DomainPolicy P>
double max_symmetric_chi_squared(const double* x, const double* y, size_t n) {
  const auto s = chi_squared_pair<P>(x, y, n);
  return finish(std::max(s[0], s[1]));
}

template <DomainPolicy P>
double min_symmetric_chi_squared(const double* x, const double* y, size_t n) {
  const auto s = chi_squared_pair<P>(x, y, n);
  return finish(std::min(s[0], s[1]));
}

template <DomainPolicy P>
double vicis_symmetric_1(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a.min(b).square(); }));
}

template <DomainPolicy P>
double vicis_symmetric_2(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a.min(b); }));
}

template <DomainPolicy P>
double vicis_symmetric_3(const double* x, const double* y, size_t n) {
  return finish(sum_sq_diff_over<P>(x, y, n, [](const auto& a, const auto& b) { return a.max(b); }));
}

template <DomainPolicy P>
double vicis_wave_hedges(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - yb).abs() / den_v<P>(xb.min(yb));
  }));
}

template <DomainPolicy P>
double hamming(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb != yb).template cast<double>();
  }));
}

template <DomainPolicy P>
double hassanat(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    const auto lo = xb.min(yb).eval();
    const auto hi = xb.max(yb).eval();
    const auto shift = (lo < 0.0).select(lo.abs(), 0.0).eval();
    acc[0] += 1.0 - (1.0 + lo + shift) / (1.0 + hi + shift);
  }));
}

template <DomainPolicy P>
double statistic(const double* x, const double* y, size_t n) {
  return finish(fused_sum(x, y, n, [](const auto& xb, const auto& yb, auto& acc) {
    acc[0] += (xb - (xb + yb) / 2.0).abs();
  }));
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

KernelFn optimized_kernel(DistanceId id, DomainPolicy policy) {
  const auto slot = static_cast<std::size_t>(code(id) - 1);
  return policy == DomainPolicy::Strict ? kTable<DomainPolicy::Strict>[slot] : kTable<DomainPolicy::Lenient>[slot];
}

}  // namespace opf::kernels
