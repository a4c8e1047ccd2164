#pragma once

// Shared scalar guards for both kernel backends. Internal header.

#include <cmath>

#include "opf/distance.hpp"
#include "opf/errors.hpp"

namespace opf::kernels {

template <DomainPolicy P>
inline double den(double d) {
  if (std::abs(d) < kEpsilon) {
    if constexpr (P == DomainPolicy::Strict) {
      throw DomainError("denominator below epsilon");
    } else {
      return kEpsilon;
    }
  }
  return d;
}

template <DomainPolicy P>
inline double log_arg(double a) {
  if (a < kEpsilon) {
    if constexpr (P == DomainPolicy::Strict) {
      throw DomainError("logarithm argument below epsilon");
    } else {
      return kEpsilon;
    }
  }
  return a;
}

// Rounding can push 2 - 2cos or x*y a hair below zero.
inline double sqrt_arg(double a) { return a < 0.0 ? 0.0 : a; }

inline double finish(double r) {
  if (!std::isfinite(r)) throw DomainError("distance evaluated to a non-finite value");
  return r <= 0.0 ? 0.0 : r;
}

KernelFn reference_kernel(DistanceId id, DomainPolicy policy);
KernelFn optimized_kernel(DistanceId id, DomainPolicy policy);

}  // namespace opf::kernels
