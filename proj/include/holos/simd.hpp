#pragma once

#include <cstddef>

#include "holos/core.hpp"

// Batch evaluation of the arithmetic inner loops (free-space kernel samples and
// shifted-sinc kernel sums). A scalar reference implementation always exists;
// an AVX2+FMA variant is selected at runtime when the CPU supports it. The two
// are equivalence-tested against each other.

namespace holos::simd {

enum class Backend { Scalar, Avx2 };

bool avx2_supported();
Backend active_backend();
// Overrides the dispatch (used by the equivalence tests). Requesting Avx2 on a
// machine without it throws.
void set_backend(Backend b);
void reset_backend();  // back to auto-detection

// g(r) = eta * e / (2 lambda |r|) * exp(j(pi/2 - kappa0 |r|)),
// e = kron - r[ci] r[co] / |r|^2, over arrays of displacement components.
struct ExactKernelParams {
  double kappa0 = 0;  // [rad/m]
  double amp0 = 0;    // eta/(2 lambda)
  double kron = 0;    // 1 if the polarization axes coincide
  int ci = 0, co = 0; // displacement components picked by the polarization pair
};

void kernel_exact_batch(const double* dx, const double* dy, const double* dz, std::size_t n,
                        const ExactKernelParams& p, cplx* out);

// One sub-surface term of the shift-invariant kernel sum:
//   amp * sinc(au du + av dv) * sinc(bu du + bv dv) * exp(-j(ku du + kv dv)).
struct SincTerm {
  double amp = 0;
  double au = 0, av = 0;
  double bu = 0, bv = 0;
  double ku = 0, kv = 0;
};

void gbar_sum_batch(const double* du, const double* dv, std::size_t n,
                    const SincTerm* terms, std::size_t n_terms, cplx* out);

namespace detail {
struct Ops {
  void (*kernel_exact)(const double*, const double*, const double*, std::size_t,
                       const ExactKernelParams&, cplx*);
  void (*gbar_sum)(const double*, const double*, std::size_t, const SincTerm*, std::size_t, cplx*);
};
extern const Ops scalar_ops;
extern const Ops avx2_ops;  // null members when built without AVX2 support
}  // namespace detail

}  // namespace holos::simd
