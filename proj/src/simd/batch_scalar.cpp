#include <cmath>

#include "holos/simd.hpp"

namespace holos::simd {
namespace {

inline double sinc(double x) {
  double px = kPi * x;
  if (std::abs(px) < 1e-8) return 1.0 - px * px / 6.0;
  return std::sin(px) / px;
}

void kernel_exact_scalar(const double* dx, const double* dy, const double* dz, std::size_t n,
                         const ExactKernelParams& p, cplx* out) {
  const double* comp[3] = {dx, dy, dz};
  const double* ci = comp[p.ci];
  const double* co = comp[p.co];
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = dx[i] * dx[i] + dy[i] * dy[i] + dz[i] * dz[i];
    double r = std::sqrt(r2);
    double e = p.kron - ci[i] * co[i] / r2;
    double amp = p.amp0 * e / r;
    double ang = 0.5 * kPi - p.kappa0 * r;
    out[i] = cplx(amp * std::cos(ang), amp * std::sin(ang));
  }
}

void gbar_sum_scalar(const double* du, const double* dv, std::size_t n, const SincTerm* terms,
                     std::size_t n_terms, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = 0;
    for (std::size_t t = 0; t < n_terms; ++t) {
      const SincTerm& s = terms[t];
      double g = s.amp * sinc(s.au * du[i] + s.av * dv[i]) * sinc(s.bu * du[i] + s.bv * dv[i]);
      double ph = -(s.ku * du[i] + s.kv * dv[i]);
      acc += cplx(g * std::cos(ph), g * std::sin(ph));
    }
    out[i] = acc;
  }
}

}  // namespace

namespace detail {
const Ops scalar_ops = {&kernel_exact_scalar, &gbar_sum_scalar};
}

}  // namespace holos::simd
