#include <atomic>

#include "holos/simd.hpp"

namespace holos::simd {

namespace detail {
#ifndef HOLOS_HAVE_AVX2
const Ops avx2_ops = {nullptr, nullptr};
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#ifdef HOLOS_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<int> g_override{-1};  // -1: auto

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

const detail::Ops& ops() {
  int ov = g_override.load(std::memory_order_relaxed);
  Backend b = ov < 0 ? detect() : static_cast<Backend>(ov);
  return b == Backend::Avx2 ? detail::avx2_ops : detail::scalar_ops;
}

}  // namespace

bool avx2_supported() { return cpu_has_avx2(); }

Backend active_backend() {
  int ov = g_override.load(std::memory_order_relaxed);
  return ov < 0 ? detect() : static_cast<Backend>(ov);
}

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !cpu_has_avx2())
    throw std::invalid_argument("AVX2 backend requested but not supported on this CPU");
  g_override.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_override.store(-1, std::memory_order_relaxed); }

void kernel_exact_batch(const double* dx, const double* dy, const double* dz, std::size_t n,
                        const ExactKernelParams& p, cplx* out) {
  ops().kernel_exact(dx, dy, dz, n, p, out);
}

void gbar_sum_batch(const double* du, const double* dv, std::size_t n, const SincTerm* terms,
                    std::size_t n_terms, cplx* out) {
  ops().gbar_sum(du, dv, n, terms, n_terms, out);
}

}  // namespace holos::simd
