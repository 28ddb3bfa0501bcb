#pragma once

#include <functional>
#include <vector>

#include "holos/geometry.hpp"
#include "holos/linalg.hpp"

namespace holos {

inline constexpr int kDefaultMatrixCap = 6000;
inline constexpr double kDefaultHermitianTol = 1e-10;

// Quadrature-discretized self-adjoint operator on a surface grid; weights are
// absorbed symmetrically (entry = sqrt(w_a) K(a,b) sqrt(w_b)) so matrix
// eigenvalues approximate operator eigenvalues directly.
struct HermitianKernel {
  la::Matrix m;
  std::vector<double> weights;
  double trace = 0;  // sum of w_a K(a,a)
  double frob2 = 0;  // double integral of |K|^2
};

using KernelFn = std::function<cplx(const Uv&, const Uv&)>;

HermitianKernel assemble_self_adjoint(const KernelFn& fn, const SurfaceGrid& grid,
                                      double herm_tol = kDefaultHermitianTol,
                                      int matrix_cap = kDefaultMatrixCap);

// Fast paths for the shift-invariant kernels: values are precomputed on the
// difference lattice of the regular grid, then scattered into the matrix.
HermitianKernel assemble_gbar_sub(const Deployment& dep, const SubHolos& sub,
                                  const SurfaceGrid& tx_grid, int matrix_cap = kDefaultMatrixCap);
HermitianKernel assemble_nonparax(const Deployment& dep, const Partition& part,
                                  const SurfaceGrid& tx_grid, int matrix_cap = kDefaultMatrixCap);

// Sampled channel operator: entry (a,t) = sqrt(w_a) g_exact(t -> a) sqrt(w_t).
la::Matrix assemble_channel(const SurfaceGrid& tx_grid, const SurfaceGrid& rx_grid,
                            const Deployment& dep, int matrix_cap = kDefaultMatrixCap);

// Quadrature application operator: entry (a,t) = g_exact(t -> a) w_t, mapping
// a sampled surface current to the received field (used for propagation).
la::Matrix assemble_propagator(const SurfaceGrid& tx_grid, const SurfaceGrid& rx_grid,
                               const Deployment& dep);

struct Spectrum {
  std::vector<double> eigs;  // descending, clamped nonnegative
  double trace = 0, frob2 = 0;
  std::vector<double> op_norm_refs;  // reference plateau levels, when known
};

Spectrum eigen_spectrum(const HermitianKernel& h);
Spectrum eigen_spectrum(HermitianKernel&& h);

// Squared singular values of the sampled channel, so they are comparable to
// the self-adjoint eigenvalues.
Spectrum singular_spectrum(const la::Matrix& channel);
Spectrum singular_spectrum(la::Matrix&& channel);

// Number of eigenvalues at or above the absolute accuracy gamma.
int count_edof(const Spectrum& s, double gamma);

// Assignment of each eigenvalue to the nearest reference level (within 10%),
// to the zero plateau (below 10% of the smallest level), or to the transition
// band.
struct PolarizationReport {
  std::vector<double> levels;
  std::vector<int> level_counts;
  int zero_count = 0;
  int transition_count = 0;
  double transition_fraction = 0;
  double min_plateau_value = 0;  // smallest eigenvalue assigned to any level
};

PolarizationReport polarization_profile(const Spectrum& s, std::vector<double> levels);

}  // namespace holos
