#pragma once

#include <vector>

#include "holos/geometry.hpp"
#include "holos/simd.hpp"

namespace holos {

// Scalar free-space coupling between a transmit point and a receive point.
// Radiative approximation only; positions closer than 3 lambda bump a warning
// counter (sweeps may probe the breakdown on purpose), a zero distance throws.
cplx green_scalar(const Vec3& r, const PhysicalConstants& k);

long reactive_warning_count();
void reset_reactive_warnings();

// e_{i,o} = u_i . u_o - (r . u_i)(r . u_o)/|r|^2
double coupling_factor(const Vec3& r_tx, const Vec3& r_rx, Axis pol_i, Axis pol_o);

cplx kernel_exact(const Vec3& r_tx, const Vec3& r_rx, Axis pol_i, Axis pol_o,
                  const PhysicalConstants& k);

// Propagation distance with the fourth-order wavefront expansion: the linear
// term keeps the exact local offset, the squared term keeps only its
// center-offset projection.
double distance_quartic(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep);

// Unit-modulus phase factors of the factored kernel
//   g^n = gbar^n exp(-j kappa0 |c^n|) f_rx p conj(f_tx).
cplx focusing_tx(const Uv& tx, const SubHolos& sub, const Deployment& dep);
cplx focusing_rx(const Uv& rx, const SubHolos& sub, const Deployment& dep);
cplx coupling_phase_p(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep);

// Global focusing phase referenced to the full receive surface center; equals
// focusing_tx of the whole-surface sub with its linear term removed.
cplx fbar_tx(const Uv& tx, const Deployment& dep);

// Center-point amplitude gbar^n = j eta e_{i,o}(0, c^n) / (2 lambda |c^n|).
cplx gbar_center(const SubHolos& sub, const Deployment& dep);

// Factored kernel with the amplitude frozen at the center points.
cplx kernel_quartic(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep);

// Shift-invariant self-adjoint kernel of one receive sub-surface
// (real, even; value at (0,0) is |gbar^n|^2 A^n).
double gbar_sub(double du, double dv, const SubHolos& sub, const Deployment& dep);

struct WavenumberShift {
  double dk_u = 0, dk_v = 0;  // kappa0 x^n/|c^n|, kappa0 z^n/|c^n| [rad/m]
};

WavenumberShift wavenumber_shift(const SubHolos& sub, const PhysicalConstants& k);

// Precomputed per-sub terms for batch evaluation of the partitioned kernel.
std::vector<simd::SincTerm> sinc_terms(const Deployment& dep, const Partition& part);

// Sum of the per-sub kernels, each shifted in the wavenumber domain;
// conjugate-symmetric generator of a Hermitian operator.
cplx gbar_nonparax(double du, double dv, const Partition& part, const Deployment& dep);

// Phase mismatch between the per-sub and the global focusing factor, split
// into its linear (wavenumber shift) and residual curvature parts [rad]:
// focusing_tx^n * conj(fbar_tx) = exp(j(linear + curvature)).
struct FocusingMismatch {
  double linear = 0;
  double curvature = 0;
};
FocusingMismatch focusing_mismatch(const Uv& tx, const SubHolos& sub, const Deployment& dep);

}  // namespace holos
