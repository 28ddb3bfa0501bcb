#pragma once

#include <vector>

#include "holos/geometry.hpp"
#include "holos/linalg.hpp"
#include "holos/spectrum.hpp"

namespace holos {

// Discrete 1-D concentration basis on [-half_length, half_length]: eigenpairs
// of the sinc kernel sin(omega(u-u'))/(pi(u-u')) with omega = p/half_length,
// computed on midpoint nodes. Concentrations lie in (0,1); roughly 2p/pi of
// them sit near one.
struct PswfBasis {
  double half_length = 0;
  double p = 0;             // time-bandwidth parameter omega*half_length
  std::vector<double> nodes;
  double node_weight = 0;   // uniform midpoint weight
  std::vector<std::vector<double>> functions;  // orthonormal under the weight
  std::vector<double> concentrations;          // descending, clamped to [0,1]
  bool truncated = false;   // tail values at numerical noise level
};

PswfBasis pswf_basis(double half_length, double p, int count, int n_nodes);

enum class FocusingKind { ParaxialSub, NonparaxialGlobal };

struct Waveform {
  std::vector<cplx> samples;  // unit norm under the transmit quadrature
  double eigenvalue = 0;
  int sub_index = 0;
  int m_u = 0, m_v = 0;
};

struct WaveformSet {
  SurfaceGrid tx;
  std::vector<Waveform> modes;  // descending eigenvalue
  FocusingKind focusing = FocusingKind::ParaxialSub;
  SubHolos focus_sub;           // reference sub for the paraxial focusing factor
};

// Separable closed-form eigenfunctions (valid when t12 = t21 = 0); count modes
// sampled on the n_u x n_v transmit grid. per_axis 1-D functions are built per
// axis (0 picks enough to cover the plateau).
WaveformSet eigenfunctions_paraxial(const Deployment& dep, int n_u, int n_v, int count,
                                    int per_axis = 0);

// Per-sub separable eigenfunctions carried to their wavenumber shift; modes
// from all subs merged and ordered by eigenvalue.
WaveformSet eigenfunctions_nonparax(const Deployment& dep, const Partition& part, int n_u, int n_v,
                                    int count, int per_axis = 0);

// Received fields: quadrature of the exact kernel against each waveform, with
// the focusing factor reattached (the stored samples alone are not the
// physical current).
std::vector<std::vector<cplx>> propagate(const WaveformSet& wset, const SurfaceGrid& rx_grid,
                                         const Deployment& dep);

// Gram matrix of received fields under the receive quadrature.
struct CouplingMatrix {
  int n = 0;
  std::vector<cplx> gram;  // col-major n x n, Hermitian nonnegative
  cplx at(int i, int j) const { return gram[std::size_t(j) * n + i]; }
  double normalized_abs(int i, int j) const;
};

CouplingMatrix coupling_matrix(const std::vector<std::vector<cplx>>& fields,
                               const SurfaceGrid& rx_grid);

// |E|^2 per receive node, one vector per waveform.
std::vector<std::vector<double>> field_intensity_map(const std::vector<std::vector<cplx>>& fields);

// Fraction of received energy falling inside one tile of the partition.
double localization_fraction(const std::vector<cplx>& field, const SurfaceGrid& rx_full,
                             const Partition& part, const Deployment& dep, int sub_index);

}  // namespace holos
