#pragma once

#include <utility>
#include <vector>

#include "holos/core.hpp"

namespace holos {

struct PhysicalConstants {
  double f0 = 0;       // carrier frequency [Hz]
  double lambda = 0;   // wavelength [m]
  double kappa0 = 0;   // wavenumber 2*pi/lambda [rad/m]
  double eta = kFreeSpaceImpedance;  // wave impedance [ohm]

  static PhysicalConstants from_frequency(double f0_hz);
};

// Two rectangular surfaces: the transmitter spans [-u_tx,u_tx]x[-v_tx,v_tx] in
// the y=0 plane with its center at the origin; the receiver is centered at
// c_o, rotated by alpha in the xy-plane and tilted by beta about the z-axis.
struct Deployment {
  Vec3 c_o;                       // receiver center offset [m]
  double alpha = 0, beta = 0;     // rotation / tilt [rad]
  double u_tx = 0, v_tx = 0;      // transmit half side lengths [m]
  double u_rx = 0, v_rx = 0;      // receive half side lengths [m]
  Axis pol_i = Axis::X;           // driven current component
  Axis pol_o = Axis::X;           // observed field component
  PhysicalConstants k;

  double area_tx() const { return 4.0 * u_tx * v_tx; }
  double area_rx() const { return 4.0 * u_rx * v_rx; }
};

// Validates invariants (positive sides, center outside the reactive region).
Deployment make_deployment(const PhysicalConstants& k, const Vec3& c_o, double alpha, double beta,
                           double u_tx, double v_tx, double u_rx, double v_rx,
                           Axis pol_i = Axis::X, Axis pol_o = Axis::X);

// Center offset from (distance, elevation theta, azimuth phi):
//   x = d sin(phi) cos(theta), y = d cos(phi) cos(theta), z = d sin(theta).
Vec3 center_from_spherical(double distance, double theta, double phi);

struct SubHolos {
  int index = 0;
  Vec3 center;            // c_o^n, offset from the transmit center [m]
  double u = 0, v = 0;    // half side lengths [m]

  double area() const { return 4.0 * u * v; }
};

struct Partition {
  std::vector<SubHolos> subs;
  int n_u = 1, n_v = 1;
};

// Pose coefficients of the shift-invariant sub-surface kernel.
struct Tau {
  double t11 = 0, t12 = 0, t21 = 0, t22 = 0;  // dimensionless
  double t1 = 0, t2 = 0;                      // [1/m]
  double u_o = 0, v_o = 0;                    // 2U^n/(lambda |c^n|), 2V^n/(lambda |c^n|) [1/m]
  double upsilon = 0;                         // t11 t22 - t12 t21
};

struct SurfaceGrid {
  std::vector<Vec3> points;     // sample positions [m]
  std::vector<Uv> local;        // local (u,v) per point [m]
  std::vector<double> weights;  // midpoint-rule cell areas [m^2]
  int n_u = 0, n_v = 0;

  std::size_t size() const { return points.size(); }
  double area() const;
};

// Rotation/tilt map applied to local receive coordinates (unit columns).
Vec3 rx_local_to_offset(const Deployment& dep, const Uv& local);
// Inverse of the map above (the columns are orthonormal).
Uv rx_offset_to_local(const Deployment& dep, const Vec3& offset);

SurfaceGrid parametrize_tx(const Deployment& dep, int n_u, int n_v);
SurfaceGrid parametrize_rx(const Deployment& dep, const SubHolos& sub, int n_u, int n_v);

// Whole receive surface as a single (degenerate) sub-surface.
SubHolos full_rx_sub(const Deployment& dep);

// Equal tiling of the receive rectangle into n_u x n_v sub-surfaces; centers
// are mapped through the pose map.
Partition partition_rx(const Deployment& dep, int n_u, int n_v);

// Tile index of a local receive coordinate under the partition's tiling.
int tile_index(const Partition& part, const Deployment& dep, const Uv& local);

Tau tau_coefficients(const Deployment& dep, const SubHolos& sub);

// Closed-form expansion of upsilon used as a cross-check of the tau algebra:
// (y^2 cos a cos b - y z sin b - x y sin a cos b)/|c|^2.
double upsilon_explicit(const Vec3& c, double alpha, double beta);

// Angles maximizing |upsilon| for a given center offset, principal branch.
std::pair<double, double> optimal_orientation(const Vec3& c_o);

// Margins of the "much greater" chain  sqrt(N_eDoF) >> |c|/lambda >> U_max/lambda.
struct ValidityReport {
  int sub_index = -1;  // -1: whole surface
  double edof_sqrt = 0, distance_over_lambda = 0, size_over_lambda = 0;
  double ratio_left = 0;   // (left term)/(middle term) = sqrt(eDoF)
  double ratio_right = 0;  // (middle term)/(right term) = |c|/U_max
  bool flagged = false;    // any ratio below the threshold (4)
};

ValidityReport validity_paraxial(const Deployment& dep);
std::vector<ValidityReport> validity_nonparaxial(const Deployment& dep, const Partition& part);

}  // namespace holos
