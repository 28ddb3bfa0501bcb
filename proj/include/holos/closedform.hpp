#pragma once

#include <array>
#include <vector>

#include "holos/geometry.hpp"
#include "holos/kernel.hpp"

namespace holos {

// Parallelogram support of a sub-surface kernel in the (ku, kv) wavenumber
// plane, centered on the sub-surface shift.
struct WavenumberSupport {
  WavenumberShift shift;
  Tau tau;
  double hw_u = 0, hw_v = 0;  // U^n kappa0/|c^n|, V^n kappa0/|c^n| [rad/m]

  // corner k = shift + M (+-hw_u, +-hw_v), M = [[t11, t21], [t12, t22]]
  std::array<std::array<double, 2>, 4> corners() const;
  double measure_formula() const;  // 4 pi^2 A^n |ups| / (lambda^2 |c^n|^2)
  double measure_polygon() const;  // shoelace area of the corner polygon
};

struct PerSubEdof {
  int index = 0;
  double edof = 0;      // A_Tx A^n |ups^n| / (lambda^2 |c^n|^2)
  double op_norm = 0;
  bool included = true;  // meets the accuracy level
  bool degenerate = false;  // ups^n == 0, excluded
};

struct EdofReport {
  double value = 0;   // raw sum before the max{1,.} floor
  long floored = 1;   // max(1, value rounded half-to-even)
  bool degenerate_warning = false;
  std::vector<PerSubEdof> per_sub;
};

double op_norm_paraxial(const Deployment& dep);
double op_norm_sub(const Deployment& dep, const SubHolos& sub);
double op_norm_nonparax(const Deployment& dep, const Partition& part);

WavenumberSupport support_paraxial(const Deployment& dep);
std::vector<WavenumberSupport> supports_nonparax(const Deployment& dep, const Partition& part);

// Spatial bandwidth m_G of the paraxial kernel.
double bandwidth_paraxial(const Deployment& dep);

// Exact area of the intersection of two supports (convex polygon clipping).
double support_overlap(const WavenumberSupport& s1, const WavenumberSupport& s2);

EdofReport edof_paraxial(const Deployment& dep);

// gamma_norm in (0, 1]: fraction of the partitioned-operator norm. Values
// above the norm leave the inclusion set empty (floored to 1 with a warning).
double bandwidth_gamma(const Deployment& dep, const Partition& part, double gamma_norm);
EdofReport edof_nonparax(const Deployment& dep, const Partition& part, double gamma_norm);

// Per-sub closed form of the wavevector integral estimate, summed with no
// accuracy filtering; defined for the axis-aligned pose only.
double edof_cutset(const Deployment& dep, const Partition& part);

}  // namespace holos
