#include "holos/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace holos {

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

Axis axis_from_name(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw std::invalid_argument("axis must be one of x, y, z: got '" + s + "'");
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  unsigned nthreads = std::min<std::size_t>(hw, (n + 4095) / 4096);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (unsigned t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

PhysicalConstants PhysicalConstants::from_frequency(double f0_hz) {
  if (!(f0_hz > 0)) throw std::invalid_argument("carrier frequency must be positive");
  PhysicalConstants k;
  k.f0 = f0_hz;
  k.lambda = kSpeedOfLight / f0_hz;
  k.kappa0 = 2.0 * kPi / k.lambda;
  k.eta = kFreeSpaceImpedance;
  return k;
}

Deployment make_deployment(const PhysicalConstants& k, const Vec3& c_o, double alpha, double beta,
                           double u_tx, double v_tx, double u_rx, double v_rx,
                           Axis pol_i, Axis pol_o) {
  if (!(u_tx > 0 && v_tx > 0 && u_rx > 0 && v_rx > 0))
    throw std::invalid_argument("surface half-lengths must be positive");
  if (!(k.lambda > 0)) throw std::invalid_argument("constants not initialized");
  double d = c_o.norm();
  if (!(d > 0)) throw std::invalid_argument("receiver center coincides with the transmit center");
  if (d < 3.0 * k.lambda)
    throw std::invalid_argument("receiver center lies in the reactive region (|c_o| < 3 lambda)");
  Deployment dep;
  dep.c_o = c_o;
  dep.alpha = alpha;
  dep.beta = beta;
  dep.u_tx = u_tx;
  dep.v_tx = v_tx;
  dep.u_rx = u_rx;
  dep.v_rx = v_rx;
  dep.pol_i = pol_i;
  dep.pol_o = pol_o;
  dep.k = k;
  return dep;
}

Vec3 center_from_spherical(double distance, double theta, double phi) {
  return {distance * std::sin(phi) * std::cos(theta),
          distance * std::cos(phi) * std::cos(theta),
          distance * std::sin(theta)};
}

double SurfaceGrid::area() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

Vec3 rx_local_to_offset(const Deployment& dep, const Uv& q) {
  double ca = std::cos(dep.alpha), sa = std::sin(dep.alpha);
  double cb = std::cos(dep.beta), sb = std::sin(dep.beta);
  return {q.u * ca - q.v * sb * sa, q.v * sb * ca + q.u * sa, q.v * cb};
}

Uv rx_offset_to_local(const Deployment& dep, const Vec3& r) {
  double ca = std::cos(dep.alpha), sa = std::sin(dep.alpha);
  double cb = std::cos(dep.beta), sb = std::sin(dep.beta);
  // columns of the map are orthonormal, so the inverse is the transpose
  return {r.x * ca + r.y * sa, -r.x * sb * sa + r.y * sb * ca + r.z * cb};
}

namespace {

SurfaceGrid midpoint_grid(double half_u, double half_v, int n_u, int n_v) {
  if (n_u < 1 || n_v < 1) throw std::invalid_argument("grid counts must be positive");
  SurfaceGrid g;
  g.n_u = n_u;
  g.n_v = n_v;
  double du = 2.0 * half_u / n_u, dv = 2.0 * half_v / n_v;
  g.local.reserve(std::size_t(n_u) * n_v);
  g.weights.assign(std::size_t(n_u) * n_v, du * dv);
  for (int i = 0; i < n_u; ++i) {
    double u = -half_u + du * (i + 0.5);
    for (int j = 0; j < n_v; ++j) {
      double v = -half_v + dv * (j + 0.5);
      g.local.push_back({u, v});
    }
  }
  return g;
}

}  // namespace

SurfaceGrid parametrize_tx(const Deployment& dep, int n_u, int n_v) {
  if (n_u < 2 || n_v < 2) throw std::invalid_argument("transmit grid needs at least 2 points per axis");
  SurfaceGrid g = midpoint_grid(dep.u_tx, dep.v_tx, n_u, n_v);
  g.points.reserve(g.local.size());
  for (const Uv& q : g.local) g.points.push_back({q.u, 0.0, q.v});
  return g;
}

SurfaceGrid parametrize_rx(const Deployment& dep, const SubHolos& sub, int n_u, int n_v) {
  if (n_u < 2 || n_v < 2) throw std::invalid_argument("receive grid needs at least 2 points per axis");
  SurfaceGrid g = midpoint_grid(sub.u, sub.v, n_u, n_v);
  g.points.reserve(g.local.size());
  for (const Uv& q : g.local) g.points.push_back(rx_local_to_offset(dep, q) + sub.center);
  return g;
}

SubHolos full_rx_sub(const Deployment& dep) { return SubHolos{0, dep.c_o, dep.u_rx, dep.v_rx}; }

Partition partition_rx(const Deployment& dep, int n_u, int n_v) {
  if (n_u < 1 || n_v < 1) throw std::invalid_argument("partition counts must be positive");
  Partition part;
  part.n_u = n_u;
  part.n_v = n_v;
  double su = dep.u_rx / n_u, sv = dep.v_rx / n_v;
  part.subs.reserve(std::size_t(n_u) * n_v);
  int idx = 0;
  for (int i = 0; i < n_u; ++i) {
    double uc = -dep.u_rx + su * (2 * i + 1);
    for (int j = 0; j < n_v; ++j) {
      double vc = -dep.v_rx + sv * (2 * j + 1);
      part.subs.push_back({idx++, rx_local_to_offset(dep, {uc, vc}) + dep.c_o, su, sv});
    }
  }
  return part;
}

int tile_index(const Partition& part, const Deployment& dep, const Uv& local) {
  double su = 2.0 * dep.u_rx / part.n_u, sv = 2.0 * dep.v_rx / part.n_v;
  int i = std::clamp(int((local.u + dep.u_rx) / su), 0, part.n_u - 1);
  int j = std::clamp(int((local.v + dep.v_rx) / sv), 0, part.n_v - 1);
  return i * part.n_v + j;
}

Tau tau_coefficients(const Deployment& dep, const SubHolos& sub) {
  const Vec3& c = sub.center;
  double n2 = c.norm2();
  if (!(n2 > 0)) throw SingularGeometryError("sub-surface center coincides with the transmit center");
  double ca = std::cos(dep.alpha), sa = std::sin(dep.alpha);
  double cb = std::cos(dep.beta), sb = std::sin(dep.beta);
  Tau t;
  t.t1 = (c.x * ca + c.y * sa) / n2;
  t.t2 = (-c.x * sb * sa + c.y * sb * ca + c.z * cb) / n2;
  t.t11 = ca - c.x * t.t1;
  t.t12 = -c.z * t.t1;
  t.t21 = -sb * sa - c.x * t.t2;
  t.t22 = cb - c.z * t.t2;
  double d = std::sqrt(n2);
  t.u_o = 2.0 * sub.u / (dep.k.lambda * d);
  t.v_o = 2.0 * sub.v / (dep.k.lambda * d);
  t.upsilon = t.t11 * t.t22 - t.t12 * t.t21;
  return t;
}

double upsilon_explicit(const Vec3& c, double alpha, double beta) {
  double ca = std::cos(alpha), sa = std::sin(alpha);
  double cb = std::cos(beta), sb = std::sin(beta);
  return (c.y * c.y * ca * cb - c.y * c.z * sb - c.x * c.y * sa * cb) / c.norm2();
}

std::pair<double, double> optimal_orientation(const Vec3& c_o) {
  if (c_o.y == 0.0)
    throw SingularGeometryError("y_o = 0: upsilon vanishes identically, orientation undefined");
  // upsilon*|c|^2 = A(alpha) cos(beta) + B sin(beta),
  //   A = y (y cos a - x sin a) = y sqrt(x^2+y^2) cos(a + psi),  B = -y z.
  // |upsilon| is maximized by making A positive and as large as possible.
  double psi = std::atan2(c_o.x, c_o.y);
  double alpha = c_o.y > 0 ? -psi : kPi - psi;
  if (alpha > kPi) alpha -= 2.0 * kPi;
  double a_max = std::abs(c_o.y) * std::hypot(c_o.x, c_o.y);
  double beta = std::atan2(-c_o.y * c_o.z, a_max);
  return {alpha, beta};
}

namespace {

constexpr double kAsymptoticRatio = 4.0;  // concrete proxy for ">>"

ValidityReport validity_for(const Deployment& dep, const SubHolos& sub, int index) {
  Tau t = tau_coefficients(dep, sub);
  double lam = dep.k.lambda;
  double d = sub.center.norm();
  double edof = dep.area_tx() * sub.area() * std::abs(t.upsilon) / (lam * lam * d * d);
  double umax = std::max({2.0 * dep.u_tx, 2.0 * dep.v_tx, 2.0 * sub.u, 2.0 * sub.v});
  ValidityReport r;
  r.sub_index = index;
  // left term of the chain: sqrt(A_Tx A_Rx |ups|)/lambda^2 = sqrt(edof) * d/lambda
  r.edof_sqrt = std::sqrt(std::max(edof, 0.0));
  r.distance_over_lambda = d / lam;
  r.size_over_lambda = umax / lam;
  r.ratio_left = r.edof_sqrt;  // (left term)/(middle term)
  r.ratio_right = r.distance_over_lambda / r.size_over_lambda;
  // tiny slack so that configurations sitting exactly on the threshold are
  // not flagged by rounding
  double thr = kAsymptoticRatio * (1.0 - 1e-9);
  r.flagged = r.ratio_left < thr || r.ratio_right < thr;
  return r;
}

}  // namespace

ValidityReport validity_paraxial(const Deployment& dep) {
  return validity_for(dep, full_rx_sub(dep), -1);
}

std::vector<ValidityReport> validity_nonparaxial(const Deployment& dep, const Partition& part) {
  std::vector<ValidityReport> out;
  out.reserve(part.subs.size());
  for (const SubHolos& s : part.subs) out.push_back(validity_for(dep, s, s.index));
  return out;
}

}  // namespace holos
