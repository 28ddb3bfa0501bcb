#include "holos/kernel.hpp"

#include <atomic>
#include <cmath>

namespace holos {

namespace {

std::atomic<long> g_reactive_warnings{0};

inline double sinc(double x) {
  double px = kPi * x;
  if (std::abs(px) < 1e-8) return 1.0 - px * px / 6.0;
  return std::sin(px) / px;
}

inline double axis_component(const Vec3& r, Axis a) { return r[static_cast<int>(a)]; }

}  // namespace

long reactive_warning_count() { return g_reactive_warnings.load(); }
void reset_reactive_warnings() { g_reactive_warnings.store(0); }

cplx green_scalar(const Vec3& r, const PhysicalConstants& k) {
  double d = r.norm();
  if (!(d > 0)) throw SingularGeometryError("green function evaluated at zero distance");
  if (d < 3.0 * k.lambda) g_reactive_warnings.fetch_add(1, std::memory_order_relaxed);
  return std::polar(k.eta / (2.0 * k.lambda * d), 0.5 * kPi - k.kappa0 * d);
}

double coupling_factor(const Vec3& r_tx, const Vec3& r_rx, Axis pol_i, Axis pol_o) {
  Vec3 r = r_rx - r_tx;
  double n2 = r.norm2();
  if (!(n2 > 0)) throw SingularGeometryError("coupling factor at coincident points");
  double kron = pol_i == pol_o ? 1.0 : 0.0;
  return kron - axis_component(r, pol_i) * axis_component(r, pol_o) / n2;
}

cplx kernel_exact(const Vec3& r_tx, const Vec3& r_rx, Axis pol_i, Axis pol_o,
                  const PhysicalConstants& k) {
  return green_scalar(r_rx - r_tx, k) * coupling_factor(r_tx, r_rx, pol_i, pol_o);
}

double distance_quartic(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  Vec3 delta = rx_local_to_offset(dep, rx) - Vec3{tx.u, 0.0, tx.v};
  const Vec3& c = sub.center;
  double d2 = c.norm2();
  double rho_lin = 2.0 * c.dot(delta);
  double rho = rho_lin + delta.norm2();
  return std::sqrt(d2) * (1.0 + rho / (2.0 * d2) - rho_lin * rho_lin / (8.0 * d2 * d2));
}

cplx focusing_tx(const Uv& tx, const SubHolos& sub, const Deployment& dep) {
  const Vec3& c = sub.center;
  double d = c.norm();
  double s = c.x * tx.u + c.z * tx.v;
  double q2 = tx.u * tx.u + tx.v * tx.v;
  return std::polar(1.0, dep.k.kappa0 / (2.0 * d) * (q2 - 2.0 * s - s * s / (d * d)));
}

cplx focusing_rx(const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  const Vec3& c = sub.center;
  double d = c.norm();
  double s = c.dot(rx_local_to_offset(dep, rx));
  double q2 = rx.u * rx.u + rx.v * rx.v;  // the pose map is an isometry
  return std::polar(1.0, -dep.k.kappa0 / (2.0 * d) * (q2 + 2.0 * s - s * s / (d * d)));
}

cplx coupling_phase_p(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  const Vec3& c = sub.center;
  double d = c.norm();
  Vec3 dr = rx_local_to_offset(dep, rx);
  double cross = dr.x * tx.u + dr.z * tx.v;
  double si = c.x * tx.u + c.z * tx.v;
  double so = c.dot(dr);
  return std::polar(1.0, dep.k.kappa0 / d * (cross - si * so / (d * d)));
}

cplx fbar_tx(const Uv& tx, const Deployment& dep) {
  const Vec3& c = dep.c_o;
  double d = c.norm();
  double s = c.x * tx.u + c.z * tx.v;
  double q2 = tx.u * tx.u + tx.v * tx.v;
  return std::polar(1.0, dep.k.kappa0 / (2.0 * d) * (q2 - s * s / (d * d)));
}

cplx gbar_center(const SubHolos& sub, const Deployment& dep) {
  double d = sub.center.norm();
  double e = coupling_factor(Vec3{0, 0, 0}, sub.center, dep.pol_i, dep.pol_o);
  return cplx(0.0, dep.k.eta * e / (2.0 * dep.k.lambda * d));
}

cplx kernel_quartic(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  double d = sub.center.norm();
  return gbar_center(sub, dep) * std::polar(1.0, -dep.k.kappa0 * d) * focusing_rx(rx, sub, dep) *
         coupling_phase_p(tx, rx, sub, dep) * std::conj(focusing_tx(tx, sub, dep));
}

double gbar_sub(double du, double dv, const SubHolos& sub, const Deployment& dep) {
  Tau t = tau_coefficients(dep, sub);
  double a2 = std::norm(gbar_center(sub, dep));
  return a2 * sub.area() * sinc(t.u_o * (t.t11 * du + t.t12 * dv)) *
         sinc(t.v_o * (t.t21 * du + t.t22 * dv));
}

WavenumberShift wavenumber_shift(const SubHolos& sub, const PhysicalConstants& k) {
  double d = sub.center.norm();
  return {k.kappa0 * sub.center.x / d, k.kappa0 * sub.center.z / d};
}

std::vector<simd::SincTerm> sinc_terms(const Deployment& dep, const Partition& part) {
  std::vector<simd::SincTerm> terms;
  terms.reserve(part.subs.size());
  for (const SubHolos& sub : part.subs) {
    Tau t = tau_coefficients(dep, sub);
    WavenumberShift sh = wavenumber_shift(sub, dep.k);
    simd::SincTerm st;
    st.amp = std::norm(gbar_center(sub, dep)) * sub.area();
    st.au = t.u_o * t.t11;
    st.av = t.u_o * t.t12;
    st.bu = t.v_o * t.t21;
    st.bv = t.v_o * t.t22;
    st.ku = sh.dk_u;
    st.kv = sh.dk_v;
    terms.push_back(st);
  }
  return terms;
}

cplx gbar_nonparax(double du, double dv, const Partition& part, const Deployment& dep) {
  auto terms = sinc_terms(dep, part);
  cplx out;
  simd::gbar_sum_batch(&du, &dv, 1, terms.data(), terms.size(), &out);
  return out;
}

FocusingMismatch focusing_mismatch(const Uv& tx, const SubHolos& sub, const Deployment& dep) {
  double k0 = dep.k.kappa0;
  const Vec3& cn = sub.center;
  const Vec3& co = dep.c_o;
  double dn = cn.norm(), dfull = co.norm();
  double sn = cn.x * tx.u + cn.z * tx.v;
  double so = co.x * tx.u + co.z * tx.v;
  double q2 = tx.u * tx.u + tx.v * tx.v;
  FocusingMismatch m;
  m.linear = -k0 * sn / dn;
  m.curvature = k0 * ((q2 - sn * sn / (dn * dn)) / (2.0 * dn) -
                      (q2 - so * so / (dfull * dfull)) / (2.0 * dfull));
  return m;
}

}  // namespace holos
