#include "holos/closedform.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

namespace holos {

namespace {

constexpr double kUpsilonTiny = 1e-14;

double shoelace(const std::vector<std::array<double, 2>>& poly) {
  double s = 0;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(s);
}

// Sutherland-Hodgman clip of a convex polygon against the half-plane to the
// left of edge (p, q).
std::vector<std::array<double, 2>> clip_edge(const std::vector<std::array<double, 2>>& poly,
                                             const std::array<double, 2>& p,
                                             const std::array<double, 2>& q) {
  auto side = [&](const std::array<double, 2>& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  std::vector<std::array<double, 2>> out;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    double sa = side(a), sb = side(b);
    if (sa >= 0) out.push_back(a);
    if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) {
      double t = sa / (sa - sb);
      out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  return out;
}

std::vector<std::array<double, 2>> ccw_corners(const WavenumberSupport& s) {
  auto c = s.corners();
  std::vector<std::array<double, 2>> poly(c.begin(), c.end());
  // corners() returns a parallelogram circuit; orient it counterclockwise
  double twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  if (twice < 0) std::reverse(poly.begin(), poly.end());
  return poly;
}

long round_half_even(double v) {
  int save = std::fegetround();
  std::fesetround(FE_TONEAREST);
  long r = std::lrint(v);
  std::fesetround(save);
  return r;
}

}  // namespace

std::array<std::array<double, 2>, 4> WavenumberSupport::corners() const {
  // k - shift = M s with s in [-hw_u, hw_u] x [-hw_v, hw_v],
  // M = [[t11, t21], [t12, t22]]
  auto map = [&](double su, double sv) -> std::array<double, 2> {
    return {shift.dk_u + tau.t11 * su + tau.t21 * sv, shift.dk_v + tau.t12 * su + tau.t22 * sv};
  };
  return {map(hw_u, hw_v), map(-hw_u, hw_v), map(-hw_u, -hw_v), map(hw_u, -hw_v)};
}

double WavenumberSupport::measure_formula() const {
  return 4.0 * hw_u * hw_v * std::abs(tau.upsilon);
}

double WavenumberSupport::measure_polygon() const {
  auto c = corners();
  return shoelace(std::vector<std::array<double, 2>>(c.begin(), c.end()));
}

double op_norm_sub(const Deployment& dep, const SubHolos& sub) {
  Tau t = tau_coefficients(dep, sub);
  if (std::abs(t.upsilon) < kUpsilonTiny)
    throw SingularGeometryError("upsilon vanishes: operator norm undefined for sub " +
                                std::to_string(sub.index));
  double d2 = sub.center.norm2();
  double lam = dep.k.lambda;
  return std::norm(gbar_center(sub, dep)) * lam * lam * d2 / std::abs(t.upsilon);
}

double op_norm_paraxial(const Deployment& dep) { return op_norm_sub(dep, full_rx_sub(dep)); }

double op_norm_nonparax(const Deployment& dep, const Partition& part) {
  if (part.subs.empty()) throw std::invalid_argument("empty partition");
  double best = 0;
  bool any = false;
  for (const SubHolos& s : part.subs) {
    Tau t = tau_coefficients(dep, s);
    if (std::abs(t.upsilon) < kUpsilonTiny) continue;  // degenerate sub, excluded
    best = std::max(best, op_norm_sub(dep, s));
    any = true;
  }
  if (!any) throw SingularGeometryError("all sub-surfaces are degenerate (upsilon = 0)");
  return best;
}

namespace {

WavenumberSupport support_of(const Deployment& dep, const SubHolos& sub) {
  WavenumberSupport s;
  s.shift = wavenumber_shift(sub, dep.k);
  s.tau = tau_coefficients(dep, sub);
  double d = sub.center.norm();
  s.hw_u = sub.u * dep.k.kappa0 / d;
  s.hw_v = sub.v * dep.k.kappa0 / d;
  return s;
}

}  // namespace

WavenumberSupport support_paraxial(const Deployment& dep) {
  WavenumberSupport s = support_of(dep, full_rx_sub(dep));
  if (std::abs(s.tau.upsilon) < kUpsilonTiny)
    throw SingularGeometryError("upsilon vanishes: wavenumber support degenerates");
  return s;
}

std::vector<WavenumberSupport> supports_nonparax(const Deployment& dep, const Partition& part) {
  std::vector<WavenumberSupport> out;
  out.reserve(part.subs.size());
  for (const SubHolos& s : part.subs) out.push_back(support_of(dep, s));
  return out;
}

double bandwidth_paraxial(const Deployment& dep) { return support_paraxial(dep).measure_formula(); }

double support_overlap(const WavenumberSupport& s1, const WavenumberSupport& s2) {
  auto poly = ccw_corners(s1);
  auto clip = ccw_corners(s2);
  for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i)
    poly = clip_edge(poly, clip[i], clip[(i + 1) % clip.size()]);
  return poly.size() < 3 ? 0.0 : shoelace(poly);
}

namespace {

PerSubEdof per_sub_edof(const Deployment& dep, const SubHolos& sub) {
  PerSubEdof p;
  p.index = sub.index;
  Tau t = tau_coefficients(dep, sub);
  double d2 = sub.center.norm2();
  double lam = dep.k.lambda;
  p.edof = dep.area_tx() * sub.area() * std::abs(t.upsilon) / (lam * lam * d2);
  if (std::abs(t.upsilon) < kUpsilonTiny) {
    p.degenerate = true;
    p.op_norm = 0;
  } else {
    p.op_norm = op_norm_sub(dep, sub);
  }
  return p;
}

EdofReport finish_report(std::vector<PerSubEdof> per_sub) {
  EdofReport rep;
  rep.per_sub = std::move(per_sub);
  for (const PerSubEdof& p : rep.per_sub) {
    if (p.included && !p.degenerate) rep.value += p.edof;
    if (p.degenerate) rep.degenerate_warning = true;
  }
  rep.floored = std::max(1L, round_half_even(rep.value));
  if (rep.value <= 0) rep.degenerate_warning = true;
  return rep;
}

}  // namespace

EdofReport edof_paraxial(const Deployment& dep) {
  return finish_report({per_sub_edof(dep, full_rx_sub(dep))});
}

double bandwidth_gamma(const Deployment& dep, const Partition& part, double gamma_norm) {
  if (!(gamma_norm > 0)) throw std::invalid_argument("gamma must be positive");
  double gamma_abs = gamma_norm * op_norm_nonparax(dep, part);
  // tiny relative slack so a level is included at exactly its own gamma
  gamma_abs *= 1.0 - 1e-12;
  double m = 0;
  for (const SubHolos& s : part.subs) {
    Tau t = tau_coefficients(dep, s);
    if (std::abs(t.upsilon) < kUpsilonTiny) continue;
    if (op_norm_sub(dep, s) >= gamma_abs) {
      WavenumberSupport w = support_of(dep, s);
      m += w.measure_formula();
    }
  }
  return m;
}

EdofReport edof_nonparax(const Deployment& dep, const Partition& part, double gamma_norm) {
  if (!(gamma_norm > 0)) throw std::invalid_argument("gamma must be positive");
  if (part.subs.empty()) throw std::invalid_argument("empty partition");
  double gamma_abs = gamma_norm * op_norm_nonparax(dep, part) * (1.0 - 1e-12);
  std::vector<PerSubEdof> per;
  per.reserve(part.subs.size());
  for (const SubHolos& s : part.subs) {
    PerSubEdof p = per_sub_edof(dep, s);
    p.included = !p.degenerate && p.op_norm >= gamma_abs;
    per.push_back(p);
  }
  return finish_report(std::move(per));
}

double edof_cutset(const Deployment& dep, const Partition& part) {
  if (dep.alpha != 0.0 || dep.beta != 0.0)
    throw UnsupportedPoseError("cut-set closed form holds for the axis-aligned pose only");
  double total = 0;
  for (const SubHolos& s : part.subs) total += per_sub_edof(dep, s).edof;
  return total;
}

}  // namespace holos
