#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "holos/closedform.hpp"

using namespace holos;

namespace {

PhysicalConstants k28() { return PhysicalConstants::from_frequency(28e9); }

Deployment paraxial_dep(double theta, double phi, double alpha = 0.0, double beta = kPi / 2) {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  return make_deployment(k, center_from_spherical(256 * lam, theta, phi), alpha, beta, 16 * lam,
                         16 * lam, 16 * lam, 16 * lam);
}

Deployment nonparax_dep() {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  return make_deployment(k, {0, 32 * lam, 0}, 0.0, 0.0, 4 * lam, 4 * lam, 32 * lam, 32 * lam);
}

}  // namespace

TEST_CASE("paraxial operator norm") {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  // broadside with matched polarization: eta^2/4, independent of distance
  for (double d : {64.0, 128.0, 512.0}) {
    Deployment dep = make_deployment(k, {0, d * lam, 0}, 0, 0, 4 * lam, 4 * lam, 4 * lam, 4 * lam);
    CHECK(op_norm_paraxial(dep) == doctest::Approx(k.eta * k.eta / 4).epsilon(1e-12));
  }
  // edge-on pose: upsilon vanishes
  Deployment singular = paraxial_dep(0.0, 0.0);
  CHECK_THROWS_AS(op_norm_paraxial(singular), SingularGeometryError);
}

TEST_CASE("wavenumber support geometry") {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  // broadside: axis-aligned rectangle
  Deployment dep = make_deployment(k, {0, 100 * lam, 0}, 0, 0, 8 * lam, 8 * lam, 6 * lam, 5 * lam);
  WavenumberSupport s = support_paraxial(dep);
  double hu = 6 * lam * k.kappa0 / (100 * lam), hv = 5 * lam * k.kappa0 / (100 * lam);
  auto corners = s.corners();
  for (const auto& c : corners) {
    CHECK(std::abs(std::abs(c[0]) - hu) <= 1e-12 * hu);
    CHECK(std::abs(std::abs(c[1]) - hv) <= 1e-12 * hv);
  }
  CHECK(s.measure_formula() ==
        doctest::Approx(4 * kPi * kPi * dep.area_rx() / (lam * lam * dep.c_o.norm2()))
            .epsilon(1e-12));

  // measure formula equals the polygon area at random poses
  std::mt19937 rng(83);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vec3 c = center_from_spherical(150 * lam, 0.6 * u(rng), 0.6 * u(rng));
    Deployment d =
        make_deployment(k, c, u(rng), u(rng), 8 * lam, 7 * lam, 6 * lam, 9 * lam);
    Tau tau = tau_coefficients(d, full_rx_sub(d));
    if (std::abs(tau.upsilon) < 1e-3) continue;
    WavenumberSupport ws = support_paraxial(d);
    CHECK(std::abs(ws.measure_formula() - ws.measure_polygon()) <= 1e-9 * ws.measure_formula());
  }
}

TEST_CASE("paraxial edof values") {
  // broadside variant of the reference geometry: 32^4 / 256^2 = 16
  PhysicalConstants k = k28();
  double lam = k.lambda;
  Deployment broad = make_deployment(k, {0, 256 * lam, 0}, 0, 0, 16 * lam, 16 * lam, 16 * lam,
                                     16 * lam);
  EdofReport r16 = edof_paraxial(broad);
  CHECK(r16.value == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(r16.floored == 16);

  // wall/ceiling pose at 45 degrees: 16 * 1/2 = 8
  EdofReport r8 = edof_paraxial(paraxial_dep(kPi / 4, 0.0));
  CHECK(r8.value == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r8.floored == 8);

  // the closed form equals A_Tx m_G / (2 pi)^2
  Deployment dep = paraxial_dep(kPi / 4, 0.0);
  CHECK(r8.value == doctest::Approx(dep.area_tx() * bandwidth_paraxial(dep) / (4 * kPi * kPi))
                        .epsilon(1e-12));

  // sub-wavelength link: floored to one
  Deployment tiny = make_deployment(k, {0, 400 * lam, 0}, 0, 0, lam, lam, lam, lam);
  EdofReport r1 = edof_paraxial(tiny);
  CHECK(r1.value < 1.0);
  CHECK(r1.floored == 1);

  // degenerate pose: value zero, floored with a warning
  EdofReport r0 = edof_paraxial(paraxial_dep(0.0, 0.0));
  CHECK(r0.value == 0.0);
  CHECK(r0.floored == 1);
  CHECK(r0.degenerate_warning);

  // swapping the two surfaces leaves the product unchanged
  Deployment swapped = make_deployment(k, paraxial_dep(kPi / 4, 0.0).c_o, 0.0, kPi / 2, 16 * lam,
                                       16 * lam, 16 * lam, 16 * lam);
  std::swap(swapped.u_tx, swapped.u_rx);
  std::swap(swapped.v_tx, swapped.v_rx);
  CHECK(edof_paraxial(swapped).value == doctest::Approx(r8.value).epsilon(1e-12));
}

TEST_CASE("per-sub norms and shifts") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);

  // broadside single sub reduces to the paraxial value
  Partition one = partition_rx(dep, 1, 1);
  CHECK(op_norm_sub(dep, one.subs[0]) == doctest::Approx(op_norm_paraxial(dep)).epsilon(1e-12));

  double lam = dep.k.lambda;
  auto norm_at = [&](double xl, double zl) {
    for (const SubHolos& s : part.subs)
      if (std::abs(s.center.x - xl * lam) < 0.1 * lam && std::abs(s.center.z - zl * lam) < 0.1 * lam)
        return op_norm_sub(dep, s);
    REQUIRE(false);
    return 0.0;
  };
  double center = norm_at(4, 4);
  // along the driven polarization axis the coupling factor drops faster than
  // 1/|ups| grows, so the plateau level falls; transverse to it the level rises
  CHECK(norm_at(28, 4) < center);
  CHECK(norm_at(4, 28) > center);

  // the maximum is attained by the four subs nearest the z edge (symmetry tie)
  std::vector<double> norms;
  for (const SubHolos& s : part.subs) norms.push_back(op_norm_sub(dep, s));
  std::sort(norms.begin(), norms.end(), std::greater<>());
  CHECK(op_norm_nonparax(dep, part) == doctest::Approx(norms[0]));
  CHECK(norms[3] == doctest::Approx(norms[0]).epsilon(1e-12));
  CHECK(norms[4] < norms[0] * (1 - 1e-9));

  // partition order does not matter
  Partition shuffled = part;
  std::reverse(shuffled.subs.begin(), shuffled.subs.end());
  CHECK(op_norm_nonparax(dep, shuffled) == doctest::Approx(op_norm_nonparax(dep, part)));

  // ten distinct (distance, upsilon) classes over the 8x8 grid; polarization
  // coupling splits them into sixteen distinct plateau levels
  std::vector<double> classes;
  for (const SubHolos& s : part.subs) {
    Tau t = tau_coefficients(dep, s);
    double key = std::round(s.center.norm() / lam * 1e6) * 1e3 + std::round(t.upsilon * 1e6) * 1e-6;
    classes.push_back(key);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  // 4^2+28^2 and 20^2+20^2 both give 800, so two of the ten tile classes
  // coincide in (distance, upsilon)
  CHECK(classes.size() == 9);
  std::vector<double> distinct = norms;
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-9 * a; }),
                 distinct.end());
  CHECK(distinct.size() == 16);

  CHECK_THROWS_AS(op_norm_nonparax(dep, Partition{}), std::invalid_argument);
}

TEST_CASE("support overlap") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);
  auto sups = supports_nonparax(dep, part);
  REQUIRE(sups.size() == 64);

  // identical supports: the full measure
  CHECK(support_overlap(sups[0], sups[0]) ==
        doctest::Approx(sups[0].measure_polygon()).epsilon(1e-9));

  // far-separated supports: zero
  CHECK(support_overlap(sups[0], sups[63]) == 0.0);

  // decoupled strip: interval overlap obeys the 2 L delta bound
  PhysicalConstants k = dep.k;
  double lam = k.lambda;
  Deployment strip =
      make_deployment(k, {0, 32 * lam, 0}, 0, 0, 4 * lam, 4 * lam, 32 * lam, 4 * lam);
  Partition sp = partition_rx(strip, 8, 1);
  auto ss = supports_nonparax(strip, sp);
  for (int a = 0; a + 1 < 8; ++a) {
    const WavenumberSupport& sa = ss[a];
    const WavenumberSupport& sb = ss[a + 1];
    // ku extents from the corners
    auto kus = [&](const WavenumberSupport& s) {
      auto c = s.corners();
      double lo = 1e300, hi = -1e300;
      for (auto& p : c) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
      }
      return std::pair{lo, hi};
    };
    auto [alo, ahi] = kus(sa);
    auto [blo, bhi] = kus(sb);
    double overlap_u = std::max(0.0, std::min(ahi, bhi) - std::max(alo, blo));
    double bound = 2.0 * sp.subs[a + 1].u * k.kappa0 * std::abs(sb.tau.upsilon) /
                   (sp.subs[a + 1].center.norm() * std::abs(sb.tau.t22));
    CHECK(overlap_u >= -1e-12);
    CHECK(overlap_u <= bound * (1 + 1e-9));
  }
}

TEST_CASE("accuracy-filtered edof") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);

  // vanishing accuracy includes all subs; the innermost contributes about 4
  EdofReport all = edof_nonparax(dep, part, 1e-9);
  int included = 0;
  for (const auto& p : all.per_sub) included += p.included ? 1 : 0;
  CHECK(included == 64);
  double lam = dep.k.lambda;
  for (const auto& p : all.per_sub) {
    const SubHolos& s = part.subs[p.index];
    if (std::abs(s.center.x) < 5 * lam && std::abs(s.center.z) < 5 * lam)
      CHECK(p.edof == doctest::Approx(4.0).epsilon(0.10));  // 3.761 exactly
  }

  // at the norm itself only the argmax class stays
  EdofReport top = edof_nonparax(dep, part, 1.0);
  int top_in = 0;
  for (const auto& p : top.per_sub) top_in += p.included ? 1 : 0;
  CHECK(top_in == 4);

  // monotone non-increasing in gamma
  double prev = 1e300;
  for (double g : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    double v = edof_nonparax(dep, part, g).value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }

  // piecewise constant with breakpoints exactly at the distinct levels
  std::vector<double> levels;
  for (const SubHolos& s : part.subs) levels.push_back(op_norm_sub(dep, s));
  double maxn = *std::max_element(levels.begin(), levels.end());
  for (double& l : levels) l /= maxn;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               levels.end());
  for (double l : levels) {
    double below = edof_nonparax(dep, part, l * (1 - 1e-9)).value;
    double above = edof_nonparax(dep, part, l * (1 + 1e-9)).value;
    double at = edof_nonparax(dep, part, l).value;
    CHECK(below > above);
    CHECK(at == doctest::Approx(below).epsilon(1e-12));  // level included at its own gamma
  }

  // gamma above the norm: empty set, floored with a warning
  EdofReport none = edof_nonparax(dep, part, 1.5);
  CHECK(none.value == 0.0);
  CHECK(none.floored == 1);
  CHECK(none.degenerate_warning);

  CHECK_THROWS_AS(edof_nonparax(dep, part, 0.0), std::invalid_argument);

  // bandwidth form matches the edof form through the Landau identity
  double g = 0.4;
  CHECK(bandwidth_gamma(dep, part, g) * dep.area_tx() / (4 * kPi * kPi) ==
        doctest::Approx(edof_nonparax(dep, part, g).value).epsilon(1e-12));
}

TEST_CASE("cut-set estimate") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);
  double cut = edof_cutset(dep, part);
  CHECK(cut == doctest::Approx(edof_nonparax(dep, part, 1e-12).value).epsilon(1e-12));

  // single broadside sub at the reference paraxial size gives 16
  PhysicalConstants k = k28();
  double lam = k.lambda;
  Deployment broad = make_deployment(k, {0, 256 * lam, 0}, 0, 0, 16 * lam, 16 * lam, 16 * lam,
                                     16 * lam);
  CHECK(edof_cutset(broad, partition_rx(broad, 1, 1)) == doctest::Approx(16.0).epsilon(1e-12));

  Deployment tilted = make_deployment(k, {0, 256 * lam, 0}, 0.0, 0.3, 16 * lam, 16 * lam, 16 * lam,
                                      16 * lam);
  CHECK_THROWS_AS(edof_cutset(tilted, partition_rx(tilted, 1, 1)), UnsupportedPoseError);
}

TEST_CASE("support measures obey inclusion-exclusion") {
  // nearly disjoint supports: the union measure equals the sum of measures
  // minus the pairwise overlaps, up to rasterization error and the
  // (negligible) higher-order intersections
  PhysicalConstants k = PhysicalConstants::from_frequency(28e9);
  double lam = k.lambda;
  Deployment strip =
      make_deployment(k, {0, 32 * lam, 0}, 0, 0, 4 * lam, 4 * lam, 32 * lam, 4 * lam);
  Partition part = partition_rx(strip, 8, 1);
  auto sups = supports_nonparax(strip, part);

  double sum_measure = 0, sum_overlap = 0;
  for (const auto& s : sups) sum_measure += s.measure_formula();
  for (std::size_t a = 0; a < sups.size(); ++a)
    for (std::size_t b = a + 1; b < sups.size(); ++b) sum_overlap += support_overlap(sups[a], sups[b]);
  CHECK(sum_overlap >= 0.0);
  CHECK(sum_overlap <= 0.1 * sum_measure);  // almost disjoint

  // rasterized union over the joint bounding box
  double lo_u = 1e300, hi_u = -1e300, lo_v = 1e300, hi_v = -1e300;
  for (const auto& s : sups)
    for (const auto& c : s.corners()) {
      lo_u = std::min(lo_u, c[0]);
      hi_u = std::max(hi_u, c[0]);
      lo_v = std::min(lo_v, c[1]);
      hi_v = std::max(hi_v, c[1]);
    }
  auto inside = [](const WavenumberSupport& s, double ku, double kv) {
    double du = ku - s.shift.dk_u, dv = kv - s.shift.dk_v;
    double su = (s.tau.t22 * du - s.tau.t21 * dv) / s.tau.upsilon;
    double sv = (-s.tau.t12 * du + s.tau.t11 * dv) / s.tau.upsilon;
    return std::abs(su) <= s.hw_u && std::abs(sv) <= s.hw_v;
  };
  const int n = 700;
  double du = (hi_u - lo_u) / n, dv = (hi_v - lo_v) / n;
  long covered = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ku = lo_u + (i + 0.5) * du, kv = lo_v + (j + 0.5) * dv;
      for (const auto& s : sups)
        if (inside(s, ku, kv)) {
          ++covered;
          break;
        }
    }
  double union_raster = covered * du * dv;
  CHECK(union_raster <= sum_measure * (1 + 0.01));
  CHECK(std::abs(union_raster - (sum_measure - sum_overlap)) <= 0.01 * sum_measure);
}
