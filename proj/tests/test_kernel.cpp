#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "holos/kernel.hpp"

using namespace holos;

namespace {

PhysicalConstants k28() { return PhysicalConstants::from_frequency(28e9); }

Deployment paraxial_dep(double theta, double phi, double beta = kPi / 2) {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  return make_deployment(k, center_from_spherical(256 * lam, theta, phi), 0.0, beta, 16 * lam,
                         16 * lam, 16 * lam, 16 * lam);
}

Deployment nonparax_dep() {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  return make_deployment(k, {0, 32 * lam, 0}, 0.0, 0.0, 4 * lam, 4 * lam, 32 * lam, 32 * lam);
}

// exact distance of a local transmit/receive pair
double distance_exact(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  return (rx_local_to_offset(dep, rx) + sub.center - Vec3{tx.u, 0, tx.v}).norm();
}

// second-order expansion with the squared term dropped (for comparison)
double distance_parabolic(const Uv& tx, const Uv& rx, const SubHolos& sub, const Deployment& dep) {
  Vec3 delta = rx_local_to_offset(dep, rx) - Vec3{tx.u, 0, tx.v};
  double d2 = sub.center.norm2();
  double rho = 2.0 * sub.center.dot(delta) + delta.norm2();
  return std::sqrt(d2) * (1.0 + rho / (2.0 * d2));
}

}  // namespace

TEST_CASE("green function modulus and phase") {
  PhysicalConstants k = k28();
  Vec3 r{0.3, 1.1, -0.4};
  cplx g = green_scalar(r, k);
  CHECK(std::abs(g) == doctest::Approx(k.eta / (2 * k.lambda * r.norm())).epsilon(1e-13));
  double expect_phase = std::remainder(0.5 * kPi - k.kappa0 * r.norm(), 2 * kPi);
  CHECK(std::arg(g) == doctest::Approx(expect_phase).epsilon(1e-10));

  // integer-wavelength separations leave the j prefactor only
  for (int m : {300, 301, 1000}) {
    cplx gm = green_scalar({0, m * k.lambda, 0}, k);
    CHECK(std::arg(gm) == doctest::Approx(0.5 * kPi).epsilon(1e-8));
  }

  reset_reactive_warnings();
  (void)green_scalar({0, 2.0 * k.lambda, 0}, k);
  CHECK(reactive_warning_count() == 1);
  (void)green_scalar({0, 4.0 * k.lambda, 0}, k);
  CHECK(reactive_warning_count() == 1);
  CHECK_THROWS_AS(green_scalar({0, 0, 0}, k), SingularGeometryError);
}

TEST_CASE("polarization coupling factor") {
  CHECK(coupling_factor({0, 0, 0}, {0, 5, 0}, Axis::X, Axis::X) == doctest::Approx(1.0));
  CHECK(coupling_factor({0, 0, 0}, {0, 5, 0}, Axis::Y, Axis::Y) == doctest::Approx(0.0));
  double s = 1.0 / std::sqrt(3.0);
  CHECK(coupling_factor({0, 0, 0}, {s, s, s}, Axis::X, Axis::Z) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exact kernel factorization") {
  PhysicalConstants k = k28();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int t = 0; t < 100; ++t) {
    Vec3 a{u(rng), 0, u(rng)}, b{u(rng), 1.5 + u(rng), u(rng)};
    Axis pi = Axis(t % 3), po = Axis((t / 3) % 3);
    cplx g = kernel_exact(a, b, pi, po, k);
    cplx prod = green_scalar(b - a, k) * coupling_factor(a, b, pi, po);
    CHECK(std::abs(g - prod) <= 1e-14 * std::max(1.0, std::abs(g)));
    // conjugation flips the propagation phase only
    CHECK(std::abs(std::conj(g)) == doctest::Approx(std::abs(g)));
    CHECK(std::arg(std::conj(g)) == doctest::Approx(-std::arg(g)));
  }
}

TEST_CASE("field of a small source decays as 1/r") {
  PhysicalConstants k = k28();
  double lam = k.lambda;
  Deployment dep = make_deployment(k, {0, 100 * lam, 0}, 0, 0, lam / 4, lam / 4, lam, lam);
  SurfaceGrid tx = parametrize_tx(dep, 4, 4);
  double ref = 0;
  for (int m = 0; m < 6; ++m) {
    double dist = (100 + 100 * m) * lam;
    cplx field = 0;
    for (std::size_t t = 0; t < tx.size(); ++t)
      field += tx.weights[t] * kernel_exact(tx.points[t], {0, dist, 0}, Axis::X, Axis::X, k);
    double scaled = std::abs(field) * dist;
    if (m == 0) ref = scaled;
    CHECK(scaled == doctest::Approx(ref).epsilon(0.01));
  }
}

TEST_CASE("quartic distance expansion") {
  // centers map to the center distance exactly
  Deployment dep = nonparax_dep();
  SubHolos sub = partition_rx(dep, 8, 8).subs[19];
  CHECK(distance_quartic({0, 0}, {0, 0}, sub, dep) ==
        doctest::Approx(sub.center.norm()).epsilon(1e-15));

  double lam = dep.k.lambda;

  // reference paraxial geometry, broadside: max error below lambda/16
  {
    Deployment d0 = paraxial_dep(0.0, 0.0, 0.0);
    SubHolos full = full_rx_sub(d0);
    SurfaceGrid tx = parametrize_tx(d0, 32, 32);
    SurfaceGrid rx = parametrize_rx(d0, full, 32, 32);
    double worst = 0;
    for (std::size_t a = 0; a < rx.size(); ++a)
      for (std::size_t t = 0; t < tx.size(); ++t)
        worst = std::max(worst, std::abs(distance_exact(tx.local[t], rx.local[a], full, d0) -
                                         distance_quartic(tx.local[t], rx.local[a], full, d0)));
    CHECK(worst <= lam / 16);
  }

  // oblique pose of the same geometry: error stays below the recorded bound
  // (0.18 lambda measured; the lambda/16 level holds only at broadside)
  {
    Deployment d1 = paraxial_dep(kPi / 4, 0.0);
    SubHolos full = full_rx_sub(d1);
    SurfaceGrid tx = parametrize_tx(d1, 32, 32);
    SurfaceGrid rx = parametrize_rx(d1, full, 32, 32);
    double worst = 0;
    for (std::size_t a = 0; a < rx.size(); ++a)
      for (std::size_t t = 0; t < tx.size(); ++t)
        worst = std::max(worst, std::abs(distance_exact(tx.local[t], rx.local[a], full, d1) -
                                         distance_quartic(tx.local[t], rx.local[a], full, d1)));
    CHECK(worst <= 0.20 * lam);
    CHECK(worst >= 0.10 * lam);  // regression floor: the pose is genuinely harder
  }

  // off-broadside: keeping the squared term beats dropping it by far
  {
    Deployment d2 = paraxial_dep(kPi / 4, kPi / 6);
    SubHolos full = full_rx_sub(d2);
    SurfaceGrid tx = parametrize_tx(d2, 16, 16);
    SurfaceGrid rx = parametrize_rx(d2, full, 16, 16);
    double worst_q = 0, worst_p = 0;
    for (std::size_t a = 0; a < rx.size(); ++a)
      for (std::size_t t = 0; t < tx.size(); ++t) {
        double ex = distance_exact(tx.local[t], rx.local[a], full, d2);
        worst_q = std::max(worst_q, std::abs(ex - distance_quartic(tx.local[t], rx.local[a], full, d2)));
        worst_p = std::max(worst_p, std::abs(ex - distance_parabolic(tx.local[t], rx.local[a], full, d2)));
      }
    CHECK(worst_q * 5 <= worst_p);  // measured ratio ~16
  }
}

TEST_CASE("focusing factors") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double lam = dep.k.lambda;

  for (const SubHolos& sub : {part.subs[0], part.subs[27], part.subs[63]}) {
    CHECK(focusing_tx({0, 0}, sub, dep) == cplx(1, 0));
    CHECK(focusing_rx({0, 0}, sub, dep) == cplx(1, 0));
    CHECK(coupling_phase_p({0, 0}, {0, 0}, sub, dep) == cplx(1, 0));
    for (int t = 0; t < 30; ++t) {
      Uv tx{4 * lam * u(rng), 4 * lam * u(rng)};
      Uv rx{sub.u * u(rng), sub.v * u(rng)};
      CHECK(std::abs(std::abs(focusing_tx(tx, sub, dep)) - 1) < 1e-12);
      CHECK(std::abs(std::abs(focusing_rx(rx, sub, dep)) - 1) < 1e-12);
      CHECK(std::abs(std::abs(coupling_phase_p(tx, rx, sub, dep)) - 1) < 1e-12);
      // the three phases recompose the quartic phase exactly
      cplx lhs = kernel_quartic(tx, rx, sub, dep);
      cplx rhs = gbar_center(sub, dep) *
                 std::polar(1.0, -dep.k.kappa0 * distance_quartic(tx, rx, sub, dep));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
    }
  }
  CHECK(std::abs(fbar_tx({0, 0}, dep) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(std::abs(fbar_tx({3 * lam, -2 * lam}, dep)) - 1) < 1e-12);
}

TEST_CASE("factored kernel vs exact kernel on sub-surface grids") {
  // pointwise agreement is phase-limited at this scale; the recorded worst
  // relative deviation over the 8x8 partition is just under one
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);
  SurfaceGrid tx = parametrize_tx(dep, 16, 16);
  double worst = 0;
  for (int idx : {0, 27, 36, 63}) {
    const SubHolos& sub = part.subs[idx];
    SurfaceGrid rx = parametrize_rx(dep, sub, 16, 16);
    for (std::size_t a = 0; a < rx.size(); a += 7)
      for (std::size_t t = 0; t < tx.size(); t += 5) {
        cplx ex = kernel_exact(tx.points[t], rx.points[a], dep.pol_i, dep.pol_o, dep.k);
        cplx ap = kernel_quartic(tx.local[t], rx.local[a], sub, dep);
        worst = std::max(worst, std::abs(ex - ap) / std::abs(ex));
      }
  }
  CHECK(worst <= 1.0);
  CHECK(worst >= 0.3);  // regression band around the recorded value
}

TEST_CASE("sub-surface kernel against direct quadrature") {
  Deployment dep = nonparax_dep();
  Partition part = partition_rx(dep, 8, 8);
  const SubHolos& sub = part.subs[35];
  SurfaceGrid rx = parametrize_rx(dep, sub, 48, 48);
  double scale = std::norm(gbar_center(sub, dep)) * sub.area();
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double lam = dep.k.lambda;
  for (int t = 0; t < 5; ++t) {
    Uv a{4 * lam * u(rng), 4 * lam * u(rng)};
    Uv b{4 * lam * u(rng), 4 * lam * u(rng)};
    cplx direct = 0;
    for (std::size_t r = 0; r < rx.size(); ++r)
      direct += rx.weights[r] * std::conj(coupling_phase_p(a, rx.local[r], sub, dep)) *
                coupling_phase_p(b, rx.local[r], sub, dep);
    direct *= std::norm(gbar_center(sub, dep));
    double closed = gbar_sub(a.u - b.u, a.v - b.v, sub, dep);
    CHECK(std::abs(direct - closed) <= 1e-3 * scale);
    CHECK(std::abs(direct.imag()) <= 1e-3 * scale);
  }

  // value at zero lag and evenness
  CHECK(gbar_sub(0, 0, sub, dep) == doctest::Approx(scale).epsilon(1e-13));
  CHECK(gbar_sub(2 * lam, -lam, sub, dep) ==
        doctest::Approx(gbar_sub(-2 * lam, lam, sub, dep)).epsilon(1e-13));

  // first zero along u for a decoupled pose
  PhysicalConstants k = dep.k;
  Deployment broad = make_deployment(k, {0, 40 * lam, 0}, 0, 0, 4 * lam, 4 * lam, 8 * lam, 8 * lam);
  SubHolos full = full_rx_sub(broad);
  Tau tt = tau_coefficients(broad, full);
  double du0 = lam * broad.c_o.norm() / (2 * broad.u_rx * tt.t11);
  CHECK(std::abs(gbar_sub(du0, 0, full, broad)) <=
        1e-10 * std::norm(gbar_center(full, broad)) * full.area());
}

TEST_CASE("partitioned kernel") {
  Deployment dep = nonparax_dep();

  // single broadside sub reduces to the real sub-kernel
  Partition one = partition_rx(dep, 1, 1);
  double lam = dep.k.lambda;
  cplx v = gbar_nonparax(1.3 * lam, -0.4 * lam, one, dep);
  CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.real() ==
        doctest::Approx(gbar_sub(1.3 * lam, -0.4 * lam, one.subs[0], dep)).epsilon(1e-12));

  Partition part = partition_rx(dep, 8, 8);
  // zero lag: sum of per-sub levels, real
  cplx z = gbar_nonparax(0, 0, part, dep);
  double expect = 0;
  for (const SubHolos& s : part.subs) expect += std::norm(gbar_center(s, dep)) * s.area();
  CHECK(z.real() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(z.imag()) <= 1e-12 * expect);

  // conjugate symmetry
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-8 * lam, 8 * lam);
  for (int t = 0; t < 100; ++t) {
    double du = u(rng), dv = u(rng);
    cplx a = gbar_nonparax(du, dv, part, dep);
    cplx b = gbar_nonparax(-du, -dv, part, dep);
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
  }

  // wavenumber shifts stay inside the visible region
  for (const SubHolos& s : part.subs) {
    WavenumberShift sh = wavenumber_shift(s, dep.k);
    CHECK(std::hypot(sh.dk_u, sh.dk_v) <= dep.k.kappa0 * (1 + 1e-12));
  }
}

TEST_CASE("global focusing phase matches the sub factor up to its linear term") {
  Deployment dep = nonparax_dep();
  SubHolos full = full_rx_sub(dep);
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(-4, 4);
  double lam = dep.k.lambda;
  for (int t = 0; t < 40; ++t) {
    Uv tx{u(rng) * lam, u(rng) * lam};
    FocusingMismatch m = focusing_mismatch(tx, full, dep);
    CHECK(m.curvature == doctest::Approx(0.0).epsilon(1e-12));  // same reference center
    cplx lhs = focusing_tx(tx, full, dep) * std::conj(fbar_tx(tx, dep));
    CHECK(std::abs(lhs - std::polar(1.0, m.linear)) <= 1e-12);
  }

  // residual curvature is dominated by the linear shift for every sub
  Partition part = partition_rx(dep, 8, 8);
  SurfaceGrid tx = parametrize_tx(dep, 16, 16);
  for (const SubHolos& sub : part.subs) {
    double span_min = 1e300, span_max = -1e300, worst_curv = 0;
    for (std::size_t t = 0; t < tx.size(); ++t) {
      FocusingMismatch m = focusing_mismatch(tx.local[t], sub, dep);
      span_min = std::min(span_min, m.linear);
      span_max = std::max(span_max, m.linear);
      worst_curv = std::max(worst_curv, std::abs(m.curvature));
      cplx lhs = focusing_tx(tx.local[t], sub, dep) * std::conj(fbar_tx(tx.local[t], dep));
      CHECK(std::abs(lhs - std::polar(1.0, m.linear + m.curvature)) <= 1e-12);
    }
    CHECK(span_max - span_min >= 5.0 * worst_curv);  // measured minimum ratio ~25
  }
}
