#include "holos/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "holos/kernel.hpp"
#include "holos/simd.hpp"

namespace holos {

namespace {

void check_cap(std::size_t n, int cap) {
  if (n > std::size_t(cap))
    throw std::invalid_argument("matrix size " + std::to_string(n) +
                                " exceeds the dense-solver cap " + std::to_string(cap));
}

double hermitian_residual(const la::Matrix& m) {
  double num = 0, den = 0;
  for (int c = 0; c < m.cols; ++c)
    for (int r = 0; r < m.rows; ++r) {
      num += std::norm(m.at(r, c) - std::conj(m.at(c, r)));
      den += std::norm(m.at(r, c));
    }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

void finish_hermitian(HermitianKernel& h, double herm_tol) {
  double resid = hermitian_residual(h.m);
  if (resid > herm_tol)
    throw AssemblyError("kernel is not conjugate-symmetric: residual " + std::to_string(resid));
  int n = h.m.rows;
  for (int c = 0; c < n; ++c) {
    h.m.at(c, c) = cplx(h.m.at(c, c).real(), 0.0);
    for (int r = c + 1; r < n; ++r) {
      cplx v = 0.5 * (h.m.at(r, c) + std::conj(h.m.at(c, r)));
      h.m.at(r, c) = v;
      h.m.at(c, r) = std::conj(v);
    }
  }
  h.trace = 0;
  for (int i = 0; i < n; ++i) h.trace += h.m.at(i, i).real();
  h.frob2 = h.m.frob2();
}

// Builds the weighted kernel matrix from per-pair values of a difference
// lattice table: value(a,b) = latt[(ia-ib)+(nu-1)][(ja-jb)+(nv-1)].
HermitianKernel from_lattice(const std::vector<cplx>& latt, const SurfaceGrid& g) {
  int nu = g.n_u, nv = g.n_v, n = nu * nv, lv = 2 * nv - 1;
  HermitianKernel h;
  h.m = la::Matrix(n, n);
  h.weights = g.weights;
  parallel_for(std::size_t(n), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      int ib = int(b) / nv, jb = int(b) % nv;
      double swb = std::sqrt(g.weights[b]);
      cplx* col = h.m.col(int(b));
      for (int a = 0; a < n; ++a) {
        int ia = a / nv, ja = a % nv;
        col[a] = std::sqrt(g.weights[a]) * swb *
                 latt[std::size_t(ia - ib + nu - 1) * lv + (ja - jb + nv - 1)];
      }
    }
  });
  return h;
}

std::vector<cplx> lattice_values(const std::vector<simd::SincTerm>& terms, const SurfaceGrid& g) {
  int nu = g.n_u, nv = g.n_v;
  // grid steps recovered from the local coordinates
  double step_u = nu > 1 ? g.local[std::size_t(nv)].u - g.local[0].u : 0.0;
  double step_v = nv > 1 ? g.local[1].v - g.local[0].v : 0.0;
  std::size_t total = std::size_t(2 * nu - 1) * (2 * nv - 1);
  std::vector<double> du(total), dv(total);
  std::size_t idx = 0;
  for (int i = -(nu - 1); i <= nu - 1; ++i)
    for (int j = -(nv - 1); j <= nv - 1; ++j, ++idx) {
      du[idx] = i * step_u;
      dv[idx] = j * step_v;
    }
  std::vector<cplx> latt(total);
  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    simd::gbar_sum_batch(du.data() + lo, dv.data() + lo, hi - lo, terms.data(), terms.size(),
                         latt.data() + lo);
  });
  return latt;
}

}  // namespace

HermitianKernel assemble_self_adjoint(const KernelFn& fn, const SurfaceGrid& grid, double herm_tol,
                                      int matrix_cap) {
  std::size_t n = grid.size();
  check_cap(n, matrix_cap);
  HermitianKernel h;
  h.m = la::Matrix{int(n), int(n)};
  h.weights = grid.weights;
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      double swb = std::sqrt(grid.weights[b]);
      cplx* col = h.m.col(int(b));
      for (std::size_t a = 0; a < n; ++a)
        col[a] = std::sqrt(grid.weights[a]) * fn(grid.local[a], grid.local[b]) * swb;
    }
  });
  finish_hermitian(h, herm_tol);
  return h;
}

HermitianKernel assemble_gbar_sub(const Deployment& dep, const SubHolos& sub,
                                  const SurfaceGrid& tx_grid, int matrix_cap) {
  check_cap(tx_grid.size(), matrix_cap);
  Partition single;
  single.n_u = single.n_v = 1;
  single.subs = {sub};
  auto terms = sinc_terms(dep, single);
  // the single-sub kernel is the bare (real, even) sinc kernel; the
  // wavenumber shift belongs to the partitioned composition only
  terms[0].ku = terms[0].kv = 0;
  HermitianKernel h = from_lattice(lattice_values(terms, tx_grid), tx_grid);
  finish_hermitian(h, kDefaultHermitianTol);
  return h;
}

HermitianKernel assemble_nonparax(const Deployment& dep, const Partition& part,
                                  const SurfaceGrid& tx_grid, int matrix_cap) {
  check_cap(tx_grid.size(), matrix_cap);
  auto terms = sinc_terms(dep, part);
  HermitianKernel h = from_lattice(lattice_values(terms, tx_grid), tx_grid);
  finish_hermitian(h, kDefaultHermitianTol);
  return h;
}

namespace {

la::Matrix fill_kernel_matrix(const SurfaceGrid& tx_grid, const SurfaceGrid& rx_grid,
                              const Deployment& dep, const std::vector<double>& row_scale,
                              const std::vector<double>& col_scale) {
  std::size_t nt = tx_grid.size(), nr = rx_grid.size();
  la::Matrix B{int(nr), int(nt)};
  std::vector<double> rx(nr), ry(nr), rz(nr);
  for (std::size_t a = 0; a < nr; ++a) {
    rx[a] = rx_grid.points[a].x;
    ry[a] = rx_grid.points[a].y;
    rz[a] = rx_grid.points[a].z;
  }
  simd::ExactKernelParams p;
  p.kappa0 = dep.k.kappa0;
  p.amp0 = dep.k.eta / (2.0 * dep.k.lambda);
  p.kron = dep.pol_i == dep.pol_o ? 1.0 : 0.0;
  p.ci = static_cast<int>(dep.pol_i);
  p.co = static_cast<int>(dep.pol_o);
  parallel_for(nt, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> dx(nr), dy(nr), dz(nr);
    for (std::size_t t = lo; t < hi; ++t) {
      const Vec3& pt = tx_grid.points[t];
      for (std::size_t a = 0; a < nr; ++a) {
        dx[a] = rx[a] - pt.x;
        dy[a] = ry[a] - pt.y;
        dz[a] = rz[a] - pt.z;
      }
      cplx* col = B.col(int(t));
      simd::kernel_exact_batch(dx.data(), dy.data(), dz.data(), nr, p, col);
      double ct = col_scale[t];
      for (std::size_t a = 0; a < nr; ++a) col[a] *= row_scale[a] * ct;
    }
  });
  return B;
}

}  // namespace

la::Matrix assemble_channel(const SurfaceGrid& tx_grid, const SurfaceGrid& rx_grid,
                            const Deployment& dep, int matrix_cap) {
  check_cap(tx_grid.size(), matrix_cap);
  check_cap(rx_grid.size(), std::max(matrix_cap, 20000));
  std::vector<double> rs(rx_grid.size()), cs(tx_grid.size());
  for (std::size_t a = 0; a < rs.size(); ++a) rs[a] = std::sqrt(rx_grid.weights[a]);
  for (std::size_t t = 0; t < cs.size(); ++t) cs[t] = std::sqrt(tx_grid.weights[t]);
  return fill_kernel_matrix(tx_grid, rx_grid, dep, rs, cs);
}

la::Matrix assemble_propagator(const SurfaceGrid& tx_grid, const SurfaceGrid& rx_grid,
                               const Deployment& dep) {
  std::vector<double> rs(rx_grid.size(), 1.0);
  return fill_kernel_matrix(tx_grid, rx_grid, dep, rs, tx_grid.weights);
}

namespace {

Spectrum spectrum_from_values(std::vector<double> vals_desc, double trace, double frob2) {
  Spectrum s;
  s.eigs = std::move(vals_desc);
  s.trace = trace;
  s.frob2 = frob2;
  if (!s.eigs.empty()) {
    double top = s.eigs.front();
    double floor = -1e-8 * std::max(top, 0.0);
    for (double& v : s.eigs) {
      if (v < floor)
        throw NumericError("eigenvalue " + std::to_string(v) +
                           " violates the nonnegativity bound " + std::to_string(floor));
      if (v < 0) v = 0;
    }
  }
  return s;
}

}  // namespace

Spectrum eigen_spectrum(const HermitianKernel& h) { return eigen_spectrum(HermitianKernel(h)); }

Spectrum eigen_spectrum(HermitianKernel&& h) {
  double trace = h.trace, frob2 = h.frob2;
  std::vector<double> w = la::eigvalsh(std::move(h.m));
  std::reverse(w.begin(), w.end());
  return spectrum_from_values(std::move(w), trace, frob2);
}

Spectrum singular_spectrum(const la::Matrix& channel) {
  return singular_spectrum(la::Matrix(channel));
}

Spectrum singular_spectrum(la::Matrix&& channel) {
  double trace = channel.frob2();  // Mercer trace of B^H B
  std::vector<double> s = la::singular_values(std::move(channel));
  for (double& v : s) v = v * v;
  double frob2 = 0;
  for (double v : s) frob2 += v * v;
  return spectrum_from_values(std::move(s), trace, frob2);
}

int count_edof(const Spectrum& s, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("accuracy level gamma must be positive");
  int n = 0;
  for (double v : s.eigs) {
    if (v >= gamma) ++n;
    else break;  // descending
  }
  return n;
}

PolarizationReport polarization_profile(const Spectrum& s, std::vector<double> levels) {
  if (levels.empty()) throw std::invalid_argument("polarization profile needs reference levels");
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * a; }),
               levels.end());
  PolarizationReport rep;
  rep.levels = levels;
  rep.level_counts.assign(levels.size(), 0);
  double min_level = levels.back();
  rep.min_plateau_value = 0;
  for (double mu : s.eigs) {
    double best = 1e300;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      double rel = std::abs(mu - levels[j]) / levels[j];
      if (rel < best) {
        best = rel;
        best_j = j;
      }
    }
    if (best <= 0.10) {
      rep.level_counts[best_j]++;
      if (rep.min_plateau_value == 0 || mu < rep.min_plateau_value) rep.min_plateau_value = mu;
    } else if (mu <= 0.10 * min_level) {
      rep.zero_count++;
    } else {
      rep.transition_count++;
    }
  }
  rep.transition_fraction = s.eigs.empty() ? 0.0 : double(rep.transition_count) / s.eigs.size();
  return rep;
}

}  // namespace holos
