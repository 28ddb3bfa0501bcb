#include "holos/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "holos/kernel.hpp"

namespace holos {

namespace {

constexpr double kTauZeroTol = 1e-9;

int auto_per_axis(double p, int n_nodes, int requested) {
  if (requested > 0) return std::min(requested, n_nodes);
  int plateau = int(std::ceil(2.0 * p / kPi));
  return std::min(n_nodes, std::max(6, plateau + 4));
}

}  // namespace

PswfBasis pswf_basis(double half_length, double p, int count, int n_nodes) {
  if (!(half_length > 0)) throw std::invalid_argument("half_length must be positive");
  if (!(p > 0)) throw std::invalid_argument("concentration parameter p must be positive");
  if (count < 1 || count > n_nodes)
    throw std::invalid_argument("requested function count exceeds the node count");
  PswfBasis b;
  b.half_length = half_length;
  b.p = p;
  double h = 2.0 * half_length / n_nodes;
  b.node_weight = h;
  b.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) b.nodes[i] = -half_length + h * (i + 0.5);

  double omega = p / half_length;
  std::vector<double> A(std::size_t(n_nodes) * n_nodes);
  for (int j = 0; j < n_nodes; ++j)
    for (int i = 0; i < n_nodes; ++i) {
      double du = b.nodes[i] - b.nodes[j];
      double k = i == j ? omega / kPi : std::sin(omega * du) / (kPi * du);
      A[std::size_t(j) * n_nodes + i] = h * k;
    }
  std::vector<double> w = la::eigvalsh_real(A, n_nodes, true);

  double rt = std::sqrt(h);
  b.functions.resize(count);
  b.concentrations.resize(count);
  for (int m = 0; m < count; ++m) {
    int col = n_nodes - 1 - m;  // ascending -> descending
    b.concentrations[m] = std::clamp(w[col], 0.0, 1.0);
    std::vector<double>& f = b.functions[m];
    f.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) f[i] = A[std::size_t(col) * n_nodes + i] / rt;
    // deterministic sign: first node with appreciable value made positive
    for (int i = 0; i < n_nodes; ++i) {
      if (std::abs(f[i]) > 1e-12) {
        if (f[i] < 0)
          for (double& x : f) x = -x;
        break;
      }
    }
  }
  b.truncated = b.concentrations.back() < 1e-12;
  return b;
}

namespace {

struct ModeSeed {
  double eigenvalue;
  int sub_index, m_u, m_v;
  const PswfBasis* bu;
  const PswfBasis* bv;
  WavenumberShift shift;
};

bool mode_order(const ModeSeed& a, const ModeSeed& b) {
  if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
  int sa = a.m_u + a.m_v, sb = b.m_u + b.m_v;
  return std::tie(sa, a.m_u, a.sub_index) < std::tie(sb, b.m_u, b.sub_index);
}

void require_separable(const Tau& t, int sub_index) {
  if (std::abs(t.t12) > kTauZeroTol || std::abs(t.t21) > kTauZeroTol)
    throw UnsupportedPoseError(
        "closed-form waveforms need t12 = t21 = 0 (sub " + std::to_string(sub_index) +
        "); use the numerical eigenvectors for this pose");
}

WaveformSet build_set(const SurfaceGrid& grid,
                      std::vector<ModeSeed> seeds, int count, bool shifted) {
  std::stable_sort(seeds.begin(), seeds.end(), mode_order);
  if (int(seeds.size()) > count) seeds.resize(count);
  WaveformSet set;
  set.tx = grid;
  set.modes.reserve(seeds.size());
  int nv = grid.n_v;
  for (const ModeSeed& s : seeds) {
    Waveform w;
    w.eigenvalue = s.eigenvalue;
    w.sub_index = s.sub_index;
    w.m_u = s.m_u;
    w.m_v = s.m_v;
    w.samples.resize(grid.size());
    const std::vector<double>& fu = s.bu->functions[s.m_u];
    const std::vector<double>& fv = s.bv->functions[s.m_v];
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      double val = fu[idx / nv] * fv[idx % nv];
      if (shifted) {
        const Uv& q = grid.local[idx];
        w.samples[idx] =
            val * std::polar(1.0, -(s.shift.dk_u * q.u + s.shift.dk_v * q.v));
      } else {
        w.samples[idx] = val;
      }
    }
    set.modes.push_back(std::move(w));
  }
  return set;
}

}  // namespace

WaveformSet eigenfunctions_paraxial(const Deployment& dep, int n_u, int n_v, int count,
                                    int per_axis) {
  SubHolos sub = full_rx_sub(dep);
  Tau t = tau_coefficients(dep, sub);
  require_separable(t, sub.index);
  SurfaceGrid grid = parametrize_tx(dep, n_u, n_v);
  double d = sub.center.norm();
  double lam = dep.k.lambda;
  double pu = 2.0 * kPi * dep.u_tx * sub.u * std::abs(t.t11) / (lam * d);
  double pv = 2.0 * kPi * dep.v_tx * sub.v * std::abs(t.t22) / (lam * d);
  PswfBasis bu = pswf_basis(dep.u_tx, pu, auto_per_axis(pu, n_u, per_axis), n_u);
  PswfBasis bv = pswf_basis(dep.v_tx, pv, auto_per_axis(pv, n_v, per_axis), n_v);
  double scale = lam * lam * d * d / std::abs(t.t11 * t.t22) * std::norm(gbar_center(sub, dep));
  std::vector<ModeSeed> seeds;
  for (std::size_t mu = 0; mu < bu.functions.size(); ++mu)
    for (std::size_t mv = 0; mv < bv.functions.size(); ++mv)
      seeds.push_back({scale * bu.concentrations[mu] * bv.concentrations[mv], 0, int(mu), int(mv),
                       &bu, &bv, WavenumberShift{}});
  WaveformSet set = build_set(grid, std::move(seeds), count, false);
  set.focusing = FocusingKind::ParaxialSub;
  set.focus_sub = sub;
  return set;
}

WaveformSet eigenfunctions_nonparax(const Deployment& dep, const Partition& part, int n_u, int n_v,
                                    int count, int per_axis) {
  SurfaceGrid grid = parametrize_tx(dep, n_u, n_v);
  double lam = dep.k.lambda;
  std::vector<PswfBasis> bases;
  bases.reserve(2 * part.subs.size());
  std::vector<ModeSeed> seeds;
  for (const SubHolos& sub : part.subs) {
    Tau t = tau_coefficients(dep, sub);
    require_separable(t, sub.index);
    double d = sub.center.norm();
    double pu = 2.0 * kPi * dep.u_tx * sub.u * std::abs(t.t11) / (lam * d);
    double pv = 2.0 * kPi * dep.v_tx * sub.v * std::abs(t.t22) / (lam * d);
    bases.push_back(pswf_basis(dep.u_tx, pu, auto_per_axis(pu, n_u, per_axis), n_u));
    bases.push_back(pswf_basis(dep.v_tx, pv, auto_per_axis(pv, n_v, per_axis), n_v));
    const PswfBasis& bu = bases[bases.size() - 2];
    const PswfBasis& bv = bases[bases.size() - 1];
    double scale = lam * lam * d * d / std::abs(t.t11 * t.t22) * std::norm(gbar_center(sub, dep));
    WavenumberShift sh = wavenumber_shift(sub, dep.k);
    for (std::size_t mu = 0; mu < bu.functions.size(); ++mu)
      for (std::size_t mv = 0; mv < bv.functions.size(); ++mv)
        seeds.push_back({scale * bu.concentrations[mu] * bv.concentrations[mv], sub.index, int(mu),
                         int(mv), &bu, &bv, sh});
  }
  WaveformSet set = build_set(grid, std::move(seeds), count, true);
  set.focusing = FocusingKind::NonparaxialGlobal;
  set.focus_sub = full_rx_sub(dep);
  return set;
}

std::vector<std::vector<cplx>> propagate(const WaveformSet& wset, const SurfaceGrid& rx_grid,
                                         const Deployment& dep) {
  std::size_t nt = wset.tx.size(), nm = wset.modes.size();
  la::Matrix currents{int(nt), int(nm)};
  for (std::size_t m = 0; m < nm; ++m) {
    cplx* col = currents.col(int(m));
    for (std::size_t t = 0; t < nt; ++t) {
      cplx focus = wset.focusing == FocusingKind::ParaxialSub
                       ? focusing_tx(wset.tx.local[t], wset.focus_sub, dep)
                       : fbar_tx(wset.tx.local[t], dep);
      col[t] = focus * wset.modes[m].samples[t];
    }
  }
  la::Matrix prop = assemble_propagator(wset.tx, rx_grid, dep);
  la::Matrix fields = la::matmul(prop, currents);
  std::vector<std::vector<cplx>> out(nm);
  for (std::size_t m = 0; m < nm; ++m)
    out[m].assign(fields.col(int(m)), fields.col(int(m)) + rx_grid.size());
  return out;
}

double CouplingMatrix::normalized_abs(int i, int j) const {
  double di = at(i, i).real(), dj = at(j, j).real();
  return std::abs(at(i, j)) / std::sqrt(di * dj);
}

CouplingMatrix coupling_matrix(const std::vector<std::vector<cplx>>& fields,
                               const SurfaceGrid& rx_grid) {
  int n = int(fields.size());
  CouplingMatrix c;
  c.n = n;
  c.gram.assign(std::size_t(n) * n, cplx{});
  for (int j = 0; j < n; ++j) {
    if (fields[j].size() != rx_grid.size())
      throw std::invalid_argument("field sampling does not match the receive grid");
    for (int i = 0; i <= j; ++i) {
      cplx acc = 0;
      for (std::size_t a = 0; a < rx_grid.size(); ++a)
        acc += rx_grid.weights[a] * fields[i][a] * std::conj(fields[j][a]);
      c.gram[std::size_t(j) * n + i] = acc;
      c.gram[std::size_t(i) * n + j] = std::conj(acc);
    }
  }
  return c;
}

std::vector<std::vector<double>> field_intensity_map(const std::vector<std::vector<cplx>>& fields) {
  std::vector<std::vector<double>> out(fields.size());
  for (std::size_t m = 0; m < fields.size(); ++m) {
    out[m].resize(fields[m].size());
    for (std::size_t a = 0; a < fields[m].size(); ++a) out[m][a] = std::norm(fields[m][a]);
  }
  return out;
}

double localization_fraction(const std::vector<cplx>& field, const SurfaceGrid& rx_full,
                             const Partition& part, const Deployment& dep, int sub_index) {
  if (field.size() != rx_full.size())
    throw std::invalid_argument("field sampling does not match the receive grid");
  double inside = 0, total = 0;
  for (std::size_t a = 0; a < rx_full.size(); ++a) {
    double e = rx_full.weights[a] * std::norm(field[a]);
    total += e;
    if (tile_index(part, dep, rx_full.local[a]) == sub_index) inside += e;
  }
  return total > 0 ? inside / total : 0.0;
}

}  // namespace holos
