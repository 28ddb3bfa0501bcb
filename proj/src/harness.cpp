#include "holos/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "holos/acceptance.hpp"
#include "holos/kernel.hpp"

namespace holos {

using nlohmann::json;

namespace {

double parse_length_json(const json& v, double lambda) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_length_text(v.get<std::string>(), lambda);
  throw std::invalid_argument("length field must be a number or a string");
}

int points_for(double half_length, double lambda, double density) {
  return std::max(2, int(std::lround(2.0 * half_length / lambda * density)));
}

}  // namespace

double parse_length_text(const std::string& text, double lambda) {
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse length '" + text + "'");
  }
  std::string suffix = text.substr(pos);
  suffix.erase(std::remove_if(suffix.begin(), suffix.end(), ::isspace), suffix.end());
  if (suffix.empty() || suffix == "m") return value;
  if (suffix == "lambda") return value * lambda;
  throw std::invalid_argument("unknown length suffix '" + suffix + "' in '" + text + "'");
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int ExperimentConfig::tx_points_u() const {
  return points_for(deployment.u_tx, deployment.k.lambda, grid_density);
}
int ExperimentConfig::tx_points_v() const {
  return points_for(deployment.v_tx, deployment.k.lambda, grid_density);
}
int ExperimentConfig::rx_points_u() const {
  return points_for(deployment.u_rx, deployment.k.lambda, grid_density);
}
int ExperimentConfig::rx_points_v() const {
  return points_for(deployment.v_rx, deployment.k.lambda, grid_density);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  if (!j.contains("deployment")) throw std::invalid_argument("config: missing 'deployment' block");
  const json& d = j.at("deployment");
  if (!d.contains("frequency_hz"))
    throw std::invalid_argument("config: deployment.frequency_hz is required");
  PhysicalConstants k = PhysicalConstants::from_frequency(d.at("frequency_hz").get<double>());

  if (!d.contains("center")) throw std::invalid_argument("config: deployment.center is required");
  const json& c = d.at("center");
  bool cartesian = c.contains("x") || c.contains("y") || c.contains("z");
  bool spherical = c.contains("distance") || c.contains("theta") || c.contains("phi");
  if (cartesian == spherical)
    throw std::invalid_argument(
        "config: center must be either {x,y,z} or {distance,theta,phi}, not both");
  Vec3 center;
  if (cartesian) {
    center = {parse_length_json(c.value("x", json(0.0)), k.lambda),
              parse_length_json(c.value("y", json(0.0)), k.lambda),
              parse_length_json(c.value("z", json(0.0)), k.lambda)};
  } else {
    double dist = parse_length_json(c.at("distance"), k.lambda);
    center = center_from_spherical(dist, c.value("theta", 0.0), c.value("phi", 0.0));
  }

  double alpha = d.value("alpha", 0.0), beta = d.value("beta", 0.0);
  auto len = [&](const char* key) {
    if (!d.contains(key)) throw std::invalid_argument(std::string("config: deployment.") + key + " is required");
    return parse_length_json(d.at(key), k.lambda);
  };
  Axis pi = axis_from_name(d.value("pol_in", "x"));
  Axis po = axis_from_name(d.value("pol_out", "x"));
  cfg.deployment = make_deployment(k, center, alpha, beta, len("tx_half_u"), len("tx_half_v"),
                                   len("rx_half_u"), len("rx_half_v"), pi, po);

  if (j.contains("partition")) {
    cfg.part_nu = j["partition"].value("n_u", 1);
    cfg.part_nv = j["partition"].value("n_v", 1);
    if (cfg.part_nu < 1 || cfg.part_nv < 1)
      throw std::invalid_argument("config: partition counts must be positive");
  }
  if (j.contains("numerics")) {
    const json& n = j["numerics"];
    cfg.grid_density = n.value("grid_density", 2.0);
    cfg.matrix_cap = n.value("matrix_cap", kDefaultMatrixCap);
    cfg.hermitian_tol = n.value("hermitian_tol", kDefaultHermitianTol);
    if (!(cfg.grid_density > 0)) throw std::invalid_argument("config: grid_density must be positive");
  }
  if (j.contains("run")) {
    const json& r = j["run"];
    cfg.name = r.value("name", "experiment");
    if (r.contains("gammas")) cfg.gammas = r["gammas"].get<std::vector<double>>();
    if (r.contains("r_scales")) cfg.r_scales = r["r_scales"].get<std::vector<int>>();
    cfg.mode_count = r.value("mode_count", 0);
    cfg.out_dir = r.value("out_dir", "out");
    cfg.seed = r.value("seed", std::uint64_t(0));
  }
  for (double g : cfg.gammas)
    if (!(g > 0)) throw std::invalid_argument("config: gammas must be positive");

  cfg.canonical = j.dump();  // sorted keys: canonical within a given structure
  return cfg;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string OutputWriter::write_table(const ResultTable& t, const std::string& table_name) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::string file = base_name + "_" + table_name + ".csv";
  std::string path = (fs::path(out_dir) / file).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  out << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << "\r\n";
  }
  written.push_back(file);
  return path;
}

void OutputWriter::write_sidecar(const std::string& extra_json_text) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  json meta;
  meta["subcommand"] = subcommand;
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash));
  meta["config_hash"] = hex;
  meta["version"] = kVersion;
  meta["outputs"] = written;
  meta["seed"] = seed;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["timestamp"] = ts;
  meta["extra"] = json::parse(extra_json_text);
  std::ofstream out((fs::path(out_dir) / (base_name + "_meta.json")).string());
  out << meta.dump(2) << "\n";
}

namespace {

struct NumericContext {
  Spectrum spectrum;  // exact-operator spectrum via the sampled channel
};

NumericContext exact_numeric(const ExperimentConfig& cfg) {
  const Deployment& dep = cfg.deployment;
  SurfaceGrid tx = parametrize_tx(dep, cfg.tx_points_u(), cfg.tx_points_v());
  SurfaceGrid rx = parametrize_rx(dep, full_rx_sub(dep), cfg.rx_points_u(), cfg.rx_points_v());
  la::Matrix b = assemble_channel(tx, rx, dep, cfg.matrix_cap);
  NumericContext ctx;
  ctx.spectrum = singular_spectrum(std::move(b));
  return ctx;
}

int auto_mode_count(const ExperimentConfig& cfg, double closed_edof) {
  if (cfg.mode_count > 0) return cfg.mode_count;
  return std::min(64, std::max(8, int(std::lround(closed_edof)) + 8));
}

}  // namespace

ResultTable run_edof(const ExperimentConfig& cfg) {
  const Deployment& dep = cfg.deployment;
  bool paraxial = cfg.part_nu == 1 && cfg.part_nv == 1;
  Partition part = cfg.partition();
  NumericContext num = exact_numeric(cfg);
  double num_max = num.spectrum.eigs.empty() ? 0.0 : num.spectrum.eigs.front();

  ResultTable t;
  t.header({"gamma_norm", "n_closed", "n_numeric"});
  for (double g : cfg.gammas) {
    EdofReport rep = paraxial ? edof_paraxial(dep) : edof_nonparax(dep, part, g);
    // numerical counts are thresholded against the numerical spectrum's own
    // operator norm (its largest eigenvalue)
    int nn = num_max > 0 ? count_edof(num.spectrum, g * num_max) : 0;
    auto& row = t.add_row();
    row = {format_double(g), format_double(rep.value), std::to_string(nn)};
  }
  return t;
}

ResultTable run_spectrum(const ExperimentConfig& cfg, double* error_functional) {
  const Deployment& dep = cfg.deployment;
  Partition part = cfg.partition();
  NumericContext num = exact_numeric(cfg);
  SurfaceGrid tx = parametrize_tx(dep, cfg.tx_points_u(), cfg.tx_points_v());
  Spectrum approx = eigen_spectrum(assemble_nonparax(dep, part, tx, cfg.matrix_cap));

  double err_num = 0, err_den = 0;
  std::size_t n = std::min(num.spectrum.eigs.size(), approx.eigs.size());
  for (std::size_t i = 0; i < n; ++i) {
    double d = num.spectrum.eigs[i] - approx.eigs[i];
    err_num += d * d;
    err_den += num.spectrum.eigs[i] * num.spectrum.eigs[i];
  }
  if (error_functional) *error_functional = err_den > 0 ? err_num / err_den : 0.0;

  double norm = op_norm_nonparax(dep, part);
  ResultTable t;
  t.header({"index", "mu_exact", "mu_approx", "mu_exact_over_norm"});
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = t.add_row();
    row = {std::to_string(i), format_double(num.spectrum.eigs[i]), format_double(approx.eigs[i]),
           format_double(num.spectrum.eigs[i] / norm)};
  }
  return t;
}

namespace {

WaveformSet waveforms_for(const ExperimentConfig& cfg, int count) {
  const Deployment& dep = cfg.deployment;
  if (cfg.part_nu == 1 && cfg.part_nv == 1)
    return eigenfunctions_paraxial(dep, cfg.tx_points_u(), cfg.tx_points_v(), count);
  return eigenfunctions_nonparax(dep, cfg.partition(), cfg.tx_points_u(), cfg.tx_points_v(), count);
}

double closed_edof_value(const ExperimentConfig& cfg) {
  if (cfg.part_nu == 1 && cfg.part_nv == 1) return edof_paraxial(cfg.deployment).value;
  return edof_nonparax(cfg.deployment, cfg.partition(),
                       cfg.gammas.empty() ? 0.5 : cfg.gammas.front())
      .value;
}

}  // namespace

ResultTable run_waveforms(const ExperimentConfig& cfg) {
  int count = auto_mode_count(cfg, closed_edof_value(cfg));
  WaveformSet set = waveforms_for(cfg, count);
  double norm = set.modes.empty() ? 1.0 : set.modes.front().eigenvalue;
  ResultTable t;
  t.header({"mode", "sub", "m_u", "m_v", "eigenvalue", "eigenvalue_norm"});
  for (std::size_t m = 0; m < set.modes.size(); ++m) {
    const Waveform& w = set.modes[m];
    auto& row = t.add_row();
    row = {std::to_string(m), std::to_string(w.sub_index), std::to_string(w.m_u),
           std::to_string(w.m_v), format_double(w.eigenvalue), format_double(w.eigenvalue / norm)};
  }
  return t;
}

void run_coupling(const ExperimentConfig& cfg, ResultTable* coupling, ResultTable* localization) {
  const Deployment& dep = cfg.deployment;
  int count = auto_mode_count(cfg, closed_edof_value(cfg));
  WaveformSet set = waveforms_for(cfg, count);
  SurfaceGrid rx = parametrize_rx(dep, full_rx_sub(dep), cfg.rx_points_u(), cfg.rx_points_v());
  auto fields = propagate(set, rx, dep);
  CouplingMatrix cm = coupling_matrix(fields, rx);

  if (coupling) {
    coupling->header({"mode_i", "mode_j", "sub_i", "sub_j", "coupling_abs", "coupling_db"});
    for (int i = 0; i < cm.n; ++i)
      for (int j = 0; j < cm.n; ++j) {
        double a = cm.normalized_abs(i, j);
        auto& row = coupling->add_row();
        row = {std::to_string(i), std::to_string(j), std::to_string(set.modes[i].sub_index),
               std::to_string(set.modes[j].sub_index), format_double(a),
               format_double(20.0 * std::log10(std::max(a, 1e-300)))};
      }
  }
  if (localization) {
    Partition part = cfg.partition();
    localization->header({"mode", "sub", "received_energy", "localization"});
    for (std::size_t m = 0; m < fields.size(); ++m) {
      double frac = localization_fraction(fields[m], rx, part, dep, set.modes[m].sub_index);
      auto& row = localization->add_row();
      row = {std::to_string(m), std::to_string(set.modes[m].sub_index),
             format_double(cm.at(int(m), int(m)).real()), format_double(frac)};
    }
  }
}

ResultTable run_polarization(const ExperimentConfig& cfg) {
  Partition part = cfg.partition();
  std::vector<double> levels;
  for (const SubHolos& s : part.subs) levels.push_back(op_norm_sub(cfg.deployment, s));
  double max_level = *std::max_element(levels.begin(), levels.end());
  double min_level = *std::min_element(levels.begin(), levels.end());

  ResultTable t;
  t.header({"r", "matrix_n", "transition_count", "transition_fraction", "max_eig_over_max_norm",
            "min_plateau_over_min_norm"});
  for (int r : cfg.r_scales) {
    Deployment dep = cfg.deployment;
    dep.u_tx *= r;
    dep.v_tx *= r;
    int nu = points_for(dep.u_tx, dep.k.lambda, cfg.grid_density);
    int nv = points_for(dep.v_tx, dep.k.lambda, cfg.grid_density);
    SurfaceGrid tx = parametrize_tx(dep, nu, nv);
    Spectrum s = eigen_spectrum(assemble_nonparax(dep, part, tx, cfg.matrix_cap));
    s.op_norm_refs = levels;
    PolarizationReport rep = polarization_profile(s, levels);
    auto& row = t.add_row();
    row = {std::to_string(r),
           std::to_string(tx.size()),
           std::to_string(rep.transition_count),
           format_double(rep.transition_fraction),
           format_double(s.eigs.empty() ? 0.0 : s.eigs.front() / max_level),
           format_double(rep.min_plateau_value / min_level)};
  }
  return t;
}

ResultTable run_sweep(const ExperimentConfig& cfg, const std::string& param, double from, double to,
                      int steps) {
  if (steps < 1) throw std::invalid_argument("sweep needs at least one step");
  double gamma = cfg.gammas.empty() ? 0.5 : cfg.gammas.front();

  ResultTable t;
  t.header({param, "n_closed", "n_numeric"});
  for (int i = 0; i <= steps; ++i) {
    double value = from + (to - from) * i / steps;
    ExperimentConfig c = cfg;
    if (param == "theta_o" || param == "phi_o") {
      const Vec3& old = cfg.deployment.c_o;
      double dist = old.norm();
      double theta = std::asin(std::clamp(old.z / dist, -1.0, 1.0));
      double phi = std::atan2(old.x, old.y);
      if (param == "theta_o") theta = value;
      else phi = value;
      c.deployment.c_o = center_from_spherical(dist, theta, phi);
    } else if (param == "alpha") {
      c.deployment.alpha = value;
    } else if (param == "beta") {
      c.deployment.beta = value;
    } else if (param == "grid_density") {
      c.grid_density = value;
    } else {
      throw std::invalid_argument("unknown sweep parameter '" + param + "'");
    }

    bool paraxial = c.part_nu == 1 && c.part_nv == 1;
    double closed;
    if (paraxial) {
      closed = edof_paraxial(c.deployment).value;
    } else {
      closed = edof_nonparax(c.deployment, c.partition(), gamma).value;
    }
    NumericContext num = exact_numeric(c);
    double num_max = num.spectrum.eigs.empty() ? 0.0 : num.spectrum.eigs.front();
    int nn = num_max > 0 ? count_edof(num.spectrum, gamma * num_max) : 0;
    auto& row = t.add_row();
    row = {format_double(value), format_double(closed), std::to_string(nn)};
  }
  return t;
}

int run_subcommand(const std::string& name, ExperimentConfig cfg, const std::string& sweep_param,
                   double sweep_from, double sweep_to, int sweep_steps) {
  OutputWriter w;
  w.out_dir = cfg.out_dir;
  w.base_name = cfg.name;
  w.subcommand = name;
  w.config_hash = cfg.hash();
  w.seed = cfg.seed;
  auto note = [&](const std::string& path) {
    if (!cfg.quiet) std::fprintf(stderr, "wrote %s\n", path.c_str());
  };

  if (name == "edof") {
    note(w.write_table(run_edof(cfg), "edof"));
    w.write_sidecar();
  } else if (name == "spectrum") {
    double err = 0;
    ResultTable t = run_spectrum(cfg, &err);
    note(w.write_table(t, "spectrum"));
    w.write_sidecar("{\"eigenvalue_error_functional\": " + format_double(err) + "}");
  } else if (name == "waveforms") {
    note(w.write_table(run_waveforms(cfg), "waveforms"));
    w.write_sidecar();
  } else if (name == "coupling") {
    ResultTable c, l;
    run_coupling(cfg, &c, &l);
    note(w.write_table(c, "coupling"));
    note(w.write_table(l, "localization"));
    w.write_sidecar();
  } else if (name == "polarization") {
    note(w.write_table(run_polarization(cfg), "polarization"));
    w.write_sidecar();
  } else if (name == "sweep") {
    note(w.write_table(run_sweep(cfg, sweep_param, sweep_from, sweep_to, sweep_steps), "sweep"));
    w.write_sidecar();
  } else if (name == "validate") {
    auto results = run_acceptance(!cfg.quiet);
    int failures = 0;
    for (const auto& r : results)
      if (!r.pass) ++failures;
    return failures == 0 ? 0 : 1;
  } else {
    throw std::invalid_argument("unknown subcommand '" + name + "'");
  }
  return 0;
}

}  // namespace holos
