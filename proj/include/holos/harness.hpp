#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holos/closedform.hpp"
#include "holos/geometry.hpp"
#include "holos/spectrum.hpp"
#include "holos/waveforms.hpp"

namespace holos {

struct ExperimentConfig {
  Deployment deployment;
  int part_nu = 1, part_nv = 1;
  double grid_density = 2.0;  // sample points per wavelength, per axis
  int matrix_cap = kDefaultMatrixCap;
  double hermitian_tol = kDefaultHermitianTol;
  std::string name = "experiment";
  std::vector<double> gammas{0.5};       // normalized accuracy levels
  std::vector<int> r_scales{1, 2, 4};
  int mode_count = 0;                    // 0: derived from the closed-form eDoF
  std::string out_dir = "out";
  std::uint64_t seed = 0;                // reserved for randomized diagnostics
  bool quiet = false;
  std::string canonical;                 // canonical config text (hash input)

  std::uint64_t hash() const;  // FNV-1a over the canonical text

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);

  Partition partition() const { return partition_rx(deployment, part_nu, part_nv); }
  int tx_points_u() const;
  int tx_points_v() const;
  int rx_points_u() const;
  int rx_points_v() const;
};

// Length fields accept meters ("0.171"/"0.171m") or a "<number>lambda" suffix.
double parse_length_text(const std::string& text, double lambda);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void header(std::vector<std::string> cols) { columns = std::move(cols); }
  std::vector<std::string>& add_row() { return rows.emplace_back(); }
};

// Shortest round-trip decimal representation ('.' separator, no locale).
std::string format_double(double v);
std::string csv_escape(const std::string& field);

// Writes <out_dir>/<name>_<table>.csv plus a JSON metadata sidecar carrying
// the config hash and library version.
struct OutputWriter {
  std::string out_dir;
  std::string base_name;
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> written;

  std::string write_table(const ResultTable& t, const std::string& table_name);
  void write_sidecar(const std::string& extra_json_text = "{}");
};

// One experiment per call; each returns the tables it would write.
ResultTable run_edof(const ExperimentConfig& cfg);
ResultTable run_spectrum(const ExperimentConfig& cfg, double* error_functional = nullptr);
ResultTable run_waveforms(const ExperimentConfig& cfg);
void run_coupling(const ExperimentConfig& cfg, ResultTable* coupling, ResultTable* localization);
ResultTable run_polarization(const ExperimentConfig& cfg);
ResultTable run_sweep(const ExperimentConfig& cfg, const std::string& param, double from, double to,
                      int steps);

// Executes a subcommand end to end (tables + files). Returns a process exit
// code (validate returns nonzero when a criterion fails).
int run_subcommand(const std::string& name, ExperimentConfig cfg,
                   const std::string& sweep_param = "", double sweep_from = 0, double sweep_to = 0,
                   int sweep_steps = 0);

}  // namespace holos
