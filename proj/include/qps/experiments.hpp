#pragma once

// Configuration-driven experiment runner shared by the CLI and the tests.
// A config names one model and a list of experiments to run against it; the
// runner wires the library modules together, writes CSV/PPM artifacts, and
// returns a manifest listing every emitted file with its checksum.

#include "qps/analysis.hpp"
#include "qps/classical.hpp"
#include "qps/io.hpp"
#include "qps/models.hpp"
#include "qps/observables.hpp"
#include "qps/otoc.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qps::exp {

enum class ExperimentKind {
  classical_section,
  quantum_section,
  otoc_curve,
  spread_map,
  entropy_curve,
  width_curve,
  ehrenfest,
  lyapunov_report,
};

ExperimentKind parse_kind(const std::string& name);
const char* to_string(ExperimentKind kind);

// One experiment entry; which fields matter depends on `kind`.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::otoc_curve;
  std::string pair = "QP";                    // two of {Q, P, q, p}
  std::vector<std::pair<int, int>> cells;     // cells of interest as (iq, ip)
  std::vector<PhasePoint> points;             // alternative: phase-space points,
  double point_scale = 1.0;                   // times point_scale, located to cells

  // time grid: maps count kicks (dt = 1); flows sample n_steps points of
  // size dt (or t_max / n_steps when t_max is given)
  int n_steps = 0;
  int stride = 1;
  double dt = 1.0;
  double t_max = 0.0;

  bool thermal = false;
  double temperature = 0.0;  // 0 = infinite temperature

  // classical_section
  int samples = 200;
  int iterations = 200;
  int min_hits = 1;
  double period = 1.0;

  bool heatmap = false;

  // ehrenfest
  double threshold = 5.0;

  // lyapunov_report
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;
  bool fit_width = false;
  PhasePoint saddle{0.0, 0.0};
};

struct ExperimentConfig {
  std::string name = "run";
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  // model
  std::string model = "kicked_rotor";  // kicked_rotor | lmg | iho
  double kick_strength = 4.7;
  int cells_per_axis = 30;
  int bosons = 1680;
  double xi = -2.0;
  double iho_hbar = 0.002;
  double p_cutoff = 1.0;
  std::string kinetic = "spectral";
  bool center_saddle = true;  // LMG: center a cell on (pi, 0)

  std::vector<ExperimentSpec> experiments;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Throws std::invalid_argument with a field-level message.
  void validate() const;
};

struct RunManifest {
  nlohmann::json config_echo;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::uint64_t>> outputs;  // path, checksum

  nlohmann::json to_json() const;
  std::filesystem::path write(const std::filesystem::path& out_dir,
                              const std::string& name) const;
};

// A model instantiated from a config: cell basis, cell-frame dynamics, the
// classical counterpart, and the operator dictionary.
struct ModelBundle {
  std::string model_name;
  bool is_map = false;
  double hbar = 0.0;
  PlanckBasis basis;
  ClassicalSystem classical;
  CMatrix u_step_cell;  // maps: one-kick cell-frame propagator
  CMatrix h_model;      // flows: model-frame Hamiltonian
  CMatrix h_cell;       // flows: cell-frame Hamiltonian
  std::shared_ptr<const SpectralEvolver> evolver;  // flows only
  io::Metadata meta;    // model parameters for output headers
  double coordinate_scale = 1.0;  // section output convention (rotor: 1/2pi)

  const PhaseSpaceGrid& grid() const { return basis.grid; }

  // 'Q' / 'P' (cell-coordinate diagonals) or 'q' / 'p' (microscopic), all in
  // the cell frame.
  CMatrix cell_operator(char symbol) const;

  // Cell-frame propagator at time t (maps: t must be a whole kick count).
  CMatrix propagator_cell(double t) const;

  // Cell-frame step operator for a sampled evolution of step dt.
  CMatrix step_operator(double dt) const;
};

ModelBundle build_model(const ExperimentConfig& config);

// Static chunking over [0, n); identical results for every thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

RunManifest run(const ExperimentConfig& config);

}  // namespace qps::exp
