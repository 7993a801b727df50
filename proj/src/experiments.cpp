#include "qps/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

namespace qps::exp {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

// ------------------------------------------------------------- configuration

ExperimentKind parse_kind(const std::string& name) {
  if (name == "classical_section") return ExperimentKind::classical_section;
  if (name == "quantum_section") return ExperimentKind::quantum_section;
  if (name == "otoc_curve") return ExperimentKind::otoc_curve;
  if (name == "spread_map") return ExperimentKind::spread_map;
  if (name == "entropy_curve") return ExperimentKind::entropy_curve;
  if (name == "width_curve") return ExperimentKind::width_curve;
  if (name == "ehrenfest") return ExperimentKind::ehrenfest;
  if (name == "lyapunov_report") return ExperimentKind::lyapunov_report;
  throw std::invalid_argument("experiment.kind: unknown kind '" + name + "'");
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::classical_section: return "classical_section";
    case ExperimentKind::quantum_section: return "quantum_section";
    case ExperimentKind::otoc_curve: return "otoc_curve";
    case ExperimentKind::spread_map: return "spread_map";
    case ExperimentKind::entropy_curve: return "entropy_curve";
    case ExperimentKind::width_curve: return "width_curve";
    case ExperimentKind::ehrenfest: return "ehrenfest";
    case ExperimentKind::lyapunov_report: return "lyapunov_report";
  }
  return "?";
}

namespace {

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.kind = parse_kind(j.at("kind").get<std::string>());
  s.pair = j.value("pair", s.pair);
  for (const auto& c : j.value("cells", nlohmann::json::array()))
    s.cells.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  for (const auto& p : j.value("points", nlohmann::json::array()))
    s.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  s.point_scale = j.value("point_scale", s.point_scale);
  s.n_steps = j.value("n_steps", s.n_steps);
  s.stride = j.value("stride", s.stride);
  s.dt = j.value("dt", s.dt);
  s.t_max = j.value("t_max", s.t_max);
  s.thermal = j.value("thermal", s.thermal);
  s.temperature = j.value("temperature", s.temperature);
  s.samples = j.value("samples", s.samples);
  s.iterations = j.value("iterations", s.iterations);
  s.min_hits = j.value("min_hits", s.min_hits);
  s.period = j.value("period", s.period);
  s.heatmap = j.value("heatmap", s.heatmap);
  s.threshold = j.value("threshold", s.threshold);
  s.fit_t_lo = j.value("fit_t_lo", s.fit_t_lo);
  s.fit_t_hi = j.value("fit_t_hi", s.fit_t_hi);
  s.fit_width = j.value("fit_width", s.fit_width);
  if (j.contains("saddle"))
    s.saddle = {j["saddle"].at(0).get<double>(), j["saddle"].at(1).get<double>()};
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["pair"] = s.pair;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [iq, ip] : s.cells) cells.push_back({iq, ip});
  j["cells"] = cells;
  nlohmann::json points = nlohmann::json::array();
  for (const PhasePoint& p : s.points) points.push_back({p.q, p.p});
  j["points"] = points;
  j["point_scale"] = s.point_scale;
  j["n_steps"] = s.n_steps;
  j["stride"] = s.stride;
  j["dt"] = s.dt;
  j["t_max"] = s.t_max;
  j["thermal"] = s.thermal;
  j["temperature"] = s.temperature;
  j["samples"] = s.samples;
  j["iterations"] = s.iterations;
  j["min_hits"] = s.min_hits;
  j["period"] = s.period;
  j["heatmap"] = s.heatmap;
  j["threshold"] = s.threshold;
  j["fit_t_lo"] = s.fit_t_lo;
  j["fit_t_hi"] = s.fit_t_hi;
  j["fit_width"] = s.fit_width;
  j["saddle"] = {s.saddle.q, s.saddle.p};
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.out_dir = j.value("out_dir", c.out_dir.string());
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);

  const nlohmann::json& m = j.at("model");
  c.model = m.at("type").get<std::string>();
  c.kick_strength = m.value("kick_strength", c.kick_strength);
  c.cells_per_axis = m.value("cells_per_axis", c.cells_per_axis);
  c.bosons = m.value("bosons", c.bosons);
  c.xi = m.value("xi", c.xi);
  c.iho_hbar = m.value("hbar", c.iho_hbar);
  c.p_cutoff = m.value("p_cutoff", c.p_cutoff);
  c.kinetic = m.value("kinetic", c.kinetic);
  c.center_saddle = m.value("center_saddle", c.center_saddle);

  for (const auto& e : j.at("experiments")) c.experiments.push_back(spec_from_json(e));
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["out_dir"] = out_dir.string();
  j["seed"] = seed;
  j["threads"] = threads;
  nlohmann::json m;
  m["type"] = model;
  if (model == "kicked_rotor") {
    m["kick_strength"] = kick_strength;
    m["cells_per_axis"] = cells_per_axis;
  } else if (model == "lmg") {
    m["bosons"] = bosons;
    m["xi"] = xi;
    m["center_saddle"] = center_saddle;
  } else {
    m["hbar"] = iho_hbar;
    m["p_cutoff"] = p_cutoff;
    m["kinetic"] = kinetic;
  }
  j["model"] = m;
  nlohmann::json es = nlohmann::json::array();
  for (const ExperimentSpec& s : experiments) es.push_back(spec_to_json(s));
  j["experiments"] = es;
  return j;
}

void ExperimentConfig::validate() const {
  if (model != "kicked_rotor" && model != "lmg" && model != "iho")
    throw std::invalid_argument("model.type: must be kicked_rotor, lmg, or iho, got '" + model +
                                "'");
  if (model == "kicked_rotor") KickedRotorSpec{kick_strength, cells_per_axis}.validate();
  if (model == "lmg") discrete_fock_cells_per_axis(bosons);
  if (model == "iho" && kinetic != "spectral" && kinetic != "central_diff")
    throw std::invalid_argument("model.kinetic: must be spectral or central_diff");
  if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
  if (experiments.empty()) throw std::invalid_argument("experiments: at least one required");

  const bool is_map = model == "kicked_rotor";
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const ExperimentSpec& s = experiments[i];
    const std::string where = "experiments[" + std::to_string(i) + "].";
    if (s.n_steps < 0) throw std::invalid_argument(where + "n_steps: must be >= 0");
    if (s.stride < 1) throw std::invalid_argument(where + "stride: must be >= 1");
    if (!is_map && s.dt <= 0.0 && s.t_max <= 0.0)
      throw std::invalid_argument(where + "dt/t_max: continuous models need a positive time step");
    if (s.pair.size() != 2 || s.pair.find_first_not_of("QPqp") != std::string::npos)
      throw std::invalid_argument(where + "pair: must be two of {Q, P, q, p}, got '" + s.pair +
                                  "'");
    if (s.temperature < 0.0) throw std::invalid_argument(where + "temperature: must be >= 0");
    const bool wants_cells = s.kind == ExperimentKind::otoc_curve ||
                             s.kind == ExperimentKind::spread_map ||
                             s.kind == ExperimentKind::entropy_curve ||
                             s.kind == ExperimentKind::width_curve ||
                             s.kind == ExperimentKind::ehrenfest ||
                             s.kind == ExperimentKind::lyapunov_report;
    if (wants_cells && s.cells.empty() && s.points.empty() &&
        !(s.kind == ExperimentKind::otoc_curve && s.thermal))
      throw std::invalid_argument(where + "cells: experiment needs cells or points of interest");
    if (s.kind == ExperimentKind::classical_section && (s.samples < 1 || s.iterations < 0))
      throw std::invalid_argument(where + "samples/iterations: need samples >= 1, iterations >= 0");
    if (s.kind == ExperimentKind::lyapunov_report && !(s.fit_t_lo < s.fit_t_hi))
      throw std::invalid_argument(where + "fit_t_lo/fit_t_hi: need fit_t_lo < fit_t_hi");
  }
}

// -------------------------------------------------------------- model bundle

ModelBundle build_model(const ExperimentConfig& config) {
  config.validate();
  ModelBundle b;
  b.model_name = config.model;
  b.meta.add("model", config.model);

  if (config.model == "kicked_rotor") {
    KickedRotorSpec spec{config.kick_strength, config.cells_per_axis};
    b.is_map = true;
    b.hbar = spec.hbar();
    b.basis = kicked_rotor_cell_basis(spec);
    b.classical = ClassicalSystem::standard_map(spec.kick_strength);
    b.u_step_cell = to_cell_frame(kicked_rotor_floquet(spec), b.basis);
    b.coordinate_scale = 1.0 / two_pi;
    b.meta.add("kick_strength", spec.kick_strength);
    b.meta.add("cells_per_axis", spec.cells_per_axis);
  } else if (config.model == "lmg") {
    LmgSpec spec{config.bosons, config.xi};
    const int l = discrete_fock_cells_per_axis(spec.bosons);
    b.hbar = spec.hbar();
    b.basis = lmg_cell_basis(spec, config.center_saddle ? lmg_saddle_q_offset(l) : 0.0);
    b.classical = ClassicalSystem::lmg_mean_field(spec.xi);
    b.h_model = lmg_hamiltonian(spec);
    b.h_cell = to_cell_frame(b.h_model, b.basis);
    // The Fock Hamiltonian evolves with unit hbar; 1/N is only the effective
    // phase-space cell constant.
    b.evolver = std::make_shared<SpectralEvolver>(b.h_cell, 1.0);
    b.meta.add("bosons", spec.bosons);
    b.meta.add("xi", spec.xi);
  } else {
    IhoSpec spec = iho_default_spec(config.iho_hbar, config.p_cutoff);
    spec.kinetic = config.kinetic == "spectral" ? KineticKind::spectral
                                                : KineticKind::central_diff;
    b.hbar = spec.hbar;
    b.basis = iho_cell_basis(spec);
    b.classical = ClassicalSystem::inverted_oscillator();
    b.h_model = iho_hamiltonian(spec);
    b.h_cell = to_cell_frame(b.h_model, b.basis);
    b.evolver = std::make_shared<SpectralEvolver>(b.h_cell, b.hbar);
    b.meta.add("p_cutoff", spec.p_cutoff);
    b.meta.add("kinetic", config.kinetic);
  }
  b.meta.add("hbar", b.hbar);
  return b;
}

CMatrix ModelBundle::cell_operator(char symbol) const {
  const int d = basis.dim();
  switch (symbol) {
    case 'Q':
      return CMatrix(basis.q_values().cast<Complex>().asDiagonal());
    case 'P':
      return CMatrix(basis.p_values().cast<Complex>().asDiagonal());
    case 'q': {
      if (model_name == "kicked_rotor") {
        CVector q(d);
        for (int j = 0; j < d; ++j) q(j) = two_pi * j / d;
        return to_cell_frame(CMatrix(q.asDiagonal()), basis);
      }
      if (model_name == "iho") {
        IhoSpec spec;
        spec.hbar = hbar;
        spec.l_q = grid().l_q;
        spec.l_p = grid().l_p;
        spec.p_cutoff = 0.0;
        return to_cell_frame(iho_position_operator(spec), basis);
      }
      throw std::invalid_argument("pair: no microscopic q operator for model " + model_name);
    }
    case 'p': {
      if (model_name == "kicked_rotor") {
        const CMatrix f = fourier_frame(grid());
        CVector p(d);
        for (int n = 0; n < d; ++n) p(n) = hbar * n;
        return to_cell_frame(CMatrix(f * p.asDiagonal() * f.adjoint()), basis);
      }
      if (model_name == "lmg") return to_cell_frame(lmg_momentum_operator(d - 1), basis);
      IhoSpec spec;
      spec.hbar = hbar;
      spec.l_q = grid().l_q;
      spec.l_p = grid().l_p;
      spec.p_cutoff = 0.0;
      return to_cell_frame(iho_momentum_operator(spec), basis);
    }
    default:
      throw std::invalid_argument(std::string("pair: unknown operator symbol '") + symbol + "'");
  }
}

CMatrix ModelBundle::propagator_cell(double t) const {
  if (!is_map) return evolver->propagator(t);
  const long kicks = std::lround(t);
  if (std::abs(t - kicks) > 1e-9 || kicks < 0)
    throw std::invalid_argument("propagator_cell: map time must be a whole kick count");
  CMatrix u = CMatrix::Identity(basis.dim(), basis.dim());
  for (long k = 0; k < kicks; ++k) u = u_step_cell * u;
  return u;
}

CMatrix ModelBundle::step_operator(double dt) const {
  if (is_map) return u_step_cell;
  return evolver->propagator(dt);
}

// ------------------------------------------------------------------ parallel

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ----------------------------------------------------------------- run logic

namespace {

struct Sink {
  std::filesystem::path out_dir;
  io::Metadata base;
  RunManifest* manifest = nullptr;

  void record(const std::filesystem::path& path) const {
    manifest->outputs.emplace_back(path.string(), io::fnv1a_checksum(path));
  }
  io::Metadata meta(const ExperimentSpec& s) const {
    io::Metadata m = base;
    m.add("kind", to_string(s.kind));
    m.add("pair", s.pair);
    return m;
  }
};

std::string cell_tag(const PhaseSpaceGrid& grid, int cell) {
  const auto [iq, ip] = grid.cell_split(cell);
  return "cell_" + std::to_string(iq) + "_" + std::to_string(ip);
}

// Resolve explicit cells plus located points to column indices.
std::vector<int> resolve_cells(const ExperimentSpec& s, const PhaseSpaceGrid& grid) {
  std::vector<int> cells;
  for (const auto& [iq, ip] : s.cells) {
    if (iq < 0 || iq >= grid.l_q || ip < 0 || ip >= grid.l_p)
      throw std::invalid_argument("cells: (" + std::to_string(iq) + ", " + std::to_string(ip) +
                                  ") is outside the " + std::to_string(grid.l_q) + "x" +
                                  std::to_string(grid.l_p) + " grid");
    cells.push_back(grid.cell_index(iq, ip));
  }
  for (const PhasePoint& p : s.points)
    cells.push_back(grid.locate(p.q * s.point_scale, p.p * s.point_scale));
  return cells;
}

// Sampled times k*dt for k = 0, stride, ..., n_steps (final step always
// included). Maps use dt = 1 (one kick per step).
std::pair<std::vector<int>, double> sample_steps(const ExperimentSpec& s, bool is_map) {
  double dt = is_map ? 1.0 : s.dt;
  if (!is_map && s.t_max > 0.0 && s.n_steps > 0) dt = s.t_max / s.n_steps;
  std::vector<int> steps;
  for (int k = 0; k <= s.n_steps; k += s.stride) steps.push_back(k);
  if (steps.back() != s.n_steps) steps.push_back(s.n_steps);
  return {steps, dt};
}

std::vector<double> step_times(const std::vector<int>& steps, double dt) {
  std::vector<double> t;
  t.reserve(steps.size());
  for (int k : steps) t.push_back(k * dt);
  return t;
}

void write_curve(const Sink& sink, const std::filesystem::path& path,
                 const std::vector<std::string>& columns, const std::vector<double>& times,
                 const std::vector<RVector>& series, const io::Metadata& meta) {
  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const RVector& col : series) row.push_back(col(static_cast<Eigen::Index>(i)));
    rows.push_back(std::move(row));
  }
  io::write_csv(path, meta, columns, rows);
  sink.record(path);
}

ThermalWeight thermal_weight(const ModelBundle& b, const ExperimentSpec& s) {
  if (s.temperature <= 0.0) return ThermalWeight::infinite();
  if (b.is_map)
    throw std::invalid_argument("temperature: Gibbs weights need a Hamiltonian model");
  return ThermalWeight::gibbs(to_cell_frame(gibbs_state(b.h_model, s.temperature), b.basis));
}

// ---------------------------------------------------------------- experiments

void run_classical_section(const ModelBundle& b, const ExperimentSpec& s, std::uint64_t seed,
                           const std::string& stem, const Sink& sink) {
  const PhaseSpaceGrid& grid = b.grid();
  const SectionCloud cloud =
      poincare_section(b.classical, grid, s.samples, s.iterations, seed, s.period);

  // Points that left an open box are dropped before binning.
  SectionCloud inside;
  inside.seed = cloud.seed;
  inside.n_samples = cloud.n_samples;
  inside.n_iterations = cloud.n_iterations;
  for (const PhasePoint& x : cloud.points) {
    const bool q_ok = grid.q_periodic || (x.q >= grid.q_origin &&
                                          x.q <= grid.q_origin + grid.q_extent);
    const bool p_ok = grid.p_periodic || (x.p >= grid.p_origin &&
                                          x.p <= grid.p_origin + grid.p_extent);
    if (q_ok && p_ok) inside.points.push_back(x);
  }
  const CellMask mask = classify_cells(inside, grid, s.min_hits);

  RVector hits = RVector::Zero(grid.cell_count());
  for (const PhasePoint& x : inside.points) hits(grid.locate(x.q, x.p)) += 1.0;

  io::Metadata meta = sink.meta(s);
  meta.add_grid(grid);
  meta.add("seed", std::to_string(seed));
  meta.add("samples", s.samples);
  meta.add("iterations", s.iterations);
  meta.add("min_hits", s.min_hits);
  meta.add("island_cells", mask.count(CellLabel::island));
  meta.add("sea_cells", mask.count(CellLabel::sea));

  const std::filesystem::path path = sink.out_dir / (stem + "_classical_hits.csv");
  io::write_section_csv(path, meta, grid, hits, b.coordinate_scale);
  sink.record(path);
  if (s.heatmap) {
    const std::filesystem::path img = sink.out_dir / (stem + "_classical_hits.ppm");
    io::write_heatmap_ppm(img, grid.l_q, grid.l_p, hits);
    sink.record(img);
  }
}

void run_quantum_section(const ModelBundle& b, const ExperimentSpec& s, int threads,
                         const std::string& stem, const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  (void)steps;
  const CMatrix a0 = b.cell_operator(s.pair[0]);
  const CMatrix bop = b.cell_operator(s.pair[1]);

  // One Heisenberg evolution of A, then a per-cell column readout.
  CMatrix a = a0;
  if (s.n_steps > 0) {
    const CMatrix u = b.step_operator(dt);
    for (int k = 0; k < s.n_steps; ++k) {
      a = (u.adjoint() * a * u).eval();
      a = 0.5 * (a + a.adjoint());
    }
  }
  const CMatrix c = commutator_i(a, bop);
  const PhaseSpaceGrid& grid = b.grid();
  RVector values(grid.cell_count());
  parallel_for(grid.cell_count(), threads,
               [&](int x) { values(x) = c.col(x).squaredNorm(); });

  io::Metadata meta = sink.meta(s);
  meta.add_grid(grid);
  meta.add("t_final", s.n_steps * dt);
  const std::filesystem::path path = sink.out_dir / (stem + "_quantum_section.csv");
  io::write_section_csv(path, meta, grid, values, b.coordinate_scale);
  sink.record(path);
  const std::filesystem::path img = sink.out_dir / (stem + "_quantum_section.ppm");
  io::write_heatmap_ppm(img, grid.l_q, grid.l_p, values);
  sink.record(img);
}

void run_otoc_curve(const ModelBundle& b, const ExperimentSpec& s, int threads,
                    const std::string& stem, const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  const std::vector<double> times = step_times(steps, dt);
  const std::vector<int> cells = resolve_cells(s, b.grid());
  const CMatrix a0 = b.cell_operator(s.pair[0]);
  const CMatrix bop = b.cell_operator(s.pair[1]);

  std::vector<RVector> curves(cells.size(), RVector::Zero(times.size()));
  RVector thermal = RVector::Zero(times.size());

  if (b.is_map) {
    if (s.thermal && s.temperature > 0.0)
      throw std::invalid_argument("temperature: Gibbs weights need a Hamiltonian model");
    // stream A(k) = U^dagger^k A U^k; readout at the sampled kicks
    CMatrix a = a0;
    std::size_t next = 0;
    const int d = b.basis.dim();
    for (int k = 0; k <= s.n_steps; ++k) {
      if (next < steps.size() && steps[next] == k) {
        const CMatrix c = commutator_i(a, bop);
        for (std::size_t ci = 0; ci < cells.size(); ++ci)
          curves[ci](next) = c.col(cells[ci]).squaredNorm();
        if (s.thermal) thermal(next) = c.squaredNorm() / d;
        ++next;
      }
      if (k < s.n_steps) {
        a = (b.u_step_cell.adjoint() * a * b.u_step_cell).eval();
        a = 0.5 * (a + a.adjoint());
      }
    }
  } else {
    parallel_for(static_cast<int>(cells.size()), threads, [&](int ci) {
      const OtocRecord rec =
          cell_otoc_spectral(*b.evolver, a0, bop, b.basis, cells[ci], times);
      curves[ci] = rec.values;
    });
    if (s.thermal) {
      const OtocRecord rec =
          thermal_otoc_spectral(*b.evolver, a0, bop, thermal_weight(b, s), times);
      thermal = rec.values;
    }
  }

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    io::Metadata meta = sink.meta(s);
    meta.add("cell", cell_tag(b.grid(), cells[ci]));
    const std::filesystem::path path =
        sink.out_dir / (stem + "_otoc_" + cell_tag(b.grid(), cells[ci]) + ".csv");
    write_curve(sink, path, {"t", "value"}, times, {curves[ci]}, meta);
  }
  if (s.thermal) {
    io::Metadata meta = sink.meta(s);
    meta.add("temperature",
             s.temperature > 0.0 ? io::format_double(s.temperature) : std::string("inf"));
    const std::filesystem::path path = sink.out_dir / (stem + "_otoc_thermal.csv");
    write_curve(sink, path, {"t", "value"}, times, {thermal}, meta);
  }
}

void run_spread_map(const ModelBundle& b, const ExperimentSpec& s, const std::string& stem,
                    const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  (void)steps;
  const double t = s.n_steps * dt;
  const PhaseSpaceGrid& grid = b.grid();
  const CMatrix u = b.propagator_cell(t);
  const CoarseMap gmap = coarse_map(b.classical, b.basis, t, u);

  for (int cell : resolve_cells(s, grid)) {
    const PhasePoint ref = b.basis.cell_coords[gmap.target[cell]];
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.cell_count());
    for (int x = 0; x < grid.cell_count(); ++x) {
      const PhasePoint c = b.basis.cell_coords[x];
      rows.push_back({grid.diff_q(c.q, ref.q) * b.coordinate_scale,
                      grid.diff_p(c.p, ref.p) * b.coordinate_scale,
                      std::norm(u(x, cell))});
    }
    io::Metadata meta = sink.meta(s);
    meta.add_grid(grid);
    meta.add("t", t);
    meta.add("cell", cell_tag(grid, cell));
    meta.add("classical_image", cell_tag(grid, gmap.target[cell]));
    const std::filesystem::path path =
        sink.out_dir / (stem + "_spread_" + cell_tag(grid, cell) + ".csv");
    io::write_csv(path, meta, {"dQ", "dP", "weight"}, rows);
    sink.record(path);
  }
}

void run_entropy_curve(const ModelBundle& b, const ExperimentSpec& s, int threads,
                       const std::string& stem, const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  const std::vector<double> times = step_times(steps, dt);
  const std::vector<int> cells = resolve_cells(s, b.grid());
  const int d = b.basis.dim();

  for (int cell : cells) {
    RVector entropy = RVector::Zero(times.size());
    if (b.is_map) {
      CVector psi = CVector::Unit(d, cell);
      std::size_t next = 0;
      for (int k = 0; k <= s.n_steps; ++k) {
        if (next < steps.size() && steps[next] == k) {
          entropy(next) = gwvn_entropy_from_populations(psi.cwiseAbs2());
          ++next;
        }
        if (k < s.n_steps) psi = b.u_step_cell * psi;
      }
    } else {
      parallel_for(static_cast<int>(times.size()), threads, [&](int i) {
        const CVector psi = b.evolver->evolve(CVector::Unit(d, cell), times[i]);
        entropy(i) = gwvn_entropy_from_populations(psi.cwiseAbs2());
      });
    }
    io::Metadata meta = sink.meta(s);
    meta.add("cell", cell_tag(b.grid(), cell));
    const std::filesystem::path path =
        sink.out_dir / (stem + "_entropy_" + cell_tag(b.grid(), cell) + ".csv");
    write_curve(sink, path, {"t", "entropy"}, times, {entropy}, meta);
  }
}

void run_width_curve(const ModelBundle& b, const ExperimentSpec& s, const std::string& stem,
                     const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  const std::vector<double> times = step_times(steps, dt);

  for (int cell : resolve_cells(s, b.grid())) {
    RVector w2(times.size());
    if (b.is_map) {
      const std::vector<double> full = width_track(b.u_step_cell, b.basis, cell, s.n_steps);
      for (std::size_t i = 0; i < steps.size(); ++i) w2(i) = full[steps[i]];
    } else {
      const std::vector<double> vals = width_track_spectral(*b.evolver, b.basis, cell, times);
      for (std::size_t i = 0; i < vals.size(); ++i) w2(i) = vals[i];
    }
    io::Metadata meta = sink.meta(s);
    meta.add("cell", cell_tag(b.grid(), cell));
    const std::filesystem::path path =
        sink.out_dir / (stem + "_width_" + cell_tag(b.grid(), cell) + ".csv");
    write_curve(sink, path, {"t", "w2"}, times, {w2}, meta);
  }
}

void run_ehrenfest(const ModelBundle& b, const ExperimentSpec& s, const std::string& stem,
                   const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  (void)steps;
  const CMatrix u = b.step_operator(dt);
  for (int cell : resolve_cells(s, b.grid())) {
    const EhrenfestTrack track = ehrenfest_delta(u, b.basis, cell, b.classical,
                                                 b.grid().cell_center(cell), s.n_steps, dt,
                                                 s.threshold);
    io::Metadata meta = sink.meta(s);
    meta.add("cell", cell_tag(b.grid(), cell));
    meta.add("plateau", track.plateau);
    meta.add("threshold", track.threshold);
    meta.add("t_e", track.t_e);
    RVector delta(track.delta.size());
    for (std::size_t i = 0; i < track.delta.size(); ++i) delta(i) = track.delta[i];
    const std::filesystem::path path =
        sink.out_dir / (stem + "_ehrenfest_" + cell_tag(b.grid(), cell) + ".csv");
    write_curve(sink, path, {"t", "delta"}, track.times, {delta}, meta);
  }
}

nlohmann::json fit_to_json(const FitResult& fit) {
  return {{"exponent", fit.exponent}, {"intercept", fit.intercept},
          {"r_squared", fit.r_squared}, {"std_error", fit.std_error},
          {"t_lo", fit.t_lo},           {"t_hi", fit.t_hi},
          {"n_used", fit.n_used}};
}

void run_lyapunov_report(const ModelBundle& b, const ExperimentSpec& s, int threads,
                         const std::string& stem, const Sink& sink) {
  const auto [steps, dt] = sample_steps(s, b.is_map);
  const std::vector<double> times = step_times(steps, dt);
  const std::vector<int> cells = resolve_cells(s, b.grid());
  const int cell = cells.at(0);
  const CMatrix a0 = b.cell_operator(s.pair[0]);
  const CMatrix bop = b.cell_operator(s.pair[1]);

  const double lambda = saddle_lyapunov(b.classical, s.saddle);

  RVector otoc(times.size());
  parallel_for(static_cast<int>(times.size()), threads, [&](int i) {
    const std::vector<double> one{times[i]};
    otoc(i) = cell_otoc_spectral(*b.evolver, a0, bop, b.basis, cell, one).values(0);
  });
  const FitResult fit =
      fit_exponential(times, otoc, s.fit_t_lo, s.fit_t_hi);

  nlohmann::json report;
  report["model"] = b.model_name;
  report["pair"] = s.pair;
  report["cell"] = cell_tag(b.grid(), cell);
  report["saddle"] = {s.saddle.q, s.saddle.p};
  report["classical_exponent"] = lambda;
  report["expected_otoc_exponent"] = 2.0 * lambda;
  report["otoc_fit"] = fit_to_json(fit);

  if (s.fit_width) {
    const std::vector<double> w2 = width_track_spectral(*b.evolver, b.basis, cell, times);
    report["width_fit"] = fit_to_json(fit_exponential(times, w2, s.fit_t_lo, s.fit_t_hi));
  }

  io::Metadata meta = sink.meta(s);
  const std::filesystem::path curve =
      sink.out_dir / (stem + "_otoc_" + cell_tag(b.grid(), cell) + ".csv");
  write_curve(sink, curve, {"t", "value"}, times, {otoc}, meta);

  const std::filesystem::path path = sink.out_dir / (stem + "_lyapunov.json");
  std::ofstream out(path);
  out << report.dump(2) << "\n";
  out.close();
  sink.record(path);
}

}  // namespace

// ------------------------------------------------------------------ manifest

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config_echo;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& [path, checksum] : outputs) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(checksum));
    outs.push_back({{"path", path}, {"fnv1a", hex}});
  }
  j["outputs"] = outs;
  return j;
}

std::filesystem::path RunManifest::write(const std::filesystem::path& out_dir,
                                         const std::string& name) const {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = out_dir / (name + "_manifest.json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << to_json().dump(2) << "\n";
  return path;
}

RunManifest run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.config_echo = config.to_json();
  manifest.version = io::software_version();

  const ModelBundle bundle = build_model(config);
  std::filesystem::create_directories(config.out_dir);

  Sink sink;
  sink.out_dir = config.out_dir;
  sink.base = bundle.meta;
  sink.manifest = &manifest;

  for (std::size_t i = 0; i < config.experiments.size(); ++i) {
    const ExperimentSpec& s = config.experiments[i];
    const std::string stem = config.name + "_e" + std::to_string(i);
    switch (s.kind) {
      case ExperimentKind::classical_section:
        run_classical_section(bundle, s, config.seed, stem, sink);
        break;
      case ExperimentKind::quantum_section:
        run_quantum_section(bundle, s, config.threads, stem, sink);
        break;
      case ExperimentKind::otoc_curve:
        run_otoc_curve(bundle, s, config.threads, stem, sink);
        break;
      case ExperimentKind::spread_map:
        run_spread_map(bundle, s, stem, sink);
        break;
      case ExperimentKind::entropy_curve:
        run_entropy_curve(bundle, s, config.threads, stem, sink);
        break;
      case ExperimentKind::width_curve:
        run_width_curve(bundle, s, stem, sink);
        break;
      case ExperimentKind::ehrenfest:
        run_ehrenfest(bundle, s, stem, sink);
        break;
      case ExperimentKind::lyapunov_report:
        run_lyapunov_report(bundle, s, config.threads, stem, sink);
        break;
    }
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return manifest;
}

}  // namespace qps::exp
