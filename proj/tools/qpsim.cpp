// Batch experiment runner: loads a JSON config, runs the requested
// experiments, and writes CSV/PPM artifacts plus a manifest. Subcommands
// either run the whole config (`run`) or only the entries of one experiment
// kind; `render` re-renders a section CSV as a PPM heatmap.

#include "qps/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
  bool full_scale = false;
  bool desk_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--out", flags.out_dir, "output directory (overrides the config)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides the config)")
      ->each([&](const std::string&) { flags.has_seed = true; });
  cmd->add_option("--threads", flags.threads, "worker threads (overrides the config)");
  auto* full = cmd->add_flag("--full-scale", flags.full_scale,
                              "full-scale model parameters (slow)");
  cmd->add_flag("--desk-scale", flags.desk_scale, "default desk-scale model parameters")
      ->excludes(full);
}

void apply_common(qps::exp::ExperimentConfig& config, const CommonFlags& flags) {
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.has_seed) config.seed = flags.seed;
  if (flags.threads > 0) config.threads = flags.threads;
  if (flags.full_scale) {
    if (config.model == "iho") config.iho_hbar = 0.0005;
    if (config.model == "kicked_rotor") config.cells_per_axis = 50;
  } else if (flags.desk_scale) {
    if (config.model == "iho") config.iho_hbar = 0.002;
    if (config.model == "kicked_rotor") config.cells_per_axis = 30;
  }
}

int run_config(const std::string& config_path, const CommonFlags& flags,
               std::optional<qps::exp::ExperimentKind> only_kind) {
  qps::exp::ExperimentConfig config = qps::exp::ExperimentConfig::from_file(config_path);
  apply_common(config, flags);
  if (only_kind) {
    std::vector<qps::exp::ExperimentSpec> kept;
    for (const auto& s : config.experiments)
      if (s.kind == *only_kind) kept.push_back(s);
    if (kept.empty())
      throw std::invalid_argument(std::string("experiments: config has no ") +
                                  qps::exp::to_string(*only_kind) + " entry");
    config.experiments = kept;
  }
  config.validate();
  const qps::exp::RunManifest manifest = qps::exp::run(config);
  const auto path = manifest.write(config.out_dir, config.name);
  std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planck-cell phase-space dynamics experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  CommonFlags flags;
  std::optional<qps::exp::ExperimentKind> only_kind;

  auto* run_cmd = app.add_subcommand("run", "run every experiment in a config file");
  run_cmd->add_option("config", config_path, "JSON config file")->required();
  add_common(run_cmd, flags);

  for (const char* kind :
       {"classical_section", "quantum_section", "otoc_curve", "spread_map", "entropy_curve",
        "width_curve", "ehrenfest", "lyapunov_report"}) {
    auto* cmd = app.add_subcommand(
        kind, std::string("run only the ") + kind + " entries of a config file");
    cmd->add_option("config", config_path, "JSON config file")->required();
    add_common(cmd, flags);
    cmd->callback([&, kind] { only_kind = qps::exp::parse_kind(kind); });
  }

  std::string render_in, render_out;
  int block_size = 12;
  auto* render_cmd = app.add_subcommand("render", "render a section CSV as a PPM heatmap");
  render_cmd->add_option("csv", render_in, "section CSV (m, n, Q, P, value)")->required();
  render_cmd->add_option("ppm", render_out, "output PPM path")->required();
  render_cmd->add_option("--block-size", block_size, "pixels per cell");

  CLI11_PARSE(app, argc, argv);

  try {
    if (render_cmd->parsed()) {
      const qps::io::SectionData data = qps::io::read_section_csv(render_in);
      qps::io::write_heatmap_ppm(render_out, data.l_q, data.l_p, data.values, block_size);
      std::cout << render_out << "\n";
      return 0;
    }
    return run_config(config_path, flags, only_kind);
  } catch (const std::invalid_argument& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "runtime"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  }
}
