// Command-line driver for the two reproducible studies: manufactured-solution
// convergence tables and condition-number sweeps over surface translations.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cutfem/study.hpp"

namespace {

struct CommonFlags {
  std::string gradient = "tangential";
  std::string stab = "none";
};

void apply_common(cutfem::StudyConfig& config, const CommonFlags& flags) {
  config.gradient = flags.gradient == "full"
                        ? cutfem::GradientVariant::full
                        : cutfem::GradientVariant::tangential;
  if (flags.stab == "fullgrad") {
    config.stabilization = cutfem::Stabilization::full_gradient;
  } else if (flags.stab == "face") {
    config.stabilization = cutfem::Stabilization::face;
  } else {
    config.stabilization = cutfem::Stabilization::none;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut finite element studies for the surface Laplace-Beltrami "
               "problem"};
  app.require_subcommand(1);

  cutfem::StudyConfig config;
  CommonFlags flags;

  auto* conv = app.add_subcommand(
      "convergence", "Refinement study for the manufactured problems");
  conv->add_option("--surface", config.surface_name, "sphere | blob")
      ->check(CLI::IsMember({"sphere", "blob"}));
  conv->add_option("--gradient", flags.gradient, "tangential | full")
      ->check(CLI::IsMember({"tangential", "full"}));
  conv->add_option("--stab", flags.stab, "none | fullgrad | face")
      ->check(CLI::IsMember({"none", "fullgrad", "face"}));
  conv->add_option("--tau", config.tau, "stabilization parameter");
  conv->add_option("--levels", config.levels, "number of meshes (default 6)");
  conv->add_option("--base-cells", config.base_cells,
                   "cells per axis at level 0 (default 5)");
  conv->add_option("--stab-power", config.stab_power,
                   "h exponent of the volume stabilization (default 1)");
  conv->add_option("--face-power", config.face_power,
                   "h exponent of the face stabilization (default 0)");
  conv->add_flag("--h1-full-gradient", config.h1_full_gradient,
                 "measure the H1 seminorm with full instead of tangential "
                 "gradients");
  conv->add_option("--solver-tol", config.solver_tol, "CG tolerance");
  conv->add_option("--out", config.out_path, "CSV output path")->required();

  auto* sweep = app.add_subcommand(
      "sweep", "Condition numbers under surface translation");
  sweep->add_option("--mesh-level", config.mesh_level,
                    "mesh level k: round(5*2^(k/2)) cells per axis");
  sweep->add_option("--gradient", flags.gradient, "tangential | full")
      ->check(CLI::IsMember({"tangential", "full"}));
  sweep->add_option("--stab", flags.stab, "none | fullgrad | face")
      ->check(CLI::IsMember({"none", "fullgrad", "face"}));
  sweep->add_option("--tau", config.tau, "stabilization parameter");
  sweep->add_option("--stab-power", config.stab_power,
                    "h exponent of the volume stabilization (default 1)");
  sweep->add_option("--face-power", config.face_power,
                    "h exponent of the face stabilization (default 0)");
  sweep->add_option("--n-deltas", config.n_deltas,
                    "translation samples in [0, 1] (default 101)");
  sweep->add_flag("--diag-scale", config.diag_scale,
                  "apply symmetric diagonal scaling before the eigensolve");
  sweep->add_option("--out", config.out_path, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);
  apply_common(config, flags);

  try {
    if (conv->parsed()) {
      config.study = "convergence";
      const std::vector<cutfem::ConvergenceRow> rows =
          cutfem::run_convergence(config);
      auto out = open_output(config.out_path);
      cutfem::write_convergence_csv(config, rows, out);
      cutfem::write_convergence_table(rows, std::cout);
    } else {
      config.study = "condition_sweep";
      const auto [rows, summary] = cutfem::run_condition_sweep(config);
      auto out = open_output(config.out_path);
      cutfem::write_sweep_csv(config, rows, summary, out);
      std::cout << "h2*kappa over " << rows.size()
                << " deltas: min=" << summary.min_h2_kappa
                << " max=" << summary.max_h2_kappa
                << " mean=" << summary.mean_h2_kappa
                << " failed=" << summary.n_failed << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
