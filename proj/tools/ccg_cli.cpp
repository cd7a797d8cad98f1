// Experiment driver: ccg <subcommand> [--config PATH] [--out DIR]
// [--mesh-file PATH] [--threads N].

#include "ccg/harness/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace ccg;
using namespace ccg::harness;

struct Globals {
  std::string config;
  std::string out = "out";
  std::string mesh_file;
  int threads = 0;
};

ConfigFile load(const Globals& g) {
  return g.config.empty() ? ConfigFile{} : ConfigFile::load(g.config);
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

SimulationConfig simulation_config(const Globals& g) {
  SimulationConfig c = load(g).simulation();
  if (!g.mesh_file.empty()) c.mesh.file = g.mesh_file;
  if (g.threads > 0) c.threads = g.threads;
  return c;
}

void write_table(const Table& t, const std::filesystem::path& path) {
  t.write(path);
  std::cout << t.str();
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_mms(const Globals& g) {
  MmsConfig c = load(g).mms();
  if (g.threads > 0) c.threads = g.threads;
  if (!g.mesh_file.empty()) std::cerr << "note: mms-convergence uses structured meshes; --mesh-file ignored\n";
  const auto results = run_mms_convergence(c, log_line);
  write_table(mms_table(results), std::filesystem::path(g.out) / "convergence.csv");
  return 0;
}

int cmd_five_spot(const Globals& g) {
  const SimulationConfig c = simulation_config(g);
  c.validate();
  auto mesh = std::make_shared<const Mesh>(c.mesh.build());
  const RunResult r = run_simulation(c, mesh, {}, log_line);
  write_run_outputs(r, c, g.out);
  std::cout << "injected," << fmt(r.ledger.injected) << "\nproduced," << fmt(r.ledger.produced)
            << "\nstored," << fmt(r.ledger.stored) << "\nrelative_residual,"
            << fmt(relative_ledger_residual(r.ledger)) << '\n';
  if (const auto w = front_width(r.profile)) std::cout << "front_width," << fmt(*w) << '\n';
  return 0;
}

void lens_defaults(SimulationConfig& c) {
  c.flow_epsilon = 1.0;
  c.transport_epsilon = 1.0;
  c.flow_penalty = Penalty::constant(0.1);
  c.transport_penalty = Penalty::constant(0.01);
}

int cmd_lens(const Globals& g) {
  SimulationConfig c = simulation_config(g);
  if (g.config.empty()) lens_defaults(c);
  c.validate();
  auto mesh = std::make_shared<const Mesh>(c.mesh.build());
  const LensResult r = run_lens(c, mesh, log_line);
  write_run_outputs(r.lens, c, g.out, "lens_");
  write_run_outputs(r.homogeneous, c, g.out, "homogeneous_");
  write_table(lens_summary(r), std::filesystem::path(g.out) / "lens_summary.csv");
  return 0;
}

int cmd_raster(const Globals& g, const std::string& raster) {
  SimulationConfig c = simulation_config(g);
  if (g.config.empty()) {
    c.flow_epsilon = 1.0;
    c.transport_epsilon = 1.0;
    c.flow_penalty = Penalty::constant(10.0);
    c.transport_penalty = Penalty::constant(0.01);
    c.viscosity = "quarter_mix";
  }
  c.permeability = "raster";
  if (!raster.empty()) c.raster_file = raster;
  c.validate();
  auto mesh = std::make_shared<const Mesh>(c.mesh.build());
  const RunResult r = run_simulation(c, mesh, {true, 0.1}, log_line);
  write_run_outputs(r, c, g.out);
  return 0;
}

int cmd_nnz(const Globals& g) {
  NnzConfig c = load(g).nnz();
  if (!g.mesh_file.empty()) c.files_2d.push_back(g.mesh_file);
  const NnzResult r = run_nnz_report(c, log_line);
  write_table(nnz_table(r), std::filesystem::path(g.out) / "nnz.csv");
  write_table(improvement_table(r), std::filesystem::path(g.out) / "improvement.csv");
  return 0;
}

int cmd_matrix_1d(const Globals& g) {
  write_table(matrix_1d_table(load(g).matrix1d()), std::filesystem::path(g.out) / "matrix_1d.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-centered Galerkin and interior penalty DG experiments"};
  Globals g;
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--mesh-file", g.mesh_file, "mesh file overriding the configured mesh")
      ->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "assembly threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  std::string raster;
  auto* mms = app.add_subcommand("mms-convergence", "manufactured-solution convergence table");
  auto* five = app.add_subcommand("five-spot", "quarter-five-spot run");
  auto* lens = app.add_subcommand("lens", "low-permeability lens vs homogeneous paired runs");
  auto* rast = app.add_subcommand("raster", "raster permeability run");
  rast->add_option("--raster", raster, "permeability raster file")->check(CLI::ExistingFile);
  auto* nnz = app.add_subcommand("nnz-report", "nonzero counts of the flow matrices");
  auto* m1d = app.add_subcommand("matrix-1d", "1D stiffness matrix properties");
  for (auto* sub : {mms, five, lens, rast, nnz, m1d}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*mms) return cmd_mms(g);
    if (*five) return cmd_five_spot(g);
    if (*lens) return cmd_lens(g);
    if (*rast) return cmd_raster(g, raster);
    if (*nnz) return cmd_nnz(g);
    if (*m1d) return cmd_matrix_1d(g);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
