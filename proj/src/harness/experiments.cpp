#include "ccg/harness/experiments.hpp"

#include "ccg/appendix1d.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace ccg::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string time_tag(double t) {
  std::ostringstream s;
  s.precision(6);
  s << t;
  return s.str();
}

}  // namespace

std::vector<double> convergence_rates(const std::vector<double>& h,
                                      const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("h and error lists differ in length");
  std::vector<double> rates(h.size(), kNaN);
  for (std::size_t i = 1; i < h.size(); ++i) {
    rates[i] = std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]);
  }
  return rates;
}

// ---------------------------------------------------------------------------

MmsLevel run_mms_level(const MmsConfig& config, const std::string& method, int n) {
  const auto start = std::chrono::steady_clock::now();
  auto mesh = std::make_shared<const Mesh>(generate_structured(2, n));
  const ManufacturedSolution mms(ViscosityModel::power(config.mu0, config.alpha, config.beta),
                                 config.dispersion);
  Problem pb;
  pb.space = make_space(method, mesh, BoundaryTrace::dirichlet);
  pb.kappa.assign(mesh->num_cells(), mms.kappa());
  pb.viscosity = mms.viscosity();
  pb.dispersion = mms.dispersion();
  pb.flow.epsilon = config.epsilon;
  pb.flow.penalty = Penalty::constant(config.sigma);
  pb.flow.threads = config.threads;
  pb.transport.epsilon = config.epsilon;
  pb.transport.penalty = Penalty::constant(config.sigma);
  pb.transport.porosity = mms.porosity();
  pb.transport.threads = config.threads;
  pb.pressure_bc = BoundarySpec::dirichlet_everywhere(
      *mesh, [mms](const Vec3& x, double t) { return mms.pressure(x, t); });
  pb.concentration_bc = BoundarySpec::dirichlet_everywhere(
      *mesh, [mms](const Vec3& x, double t) { return mms.concentration(x, t); });
  pb.sources = mms.sources();
  pb.initial_concentration = [mms](const Vec3& x) { return mms.concentration(x, 0.0); };

  const bool stepping = config.t_end > 0.0;
  Simulation sim(std::move(pb), TimeGrid{stepping ? config.t_end : config.dt, config.dt, config.scheme});
  try {
    if (stepping) sim.run();
    sim.solve_flow();
  } catch (const Error& e) {
    throw Error(method + " on the " + std::to_string(mesh->num_cells()) + "-cell mesh: " + e.what());
  }
  const double t = sim.time();
  MmsLevel level;
  level.n = n;
  level.cells = mesh->num_cells();
  level.h = mesh->max_diameter();
  level.pressure_error = l2_error(sim.pressure(), [&](const Vec3& x) { return mms.pressure(x, t); });
  level.concentration_error =
      l2_error(sim.concentration(), [&](const Vec3& x) { return mms.concentration(x, t); });
  level.seconds = elapsed(start);
  return level;
}

std::vector<MmsResult> run_mms_convergence(const MmsConfig& config, const Logger& log) {
  config.validate();
  std::vector<MmsResult> out;
  for (const auto& method : config.methods) {
    MmsResult r;
    r.method = method;
    std::vector<double> h;
    std::vector<double> ep;
    std::vector<double> ec;
    std::vector<int> cells;
    for (int n : config.meshes) {
      const MmsLevel level = run_mms_level(config, method, n);
      say(log, method + " cells=" + fmt(level.cells) + " p_err=" + fmt(level.pressure_error) +
                   " c_err=" + fmt(level.concentration_error) + " (" + time_tag(level.seconds) + " s)");
      h.push_back(level.h);
      ep.push_back(level.pressure_error);
      ec.push_back(level.concentration_error);
      cells.push_back(level.cells);
      r.seconds.push_back(level.seconds);
    }
    const auto rp = convergence_rates(h, ep);
    const auto rc = convergence_rates(h, ec);
    for (std::size_t i = 0; i < h.size(); ++i) {
      r.pressure.push_back({cells[i], h[i], ep[i], rp[i]});
      r.concentration.push_back({cells[i], h[i], ec[i], rc[i]});
    }
    out.push_back(std::move(r));
  }
  return out;
}

Table mms_table(const std::vector<MmsResult>& results) {
  Table t{{"method", "variable", "cells", "h", "error", "rate"}, {}};
  for (const auto& r : results) {
    for (const auto& [name, rows] : {std::pair{"pressure", &r.pressure},
                                     std::pair{"concentration", &r.concentration}}) {
      for (const auto& row : *rows) {
        t.add({r.method, name, fmt(row.cells), fmt(row.h), fmt(row.error),
               std::isnan(row.rate) ? "" : fmt(row.rate)});
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

Problem build_problem(const SimulationConfig& config, const std::shared_ptr<const Mesh>& mesh) {
  Problem pb;
  pb.space = make_space(config.method, mesh);
  pb.pressure_space = config.pressure_method.empty() || config.pressure_method == config.method
                          ? pb.space
                          : make_space(config.pressure_method, mesh);
  PermeabilityField perm = PermeabilityField::uniform(config.kappa);
  if (config.permeability == "lens") {
    perm = PermeabilityField::lens(config.lens_kappa, config.kappa, config.lens_box);
  } else if (config.permeability == "raster") {
    perm = PermeabilityField::load_raster(config.raster_file, config.raster_log10);
  }
  pb.kappa = perm.per_cell(*mesh);
  pb.viscosity = config.viscosity_model();
  pb.dispersion = config.dispersion;
  pb.flow.epsilon = config.flow_epsilon;
  pb.flow.penalty = config.flow_penalty;
  pb.flow.threads = config.threads;
  pb.transport.epsilon = config.transport_epsilon;
  pb.transport.penalty = config.transport_penalty;
  pb.transport.porosity = config.porosity;
  pb.transport.upwind = config.upwind;
  pb.transport.threads = config.threads;
  pb.pressure_bc = BoundarySpec::no_flow(*mesh);
  pb.concentration_bc = BoundarySpec::no_flow(*mesh);
  pb.sources = well_sources(config.wells, *mesh);
  pb.initial_concentration = [](const Vec3&) { return 0.0; };
  return pb;
}

int producer_cell(const Mesh& mesh, const WellSources& wells) {
  Vec3 corner = wells.producer.support.hi;
  for (int i = mesh.dim(); i < 3; ++i) corner[i] = 0.0;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double d = (mesh.centroid(c) - corner).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double box_mean(const Field& field, const Box& box) {
  const Mesh& mesh = field.space().mesh();
  double sum = 0.0;
  double measure = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (!box.contains(mesh.centroid(c), mesh.dim())) continue;
    sum += mesh.cell_measure(c) * field.cell_average(c);
    measure += mesh.cell_measure(c);
  }
  if (measure == 0.0) throw std::invalid_argument("box contains no cell centroid");
  return sum / measure;
}

Box mirror_box(const Box& box) {
  Box m = box;
  m.lo[0] = 1.0 - box.hi[1];
  m.hi[0] = 1.0 - box.lo[1];
  m.lo[1] = 1.0 - box.hi[0];
  m.hi[1] = 1.0 - box.lo[0];
  return m;
}

std::optional<double> first_crossing(const std::vector<ProfileSample>& profile, double level) {
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double a = profile[i].value - level;
    const double b = profile[i + 1].value - level;
    if (a == 0.0) return profile[i].s;
    if ((a < 0.0) != (b < 0.0) || b == 0.0) {
      const double w = a / (a - b);
      return profile[i].s + w * (profile[i + 1].s - profile[i].s);
    }
  }
  return std::nullopt;
}

std::optional<double> front_width(const std::vector<ProfileSample>& profile, double lo, double hi) {
  const auto s_lo = first_crossing(profile, lo);
  const auto s_hi = first_crossing(profile, hi);
  if (!s_lo || !s_hi) return std::nullopt;
  return std::abs(*s_lo - *s_hi);
}

const Snapshot* RunResult::snapshot_at(double t, double tol) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.time - t) <= tol) return &s;
  }
  return nullptr;
}

double relative_ledger_residual(const MassLedger& ledger) {
  const double scale = std::max({std::abs(ledger.initial), std::abs(ledger.stored),
                                 std::abs(ledger.injected), std::abs(ledger.produced)});
  return scale > 0.0 ? std::abs(ledger.residual()) / scale : std::abs(ledger.residual());
}

RunResult run_simulation(const SimulationConfig& config, const std::shared_ptr<const Mesh>& mesh,
                         const RunOptions& options, const Logger& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  TimeGrid grid = config.time;
  if (options.track_breakthrough) grid.t_end = std::max(grid.t_end, config.breakthrough_horizon);
  Simulation sim(build_problem(config, mesh), grid);

  RunResult out;
  out.label = config.mesh.label() + "_" + config.method + "_" + scheme_name(grid.scheme);
  out.producer = producer_cell(*mesh, config.wells);
  const double half = 0.5 * grid.dt;
  std::vector<char> taken(config.snapshots.size(), 0);
  bool profiled = false;

  auto record = [&]() {
    const double t = sim.time();
    bool need_flow = false;
    for (std::size_t i = 0; i < config.snapshots.size(); ++i) {
      if (!taken[i] && std::abs(config.snapshots[i] - t) < half) need_flow = true;
    }
    if (need_flow) {
      sim.solve_flow();
      for (std::size_t i = 0; i < config.snapshots.size(); ++i) {
        if (taken[i] || std::abs(config.snapshots[i] - t) >= half) continue;
        taken[i] = 1;
        out.snapshots.push_back({t, sim.concentration(), sim.pressure()});
      }
    }
    if (!profiled && std::abs(config.profile_time - t) < half) {
      profiled = true;
      out.profile = sample_profile(sim.concentration(), config.profile_from, config.profile_to,
                                   config.profile_samples);
    }
    if (!out.breakthrough && sim.steps_taken() > 0 &&
        sim.concentration().cell_average(out.producer) > options.threshold) {
      out.breakthrough = t;
    }
  };

  record();
  const int report_every = std::max(1, sim.total_steps() / 10);
  while (sim.steps_taken() < sim.total_steps()) {
    sim.step();
    record();
    if (sim.steps_taken() % report_every == 0) {
      const auto& d = sim.diagnostics().back();
      say(log, out.label + " t=" + time_tag(d.time) + " c in [" + time_tag(d.c_min) + ", " +
                   time_tag(d.c_max) + "]");
    }
    if (sim.time() >= config.time.t_end - half && (!options.track_breakthrough || out.breakthrough)) {
      break;
    }
  }
  out.ledger = sim.ledger();
  out.diagnostics = sim.diagnostics();
  out.final_time = sim.time();
  out.seconds = elapsed(start);
  return out;
}

void write_run_outputs(const RunResult& run, const SimulationConfig& config,
                       const std::filesystem::path& dir, const std::string& prefix) {
  if (!run.profile.empty()) write_csv_profile(run.profile, dir / (prefix + "profile.csv"));

  Table ledger{{"quantity", "value"}, {}};
  ledger.add({"initial", fmt(run.ledger.initial)});
  ledger.add({"stored", fmt(run.ledger.stored)});
  ledger.add({"injected", fmt(run.ledger.injected)});
  ledger.add({"produced", fmt(run.ledger.produced)});
  ledger.add({"residual", fmt(run.ledger.residual())});
  ledger.add({"relative_residual", fmt(relative_ledger_residual(run.ledger))});
  ledger.add({"final_time", fmt(run.final_time)});
  ledger.add({"breakthrough_time", run.breakthrough ? fmt(*run.breakthrough) : ""});
  ledger.write(dir / (prefix + "ledger.csv"));

  Table diag{{"step", "time", "c_min", "c_max", "mass_residual"}, {}};
  Table timing{{"step", "flow_seconds", "transport_seconds"}, {}};
  for (const auto& d : run.diagnostics) {
    diag.add({fmt(d.step), fmt(d.time), fmt(d.c_min), fmt(d.c_max), fmt(d.mass_residual)});
    timing.add({fmt(d.step), fmt(d.flow_seconds), fmt(d.transport_seconds)});
  }
  diag.write(dir / (prefix + "diagnostics.csv"));
  timing.write(dir / (prefix + "timings.csv"));

  if (!config.write_vtk) return;
  for (const auto& s : run.snapshots) {
    const Mesh& mesh = s.concentration.space().mesh();
    write_vtk(mesh, {{"concentration", &s.concentration}, {"pressure", &s.pressure}},
              dir / (prefix + "t" + time_tag(s.time) + ".vtk"));
  }
}

LensResult run_lens(const SimulationConfig& config, const std::shared_ptr<const Mesh>& mesh,
                    const Logger& log) {
  SimulationConfig lens = config;
  lens.permeability = "lens";
  SimulationConfig homogeneous = config;
  homogeneous.permeability = "uniform";
  if (std::find_if(lens.snapshots.begin(), lens.snapshots.end(), [&](double t) {
        return std::abs(t - config.profile_time) < 1e-12;
      }) == lens.snapshots.end()) {
    lens.snapshots.push_back(config.profile_time);
  }
  const RunOptions track{true, 0.1};
  LensResult r;
  r.lens = run_simulation(lens, mesh, track, log);
  r.lens.label = "lens_" + r.lens.label;
  r.homogeneous = run_simulation(homogeneous, mesh, track, log);
  r.homogeneous.label = "homogeneous_" + r.homogeneous.label;
  r.lens_box = config.lens_box;
  r.mirrored = mirror_box(config.lens_box);
  r.compare_time = config.profile_time;
  const Snapshot* snap = r.lens.snapshot_at(config.profile_time, 0.5 * config.time.dt);
  if (!snap) throw Error("lens run has no snapshot at t = " + time_tag(config.profile_time));
  r.lens_box_mean = box_mean(snap->concentration, r.lens_box);
  r.mirror_box_mean = box_mean(snap->concentration, r.mirrored);
  return r;
}

Table lens_summary(const LensResult& result) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  Table t{{"quantity", "value"}, {}};
  t.add({"lens_breakthrough", opt(result.lens.breakthrough)});
  t.add({"homogeneous_breakthrough", opt(result.homogeneous.breakthrough)});
  t.add({"compare_time", fmt(result.compare_time)});
  t.add({"lens_box_mean", fmt(result.lens_box_mean)});
  t.add({"mirror_box_mean", fmt(result.mirror_box_mean)});
  return t;
}

// ---------------------------------------------------------------------------

double percent_improvement(std::size_t nnz_dg, std::size_t nnz_ccg) {
  return 100.0 * (static_cast<double>(nnz_dg) - static_cast<double>(nnz_ccg)) /
         static_cast<double>(nnz_ccg);
}

std::optional<std::size_t> reference_nnz(int dim, bool structured, int cells,
                                         const std::string& method) {
  using Key = std::tuple<int, bool, int, std::string>;
  static const std::map<Key, std::size_t> table = {
      {{2, true, 2048, "dg1"}, 66560},
      {{2, true, 8192, "dg1"}, 268290},
      {{2, true, 32768, "dg1"}, 1077200},
      {{2, true, 131072, "dg1"}, 4317184},
      {{2, true, 524288, "dg1"}, 17285120},
      {{2, true, 2048, "dg2"}, 200060},
      {{2, true, 8192, "dg2"}, 805630},
      {{2, true, 32768, "dg2"}, 3233300},
      {{2, true, 2048, "ccg"}, 50622},
      {{2, true, 8192, "ccg"}, 208320},
      {{2, true, 32768, "ccg"}, 845410},
      {{2, true, 131072, "ccg"}, 3405406},
      {{2, true, 524288, "ccg"}, 13670622},
      {{2, false, 3424, "dg1"}, 111970},
      {{2, false, 14006, "dg1"}, 460150},
      {{2, false, 56528, "dg1"}, 1861300},
      {{2, false, 3424, "dg2"}, 336290},
      {{2, false, 14006, "dg2"}, 1381200},
      {{2, false, 56528, "dg2"}, 5585500},
      {{2, false, 3424, "ccg"}, 85930},
      {{2, false, 14006, "ccg"}, 355540},
      {{2, false, 56528, "ccg"}, 1444700},
      {{3, true, 3072, "dg1"}, 221952},
      {{3, true, 24576, "dg1"}, 1821696},
      {{3, true, 196608, "dg1"}, 14757888},
      {{3, true, 1572864, "dg1"}, 118800384},
      {{3, true, 3072, "ccg"}, 157574},
      {{3, true, 24576, "ccg"}, 1389062},
      {{3, true, 196608, "ccg"}, 11644934},
      {{3, true, 1572864, "ccg"}, 95326214},
  };
  const auto it = table.find({dim, structured, cells, method});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

NnzRow count_nnz(const std::shared_ptr<const Mesh>& mesh, const std::string& label, bool structured,
                 const std::string& method, double sigma) {
  const auto space = make_space(method, mesh, BoundaryTrace::dirichlet);
  NnzRow row;
  row.mesh = label;
  row.dim = mesh->dim();
  row.structured = structured;
  row.cells = mesh->num_cells();
  row.method = method;
  row.rows = space->num_dofs();
  row.pattern_nnz = space->pattern().nnz();
  row.assembled = row.cells < kPatternOnlyCells;
  if (row.assembled) {
    FlowFormParams params;
    params.penalty = Penalty::constant(sigma);
    const std::vector<double> kappa(mesh->num_cells(), 1.0);
    const Field c(space);
    const LinearSystem sys = assemble_flow(
        *space, kappa, ViscosityModel::constant(1.0), c, params,
        BoundarySpec::dirichlet_everywhere(*mesh, [](const Vec3&, double) { return 0.0; }),
        SourceTerms{}, 0.0);
    row.nnz = sys.matrix.nnz();
  } else {
    row.nnz = row.pattern_nnz;
  }
  row.nnz_per_row = static_cast<double>(row.nnz) / row.rows;
  row.reference = reference_nnz(row.dim, structured, row.cells, method);
  return row;
}

NnzResult run_nnz_report(const NnzConfig& config, const Logger& log) {
  config.validate();
  NnzResult out;
  auto one_mesh = [&](const std::shared_ptr<const Mesh>& mesh, const std::string& label,
                      bool structured, const std::vector<std::string>& methods) {
    std::optional<std::size_t> ccg;
    std::optional<std::size_t> dg1;
    for (const auto& m : methods) {
      NnzRow row = count_nnz(mesh, label, structured, m, config.sigma);
      say(log, label + " " + m + " nnz=" + fmt(row.nnz) + " per_row=" + fmt(row.nnz_per_row));
      if (m == "ccg") ccg = row.nnz;
      if (m == "dg1") dg1 = row.nnz;
      out.rows.push_back(std::move(row));
    }
    if (ccg && dg1) {
      ImprovementRow imp;
      imp.mesh = label;
      imp.dim = mesh->dim();
      imp.cells = mesh->num_cells();
      imp.ccg = *ccg;
      imp.dg1 = *dg1;
      imp.percent = percent_improvement(*dg1, *ccg);
      const auto rc = reference_nnz(imp.dim, structured, imp.cells, "ccg");
      const auto rd = reference_nnz(imp.dim, structured, imp.cells, "dg1");
      if (rc && rd) imp.reference_percent = percent_improvement(*rd, *rc);
      out.improvement.push_back(imp);
    }
  };
  for (int n : config.structured_2d) {
    auto mesh = std::make_shared<const Mesh>(generate_structured(2, n));
    one_mesh(mesh, "structured2d_n" + std::to_string(n), true, config.methods_2d);
  }
  for (const auto& f : config.files_2d) {
    auto mesh = std::make_shared<const Mesh>(load_mesh(f));
    one_mesh(mesh, f.stem().string(), false, config.methods_2d);
  }
  for (int n : config.structured_3d) {
    auto mesh = std::make_shared<const Mesh>(generate_structured(3, n));
    one_mesh(mesh, "structured3d_n" + std::to_string(n), true, config.methods_3d);
  }
  return out;
}

Table nnz_table(const NnzResult& result) {
  Table t{{"mesh", "dim", "cells", "method", "rows", "nnz", "nnz_per_row", "pattern_nnz", "counted",
           "reference_nnz", "relative_to_reference"},
          {}};
  for (const auto& r : result.rows) {
    t.add({r.mesh, fmt(r.dim), fmt(r.cells), r.method, fmt(r.rows), fmt(r.nnz), fmt(r.nnz_per_row),
           fmt(r.pattern_nnz), r.assembled ? "assembled" : "pattern",
           r.reference ? fmt(*r.reference) : "",
           r.reference ? fmt(static_cast<double>(r.nnz) / static_cast<double>(*r.reference) - 1.0)
                       : ""});
  }
  return t;
}

Table improvement_table(const NnzResult& result) {
  Table t{{"mesh", "dim", "cells", "nnz_ccg", "nnz_dg1", "percent_improvement",
           "reference_percent"},
          {}};
  for (const auto& r : result.improvement) {
    t.add({r.mesh, fmt(r.dim), fmt(r.cells), fmt(r.ccg), fmt(r.dg1), fmt(r.percent),
           r.reference_percent ? fmt(*r.reference_percent) : ""});
  }
  return t;
}

// ---------------------------------------------------------------------------

Table matrix_1d_table(const Matrix1dConfig& config) {
  config.validate();
  Table t{{"eps", "sigma", "N", "a", "b", "c", "d", "a1", "a0", "b0", "c0", "z_matrix",
           "irreducible", "tridiagonal", "monotone", "m_matrix", "min_inverse_entry", "cond2"},
          {}};
  for (double eps : config.epsilons) {
    for (double sigma : config.sigmas) {
      for (int n : config.sizes) {
        const ToeplitzCoefficients c = toeplitz_coefficients(eps, sigma);
        const SparseMatrix m = build_T(n, eps, sigma, 1.0 / n);
        const bool z = is_z_matrix(m);
        std::string monotone = "singular";
        std::string m_matrix = "false";
        std::string min_inv;
        std::string cond = "inf";
        try {
          const MonotonicityReport rep = monotonicity(m);
          monotone = fmt(rep.monotone);
          m_matrix = fmt(z && rep.monotone);
          min_inv = fmt(rep.min_inverse_entry);
          const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.dense());
          const auto& s = svd.singularValues();
          cond = fmt(s(0) / s(s.size() - 1));
        } catch (const SolveError&) {
        }
        t.add({fmt(eps), fmt(sigma), fmt(n), fmt(c.a), fmt(c.b), fmt(c.c), fmt(c.d), fmt(c.a1),
               fmt(c.a0), fmt(c.b0), fmt(c.c0), fmt(z), fmt(is_irreducible(m)),
               fmt(is_tridiagonal(m)), monotone, m_matrix, min_inv, cond});
      }
    }
  }
  return t;
}

}  // namespace ccg::harness
