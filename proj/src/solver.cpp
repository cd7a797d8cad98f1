#include "ccg/solver.hpp"

#include "ccg/quadrature.hpp"

#include <chrono>
#include <cmath>

namespace ccg {

int TimeGrid::steps() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (t_end < dt * (1.0 - 1e-12)) throw std::invalid_argument("t_end must be at least dt");
  return static_cast<int>(std::lround(t_end / dt));
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

namespace {

Problem with_defaults(Problem p) {
  if (!p.space) throw std::invalid_argument("problem needs a concentration space");
  if (!p.pressure_space) p.pressure_space = p.space;
  if (&p.pressure_space->mesh() != &p.space->mesh()) {
    throw std::invalid_argument("pressure and concentration spaces must share one mesh");
  }
  return p;
}

}  // namespace

Simulation::Simulation(Problem problem, TimeGrid grid)
    : problem_(with_defaults(std::move(problem))),
      grid_(grid),
      total_steps_(grid.steps()),
      pressure_(problem_.pressure_space),
      concentration_(problem_.space),
      flow_solver_(problem_.solver),
      transport_solver_(problem_.solver) {
  const FeSpace& space = *problem_.space;
  if (static_cast<int>(problem_.kappa.size()) != space.mesh().num_cells()) {
    throw std::invalid_argument("permeability needs one value per cell");
  }
  if (problem_.initial_concentration) {
    concentration_ = project(problem_.space, problem_.initial_concentration);
  }
  concentration_.set_boundary(problem_.concentration_bc.at(0.0));
  pressure_.set_boundary(problem_.pressure_bc.at(0.0));
  mass_ = assemble_mass(space, problem_.transport.porosity, problem_.transport.volume_order);
  unit_mass_ = assemble_mass(*problem_.pressure_space, 1.0, problem_.flow.volume_order);
  for (int c = 0; c < space.mesh().num_cells(); ++c) domain_measure_ += space.mesh().cell_measure(c);
  ledger_.initial = stored_mass(concentration_.values());
  ledger_.stored = ledger_.initial;
  velocity_ = std::make_unique<VelocityField>([](int, const Vec3&) { return Vec3::Zero(); });
}

double Simulation::stored_mass(const Eigen::VectorXd& c) const {
  return Eigen::VectorXd::Ones(c.size()).dot(mass_ * c);
}

double Simulation::injection_rate(double t) const {
  if (!problem_.sources.injected_load) return 0.0;
  const FeSpace& space = *problem_.space;
  const Mesh& mesh = space.mesh();
  const int order = problem_.transport.volume_order > 0 ? problem_.transport.volume_order
                                                        : space.default_volume_order();
  std::vector<QuadraturePoint> rule;
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cell_rule(mesh, c, order, rule);
    for (const auto& q : rule) sum += q.weight * problem_.sources.injected_load(c, q.point, t);
  }
  return sum;
}

double Simulation::production_rate(const Field& c, double t) const {
  if (!problem_.sources.production) return 0.0;
  const FeSpace& space = *problem_.space;
  const Mesh& mesh = space.mesh();
  const int order = problem_.transport.volume_order > 0 ? problem_.transport.volume_order
                                                        : space.default_volume_order();
  std::vector<QuadraturePoint> rule;
  double sum = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    cell_rule(mesh, e, order, rule);
    for (const auto& q : rule) {
      const double qp = problem_.sources.production(e, q.point, t);
      if (qp != 0.0) sum += q.weight * qp * c.value(e, q.point);
    }
  }
  return sum;
}

void Simulation::solve_flow() {
  const FeSpace& space = *problem_.pressure_space;
  LinearSystem sys;
  try {
    sys = assemble_flow(space, problem_.kappa, problem_.viscosity, concentration_, problem_.flow,
                        problem_.pressure_bc, problem_.sources, time_);
    pressure_.values() = flow_solver_.solve(sys.matrix, sys.rhs);
  } catch (const Error& e) {
    throw StageError("flow stage at t = " + std::to_string(time_) + ": " + e.what());
  }
  pressure_.set_boundary(problem_.pressure_bc.at(time_));
  if (sys.pinned) {
    const Eigen::VectorXd& p = pressure_.values();
    const double mean = Eigen::VectorXd::Ones(p.size()).dot(unit_mass_ * p) / domain_measure_;
    pressure_.values().array() -= mean;
  }
  velocity_ = std::make_unique<VelocityField>(pressure_, concentration_, problem_.kappa,
                                              problem_.viscosity);
}

void Simulation::step() {
  const FeSpace& space = *problem_.space;
  const double dt = grid_.dt;
  const double t0 = time_;
  const double t1 = t0 + dt;
  StepDiagnostics diag;
  diag.step = steps_ + 1;
  diag.time = t1;

  auto start = std::chrono::steady_clock::now();
  solve_flow();
  diag.flow_seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const Eigen::VectorXd c0 = concentration_.values();
  Eigen::VectorXd c1;
  const bool cn = grid_.scheme == TimeScheme::crank_nicolson;
  const double produced_rate0 = cn ? production_rate(concentration_, t0) : 0.0;
  try {
    // Operator and data lagged at t_n.
    TransportSystem sys =
        assemble_transport(space, *velocity_, problem_.dispersion, problem_.kappa,
                           problem_.transport, problem_.concentration_bc, problem_.sources, t0);
    const SparseMatrix& a = sys.stiffness;
    const double theta = cn ? 0.5 : 1.0;
    const SparseMatrix lhs = combine(1.0 / dt, mass_, theta, a);
    Eigen::VectorXd rhs = (mass_ * c0) / dt + sys.rhs;
    if (cn) rhs -= 0.5 * (a * c0);
    c1 = transport_solver_.solve(lhs, rhs);
  } catch (const Error& e) {
    throw StageError("transport stage at t = " + std::to_string(t1) + ": " + e.what());
  }
  concentration_.values() = c1;
  concentration_.set_boundary(problem_.concentration_bc.at(t1));
  diag.transport_seconds = seconds_since(start);

  const double stored0 = ledger_.stored;
  const double stored1 = stored_mass(c1);
  const double injected = dt * injection_rate(t0);
  double produced = dt * production_rate(concentration_, t0);
  if (cn) produced = 0.5 * (produced + dt * produced_rate0);
  ledger_.stored = stored1;
  ledger_.injected += injected;
  ledger_.produced += produced;
  diag.mass_residual = injected - produced - (stored1 - stored0);

  const Mesh& mesh = space.mesh();
  diag.c_min = std::numeric_limits<double>::infinity();
  diag.c_max = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const double avg = concentration_.cell_average(e);
    diag.c_min = std::min(diag.c_min, avg);
    diag.c_max = std::max(diag.c_max, avg);
  }
  time_ = t1;
  ++steps_;
  diagnostics_.push_back(diag);
}

void Simulation::run(const std::function<void(const Simulation&)>& after_step) {
  while (steps_ < total_steps_) {
    step();
    if (after_step) after_step(*this);
  }
}

}  // namespace ccg
